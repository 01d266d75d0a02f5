"""U-chains: components, minimal chain lengths and Hu boundedness.

A U-chain of length n is a sequence of n points, consecutive ones U-related,
so a point alone is a chain of length 1. Reports carry the step count
(length - 1) as well.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .errors import InputError
from .space import Entourage, EntourageLadder, MetricCloud, check_subset


def _graph(U: Entourage) -> csr_matrix:
    return csr_matrix(U.relation.astype(np.int8))


def chain_components(U: Entourage) -> list[list[int]]:
    """Classes of the equivalence relation generated by U, each sorted, ordered by least member."""
    _, labels = connected_components(_graph(U), directed=False)
    classes: dict[int, list[int]] = {}
    for x, lab in enumerate(labels.tolist()):
        classes.setdefault(lab, []).append(x)
    return sorted(classes.values(), key=lambda c: c[0])


def chain_lengths(U: Entourage, sources: Iterable[int] | None = None) -> np.ndarray:
    """Minimal chain lengths (points counted) from each source to every point; ``inf`` if unreachable."""
    idx = None if sources is None else sorted(sources)
    if U.n == 0:
        return np.zeros((0, 0))
    steps = shortest_path(_graph(U), method="D", directed=False, unweighted=True, indices=idx)
    return np.atleast_2d(steps) + 1


def min_chain_length(U: Entourage, x: int, y: int) -> float:
    if not (0 <= x < U.n and 0 <= y < U.n):
        raise InputError(f"points ({x}, {y}) outside carrier of size {U.n}")
    d = chain_lengths(U, [x])[0, y]
    return math.inf if math.isinf(d) else int(d)


def hu_bound(B: Iterable[int], U: Entourage) -> float:
    """Least n joining every pair of B by a U-chain of at most n points through the whole carrier."""
    B = sorted(check_subset(B, U.n))
    if len(B) <= 1:
        return 1
    d = chain_lengths(U, B)[:, B].max()
    return math.inf if math.isinf(d) else int(d)


@dataclass
class ChainProfile:
    scale: float
    partition: list
    lengths: np.ndarray
    hu_bound: float

    @property
    def step_bound(self) -> float:
        return self.hu_bound - 1

    @property
    def connected(self) -> bool:
        return len(self.partition) <= 1

    def to_dict(self, with_lengths: bool = False) -> dict:
        out = {
            "scale": self.scale,
            "partition": self.partition,
            "components": len(self.partition),
            "hu_bound_points": _jsonable(self.hu_bound),
            "hu_bound_steps": _jsonable(self.step_bound),
        }
        if with_lengths:
            out["lengths"] = [[_jsonable(v) for v in row] for row in self.lengths.tolist()]
        return out


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return int(v)


@dataclass
class ConnectivityProfile:
    profiles: list
    chain_connected_at_all_rungs: bool
    bounded_in_itself_at_all_rungs: bool

    def to_dict(self, with_lengths: bool = False) -> dict:
        return {
            "chain_connected_at_all_rungs": self.chain_connected_at_all_rungs,
            "bounded_in_itself_at_all_rungs": self.bounded_in_itself_at_all_rungs,
            "rungs": [p.to_dict(with_lengths) for p in self.profiles],
        }


def chain_profile(U: Entourage, scale: float | None = None) -> ChainProfile:
    lengths = chain_lengths(U)
    bound = lengths.max() if lengths.size else 1
    bound = math.inf if math.isinf(bound) else int(bound)
    return ChainProfile(scale if scale is not None else U.scale, chain_components(U), lengths, bound)


def connectivity_profile(cloud: MetricCloud | None, ladder: EntourageLadder) -> ConnectivityProfile:
    """One profile per rung, plus the ladder-wide chain-connected / bounded flags."""
    profiles = [chain_profile(U, s) for s, U in zip(ladder.scales, ladder.entourages)]
    return ConnectivityProfile(
        profiles,
        all(p.connected for p in profiles),
        all(not math.isinf(p.hu_bound) for p in profiles),
    )
