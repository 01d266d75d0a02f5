"""Finite models of uniform spaces.

A uniform space is modelled by a finite point set together with a finite,
descending chain of entourages (an :class:`EntourageLadder`). Every statement
of the form "for all entourages" becomes "for all ladder rungs".
Carriers are always the index set ``0..n-1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError

Subset = frozenset

# Relative slack on the closed comparison d <= eps, so that scales computed in
# closed form (chord lengths) keep the ties they are meant to have.
TIE_RTOL = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MetricCloud:
    """Finite point set with a distance matrix.

    Build with :meth:`from_coords` or :meth:`from_matrix`; when coordinates
    are present the matrix is always their Euclidean distance matrix.
    """

    distances: np.ndarray
    coords: np.ndarray | None = None

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise InputError("distances must be finite and non-negative")
        if not np.allclose(d, d.T, rtol=0, atol=1e-9):
            raise InputError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0):
            raise InputError("distance matrix must have zero diagonal")
        object.__setattr__(self, "distances", _readonly((d + d.T) / 2))
        if self.coords is not None:
            object.__setattr__(self, "coords", _readonly(np.asarray(self.coords, dtype=float)))

    @classmethod
    def from_coords(cls, coords) -> "MetricCloud":
        c = np.asarray(coords, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        if c.ndim != 2:
            raise InputError("coordinates must be a 2-d array (points x dims)")
        if not np.all(np.isfinite(c)):
            raise InputError("coordinates must be finite")
        return cls(cdist(c, c), c)

    @classmethod
    def from_matrix(cls, matrix) -> "MetricCloud":
        return cls(np.asarray(matrix, dtype=float))

    @property
    def n(self) -> int:
        return self.distances.shape[0]

    @property
    def points(self) -> range:
        return range(self.n)

    def diameter(self) -> float:
        return float(self.distances.max()) if self.n else 0.0

    def min_gap(self) -> float:
        """Smallest positive pairwise distance (``inf`` for fewer than two distinct points)."""
        d = self.distances[self.distances > 0]
        return float(d.min()) if d.size else math.inf

    def covering_radius(self, subset: Iterable[int]) -> float:
        """Largest distance from a point of the cloud to its nearest point of ``subset``."""
        idx = sorted(subset)
        if not idx:
            return math.inf
        return float(self.distances[:, idx].min(axis=1).max())

    def subcloud(self, indices: Sequence[int]) -> "MetricCloud":
        idx = list(indices)
        coords = None if self.coords is None else self.coords[idx]
        return MetricCloud(self.distances[np.ix_(idx, idx)], coords)


@dataclass(frozen=True, eq=False)
class Entourage:
    """Reflexive symmetric relation on ``0..n-1`` stored as a dense boolean matrix."""

    relation: np.ndarray
    scale: float | None = None

    def __post_init__(self):
        r = np.asarray(self.relation, dtype=bool)
        if r.ndim != 2 or r.shape[0] != r.shape[1]:
            raise InputError("entourage relation must be a square matrix")
        if not r.diagonal().all():
            raise InputError("entourage is not reflexive")
        if not np.array_equal(r, r.T):
            raise InputError("entourage is not symmetric")
        object.__setattr__(self, "relation", _readonly(r))

    @classmethod
    def identity(cls, n: int) -> "Entourage":
        return cls(np.eye(n, dtype=bool))

    @classmethod
    def complete(cls, n: int) -> "Entourage":
        return cls(np.ones((n, n), dtype=bool))

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]]) -> "Entourage":
        """Reflexive symmetric closure of ``pairs``."""
        r = np.eye(n, dtype=bool)
        for i, j in pairs:
            if not (0 <= i < n and 0 <= j < n):
                raise InputError(f"pair ({i}, {j}) out of range for {n} points")
            r[i, j] = r[j, i] = True
        return cls(r)

    @property
    def n(self) -> int:
        return self.relation.shape[0]

    def __eq__(self, other):
        return isinstance(other, Entourage) and np.array_equal(self.relation, other.relation)

    __hash__ = None

    def __contains__(self, pair) -> bool:
        i, j = pair
        return bool(self.relation[i, j])

    def ball(self, x: int) -> frozenset:
        return ball(self, x)

    def issubset(self, other: "Entourage") -> bool:
        return self.n == other.n and not np.any(self.relation & ~other.relation)

    def compose(self, other: "Entourage") -> "Entourage":
        """Relational composite: ``(x, z)`` whenever ``(x, y)`` in self and ``(y, z)`` in other."""
        prod = self.relation.astype(np.int64) @ other.relation.astype(np.int64)
        return Entourage(prod > 0)

    def restrict_rows(self, subset: Iterable[int]) -> np.ndarray:
        """The relation ``U ∩ (A × X)`` as a boolean mask."""
        mask = np.zeros(self.n, dtype=bool)
        mask[list(subset)] = True
        return self.relation & mask[:, None]


def entourage_from_metric(cloud: MetricCloud, eps: float) -> Entourage:
    """Closed metric entourage ``{(x, y) : d(x, y) <= eps}`` (ties up to ``TIE_RTOL``)."""
    if not isinstance(eps, (int, float, np.integer, np.floating)) or not math.isfinite(eps) or eps <= 0:
        raise InputError(f"scale must be a finite positive real, got {eps!r}")
    return Entourage(cloud.distances <= eps * (1 + TIE_RTOL), float(eps))


def ball(U: Entourage, x: int) -> frozenset:
    if not 0 <= x < U.n:
        raise InputError(f"point {x} outside carrier of size {U.n}")
    return frozenset(np.flatnonzero(U.relation[x]).tolist())


@dataclass(frozen=True)
class EntourageLadder:
    """Descending chain of entourages, coarsest first.

    ``scales[k]`` labels ``entourages[k]``; scales strictly decrease with k.
    """

    scales: tuple
    entourages: tuple

    def __post_init__(self):
        object.__setattr__(self, "scales", tuple(float(s) for s in self.scales))
        object.__setattr__(self, "entourages", tuple(self.entourages))
        if not self.scales:
            raise InputError("a ladder needs at least one rung")
        if len(self.scales) != len(self.entourages):
            raise InputError("one entourage per scale required")
        if any(a <= b for a, b in zip(self.scales, self.scales[1:])):
            raise InputError(f"ladder scales must strictly decrease: {self.scales}")
        n = self.entourages[0].n
        for k, (coarse, fine) in enumerate(zip(self.entourages, self.entourages[1:])):
            if fine.n != n:
                raise InputError("all rungs must share a carrier")
            if not fine.issubset(coarse):
                raise InputError(f"rung {k + 1} is not contained in rung {k}")

    @classmethod
    def from_metric(cls, cloud: MetricCloud, scales: Iterable[float]) -> "EntourageLadder":
        scales = sorted({float(s) for s in scales}, reverse=True)
        return cls(tuple(scales), tuple(entourage_from_metric(cloud, s) for s in scales))

    @classmethod
    def geometric(cls, cloud: MetricCloud, start: float | None = None, ratio: float = 0.8,
                  count: int = 12) -> "EntourageLadder":
        """``start, start*ratio, ...``; default start is ``ratio * diameter``."""
        if not 0 < ratio < 1 or count < 1:
            raise InputError("geometric ladder needs 0 < ratio < 1 and count >= 1")
        if start is None:
            start = ratio * cloud.diameter()
        return cls.from_metric(cloud, geometric_scales(start, ratio, count))

    @property
    def n(self) -> int:
        return self.entourages[0].n

    def __len__(self) -> int:
        return len(self.scales)

    def __getitem__(self, k: int) -> Entourage:
        return self.entourages[k]

    def index_of(self, scale: float) -> int:
        for k, s in enumerate(self.scales):
            if math.isclose(s, scale, rel_tol=1e-12, abs_tol=0):
                return k
        raise InputError(f"scale {scale} is not a rung of this ladder")


def geometric_scales(start: float, ratio: float, count: int) -> list[float]:
    if not (math.isfinite(start) and start > 0):
        raise InputError("ladder start must be positive")
    return [start * ratio**k for k in range(count)]


@dataclass(frozen=True)
class Cover:
    """Canonical cover of ``0..n-1``: non-empty members, duplicates dropped, sorted."""

    n: int
    members: tuple = field(default=())

    def __post_init__(self):
        ms = {frozenset(int(v) for v in m) for m in self.members}
        if frozenset() in ms:
            raise InputError("cover members must be non-empty")
        union = frozenset().union(*ms) if ms else frozenset()
        if union != frozenset(range(self.n)):
            missing = sorted(set(range(self.n)) - union)
            extra = sorted(union - set(range(self.n)))
            raise InputError(f"not a cover of {self.n} points (missing {missing}, foreign {extra})")
        object.__setattr__(self, "members", tuple(sorted(ms, key=lambda m: sorted(m))))

    @classmethod
    def singletons(cls, n: int) -> "Cover":
        return cls(n, [{i} for i in range(n)])

    @classmethod
    def trivial(cls, n: int) -> "Cover":
        return cls(n, [range(n)])

    def as_lists(self) -> list[list[int]]:
        return [sorted(m) for m in self.members]


def _same_carrier(*covers: Cover) -> None:
    if len({c.n for c in covers}) > 1:
        raise InputError("covers live on different carriers")


def is_refinement(coarse: Cover, fine: Cover) -> bool:
    """True iff every member of ``fine`` lies inside some member of ``coarse``."""
    _same_carrier(coarse, fine)
    return all(any(v <= u for u in coarse.members) for v in fine.members)


def join_cover(u: Cover, v: Cover) -> Cover:
    """Common refinement by pairwise intersections, keeping only the maximal ones.

    Dropping members nested in other members leaves a cover equivalent under
    refinement, and makes ``join_cover(u, u) == u`` for covers without nesting.
    """
    _same_carrier(u, v)
    meets = {a & b for a in u.members for b in v.members if a & b}
    return Cover(u.n, [m for m in meets if not any(m < o for o in meets)])


def ball_cover(U: Entourage) -> Cover:
    return Cover(U.n, [ball(U, x) for x in range(U.n)])


def is_uniform_cover(cov: Cover, U: Entourage) -> bool:
    """Whether the U-balls refine ``cov`` (so ``cov`` is witnessed uniform by U)."""
    return is_refinement(cov, ball_cover(U))


def star(A: Iterable[int], cov: Cover) -> frozenset:
    A = frozenset(A)
    return frozenset().union(*(m for m in cov.members if m & A))


def is_star_refinement(coarse: Cover, fine: Cover) -> bool:
    _same_carrier(coarse, fine)
    stars = [star(v, fine) for v in fine.members]
    return all(any(s <= u for u in coarse.members) for s in stars)


def is_normal_ladder(covers: Sequence[Cover]) -> bool:
    """Finite-prefix check: each cover is star-refined by the next one."""
    if not covers:
        raise InputError("need at least one cover")
    _same_carrier(*covers)
    return all(is_star_refinement(a, b) for a, b in zip(covers, covers[1:]))


def strong_containment_rung(A: Iterable[int], B: Iterable[int], ladder: EntourageLadder) -> int | None:
    """Index of the coarsest rung whose ball cover stars ``A`` inside ``B``."""
    A, B = frozenset(A), frozenset(B)
    for k, U in enumerate(ladder.entourages):
        if star(A, ball_cover(U)) <= B:
            return k
    return None


def strong_containment(A: Iterable[int], B: Iterable[int], ladder: EntourageLadder) -> float | None:
    """Largest ladder scale at which ``A`` is strongly contained in ``B``, else None."""
    k = strong_containment_rung(A, B, ladder)
    return None if k is None else ladder.scales[k]


def check_subset(subset: Iterable[int], n: int) -> frozenset:
    s = frozenset(int(i) for i in subset)
    bad = sorted(i for i in s if not 0 <= i < n)
    if bad:
        raise InputError(f"subset indices {bad} outside carrier of size {n}")
    return s
