"""Vietoris complexes and finite simplicial complexes.

``V(X, Y, R)`` has a simplex for every finite set of points of X that are all
R-related to one common witness in Y. We compute with the associated
simplicial complex on distinct vertices (no degenerate tuples).

Witness sets are kept as Python-int bitmasks, one per vertex, so a vertex set
is a simplex iff the AND of its masks is non-zero. The masks travel with the
complex; membership of sets above the construction cap stays decidable,
which the contiguity checker relies on.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError
from .space import Cover, Entourage, check_subset

DEFAULT_MAX_DIM = 3


@dataclass(frozen=True, eq=False)
class SimplicialComplex:
    """Downward-closed set of sorted vertex tuples, stored per dimension.

    ``truncated`` records that simplices of dimension ``max_dim + 1`` exist
    but were not built; homology needing them is refused, not reported as zero.
    """

    vertex_count: int
    simplices: tuple
    max_dim: int
    truncated: bool = False
    witness_masks: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "simplices", tuple(tuple(sorted(level)) for level in self.simplices))

    @cached_property
    def _lookup(self) -> frozenset:
        return frozenset(s for level in self.simplices for s in level)

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.simplices_trimmed() == other.simplices_trimmed()

    __hash__ = None

    def simplices_trimmed(self) -> tuple:
        levels = list(self.simplices)
        while levels and not levels[-1]:
            levels.pop()
        return tuple(levels)

    def __contains__(self, simplex) -> bool:
        return tuple(sorted(simplex)) in self._lookup

    def __iter__(self):
        for level in self.simplices:
            yield from level

    def __len__(self) -> int:
        return sum(len(level) for level in self.simplices)

    @property
    def dim(self) -> int:
        """Highest dimension with a stored simplex (-1 when empty)."""
        return len(self.simplices_trimmed()) - 1

    def level(self, p: int) -> tuple:
        return self.simplices[p] if 0 <= p < len(self.simplices) else ()

    def count(self, p: int) -> int:
        return len(self.level(p))

    def is_simplex(self, vertices: Iterable[int]) -> bool:
        """Membership of an arbitrary vertex set, including sets above the cap."""
        vs = tuple(sorted(set(vertices)))
        if not vs:
            return False
        if self.witness_masks is not None:
            if not all(0 <= v < self.vertex_count for v in vs):
                return False
            m = -1
            for v in vs:
                m &= self.witness_masks[v]
                if not m:
                    return False
            return True
        if len(vs) - 1 <= self.max_dim:
            return vs in self._lookup
        if self.truncated:
            raise InputError(f"membership of {vs} undecidable above the construction cap")
        return False

    def degree_computable(self, p: int) -> bool:
        """Whether every (p+1)-simplex is present, so H_p is exact."""
        return p >= 0 and (p + 1 <= self.max_dim or not self.truncated)

    def maximal_simplices(self) -> list[tuple]:
        out = []
        for p, level in enumerate(self.simplices):
            above = {f for s in self.level(p + 1) for f in combinations(s, p + 1)}
            out.extend(s for s in level if s not in above)
        return sorted(out)

    def restrict(self, subset: Iterable[int]) -> "SimplicialComplex":
        """Full subcomplex on ``subset`` (simplices whose vertices all lie in it)."""
        keep = frozenset(subset)
        masks = None
        if self.witness_masks is not None:
            masks = tuple(m if v in keep else 0 for v, m in enumerate(self.witness_masks))
        levels = tuple(tuple(s for s in level if keep.issuperset(s)) for level in self.simplices)
        truncated = self.truncated
        if truncated and masks is not None:
            truncated = _has_extension(levels[self.max_dim], masks, self.vertex_count)
        return SimplicialComplex(self.vertex_count, levels, self.max_dim, truncated, masks)

    def is_subcomplex_of(self, other: "SimplicialComplex") -> bool:
        return all(s in other for s in self)

    def f_vector(self) -> tuple:
        return tuple(len(level) for level in self.simplices_trimmed())


@dataclass(frozen=True, eq=False)
class SimplicialComplexPair:
    total: SimplicialComplex
    sub: SimplicialComplex

    def __post_init__(self):
        if self.total.vertex_count != self.sub.vertex_count:
            raise InputError("pair complexes must share a vertex set")
        if not self.sub.is_subcomplex_of(self.total):
            bad = next(s for s in self.sub if s not in self.total)
            raise InputError(f"sub simplex {bad} is not in the total complex")

    @classmethod
    def absolute(cls, cx: SimplicialComplex) -> "SimplicialComplexPair":
        return cls(cx, empty_complex(cx.vertex_count, cx.max_dim))

    def degree_computable(self, p: int) -> bool:
        return self.total.degree_computable(p) and self.sub.degree_computable(p)

    @property
    def vertex_count(self) -> int:
        return self.total.vertex_count


def empty_complex(vertex_count: int = 0, max_dim: int = 0) -> SimplicialComplex:
    return SimplicialComplex(vertex_count, tuple(() for _ in range(max_dim + 1)), max_dim, False,
                             tuple(0 for _ in range(vertex_count)))


def _has_extension(top_level, masks, n) -> bool:
    for s in top_level:
        m = -1
        for v in s:
            m &= masks[v]
        for v in range(s[-1] + 1, n):
            if m & masks[v]:
                return True
    return False


def _grow(points: Sequence[int], masks: list[int], vertex_count: int, max_dim: int) -> SimplicialComplex:
    pts = sorted(set(points))
    levels: list[list[tuple]] = [[(a,) for a in pts if masks[a]]]
    level_masks = [masks[a] for a in pts if masks[a]]
    live = [a for a in pts if masks[a]]
    # neighbours[a]: later vertices co-witnessed with a
    neighbours = {a: [b for b in live if b > a and masks[a] & masks[b]] for a in live}
    truncated = False
    for p in range(1, max_dim + 2):
        nxt, nxt_masks = [], []
        for s, m in zip(levels[-1], level_masks):
            for v in neighbours[s[-1]]:
                mv = m & masks[v]
                if mv:
                    if p == max_dim + 1:
                        truncated = True
                        break
                    nxt.append(s + (v,))
                    nxt_masks.append(mv)
            if truncated:
                break
        if p == max_dim + 1:
            break
        levels.append(nxt)
        level_masks = nxt_masks
    return SimplicialComplex(vertex_count, tuple(levels), max_dim, truncated, tuple(masks))


def vietoris_complex(points: Sequence[int], witnesses: Sequence[int], related,
                     max_dim: int = DEFAULT_MAX_DIM, vertex_count: int | None = None) -> SimplicialComplex:
    """Simplices: sets of ``points`` (dim <= max_dim) sharing a witness.

    ``related`` is either a boolean matrix indexed ``[point, witness]`` by
    global indices, or a callable ``related(a, b) -> bool``.
    """
    if max_dim < 0:
        raise InputError("max_dim must be non-negative")
    points = list(points)
    witnesses = list(witnesses)
    if vertex_count is None:
        vertex_count = max(points, default=-1) + 1
    masks = [0] * vertex_count
    if callable(related):
        rel = lambda a, b: related(a, b)
    else:
        R = np.asarray(related, dtype=bool)
        rel = lambda a, b: R[a, b]
    for a in points:
        m = 0
        for bit, b in enumerate(witnesses):
            if rel(a, b):
                m |= 1 << bit
        masks[a] = m
    return _grow(points, masks, vertex_count, max_dim)


def entourage_complex(U: Entourage, max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplex:
    """``X_U = V(X, X, U)``."""
    n = U.n
    masks = [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little") for row in U.relation]
    return _grow(range(n), masks, n, max_dim)


def vietoris_pair(points: Sequence[int], A: Iterable[int], U: Entourage,
                  max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplexPair:
    """``(X_U, A_U)`` with ``A_U = V(A, X, U ∩ (A × X))``."""
    points = list(points)
    A = check_subset(A, U.n)
    if not A <= set(points):
        raise InputError("A must be a subset of the points")
    total = vietoris_complex(points, points, U.relation, max_dim, vertex_count=U.n)
    sub = vietoris_complex(sorted(A), points, U.restrict_rows(A), max_dim, vertex_count=U.n)
    return SimplicialComplexPair(total, sub)


def entourage_pair(U: Entourage, A: Iterable[int] = (), max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplexPair:
    total = entourage_complex(U, max_dim)
    return SimplicialComplexPair(total, total.restrict(check_subset(A, U.n)))


def cover_vietoris_complex(points: Sequence[int], cov: Cover, max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplex:
    """``V(X, cov, ∈)``: sets of points lying together in some cover member."""
    points = list(points)
    members = cov.members
    return vietoris_complex(points, range(len(members)), lambda a, k: a in members[k], max_dim,
                            vertex_count=cov.n)


def cover_pair(cov: Cover, A: Iterable[int] = (), max_dim: int = DEFAULT_MAX_DIM) -> SimplicialComplexPair:
    """``(X_cov, A_cov)`` with ``A_cov = V(A, cov, ∈)``."""
    A = check_subset(A, cov.n)
    return SimplicialComplexPair(cover_vietoris_complex(range(cov.n), cov, max_dim),
                                 cover_vietoris_complex(sorted(A), cov, max_dim))


def load_complex(maximal_simplices: Iterable[Iterable[int]], vertex_count: int | None = None) -> SimplicialComplex:
    """Downward closure of the given simplices."""
    tops = []
    for s in maximal_simplices:
        vs = tuple(sorted(set(int(v) for v in s)))
        if any(v < 0 for v in vs):
            raise InputError(f"negative vertex index in {vs}")
        if vs:
            tops.append(vs)
    n = max((s[-1] for s in tops), default=-1) + 1
    if vertex_count is not None:
        if vertex_count < n:
            raise InputError(f"vertex index {n - 1} out of range for {vertex_count} vertices")
        n = vertex_count
    top_dim = max((len(s) - 1 for s in tops), default=0)
    levels = [set() for _ in range(top_dim + 1)]
    for s in tops:
        for k in range(1, len(s) + 1):
            levels[k - 1].update(combinations(s, k))
    return SimplicialComplex(n, tuple(levels), top_dim, False, None)
