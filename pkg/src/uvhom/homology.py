"""Simplicial homology of pairs over Z/2, Z/p and Z.

Over a field the boundary matrices are column-reduced (with clearing) and a
cycle is written in the homology basis by peeling off its top simplex against
two families of chains with distinct top indices: reduced boundary columns
and the kernel vectors of unpaired simplices. Over Z the kernel and the
boundary lattice are put in Smith normal form.

Simplices of each degree are indexed in lexicographic order of their sorted
vertex tuples; chains are dicts ``{index: coefficient}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .complex import SimplicialComplex, SimplicialComplexPair
from .errors import InputError, InvariantViolation, NotComputedError, NotSimplicialError
from .smith import matvec, smith_normal_form


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % k for k in range(2, int(p**0.5) + 1))


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: ``p == 0`` is Z, otherwise the prime field Z/p."""

    p: int = 2

    def __post_init__(self):
        if self.p < 0 or self.p == 1 or (self.p > 1 and not _is_prime(self.p)):
            raise InputError(f"coefficient modulus must be 0 (integers) or a prime, got {self.p}")

    @classmethod
    def parse(cls, text: "str | Ring") -> "Ring":
        if isinstance(text, Ring):
            return text
        t = str(text).strip().lower()
        if t == "z":
            return cls(0)
        if t == "z2":
            return cls(2)
        if t.startswith("zp:"):
            try:
                return cls(int(t[3:]))
            except ValueError:
                pass
        raise InputError(f"unknown ring {text!r} (expected z2, zp:P or z)")

    @property
    def is_field(self) -> bool:
        return self.p != 0

    def __str__(self) -> str:
        return "Z" if self.p == 0 else f"Z/{self.p}"

    @property
    def token(self) -> str:
        return "z" if self.p == 0 else ("z2" if self.p == 2 else f"zp:{self.p}")


Z2 = Ring(2)
Z = Ring(0)


@dataclass(frozen=True)
class Check:
    """Outcome of a checker: truthy iff ``ok``; ``witness`` explains a failure."""

    ok: bool
    witness: object = None
    detail: object = None

    def __bool__(self) -> bool:
        return bool(self.ok)


@dataclass(frozen=True)
class HomologyGroup:
    """One degree of homology.

    Over Z the generator list holds the free generators first, then one
    generator per torsion summand (in the order of ``torsion``).
    """

    degree: int
    ring: Ring
    betti: int
    torsion: tuple = ()
    generators: tuple = ()

    @property
    def rank(self) -> int:
        return self.betti + len(self.torsion)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "ring": str(self.ring),
            "betti": self.betti,
            "torsion": list(self.torsion),
            "generators": [[[list(s), c] for s, c in g] for g in self.generators],
        }


def permutation_sign(seq: Sequence[int]) -> int:
    sign = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# --- sparse column arithmetic over Z/p -------------------------------------

def _top(col: dict) -> int:
    return max(col)


def _axpy(dst: dict, a: int, src: Mapping[int, int], p: int) -> None:
    """dst += a * src (mod p), dropping zeros."""
    for k, v in src.items():
        x = (dst.get(k, 0) + a * v) % p
        if x:
            dst[k] = x
        else:
            dst.pop(k, None)


def _reduce_field(columns: list[dict], p: int, cleared: Iterable[int] = (), track: bool = False):
    """Standard column reduction. Returns ``(pivots, kernel)``.

    ``pivots`` maps a low row to its reduced column; ``kernel`` maps each
    column that reduced to zero (and is not in ``cleared``) to its V-column.
    """
    cleared = set(cleared)
    pivots: dict[int, dict] = {}
    pivot_v: dict[int, dict] = {}
    kernel: dict[int, dict] = {}
    for j, col in enumerate(columns):
        if j in cleared:
            continue
        r = dict(col)
        v = {j: 1} if track else None
        while r:
            low = _top(r)
            other = pivots.get(low)
            if other is None:
                break
            a = (-r[low] * pow(other[low], p - 2, p)) % p
            _axpy(r, a, other, p)
            if track:
                _axpy(v, a, pivot_v[low], p)
        if r:
            pivots[_top(r)] = r
            if track:
                pivot_v[_top(r)] = v
        elif track:
            kernel[j] = v
    return pivots, kernel


class ChainComplex:
    """Relative chain complex ``C(total) / C(sub)`` with cached reductions."""

    def __init__(self, pair: SimplicialComplexPair | SimplicialComplex, ring: Ring | str = Z2):
        if isinstance(pair, SimplicialComplex):
            pair = SimplicialComplexPair.absolute(pair)
        self.pair = pair
        self.ring = Ring.parse(ring)
        self._cache: dict = {}

    # -- bases and boundaries ------------------------------------------------
    def basis(self, p: int) -> tuple:
        key = ("basis", p)
        if key not in self._cache:
            sub = self.pair.sub
            self._cache[key] = tuple(s for s in self.pair.total.level(p) if s not in sub)
        return self._cache[key]

    def index(self, p: int) -> dict:
        key = ("index", p)
        if key not in self._cache:
            self._cache[key] = {s: i for i, s in enumerate(self.basis(p))}
        return self._cache[key]

    def boundary_columns(self, p: int) -> list[dict]:
        """Columns of the boundary map from degree p to p-1, coefficients in Z."""
        key = ("bd", p)
        if key not in self._cache:
            cols = []
            rows = self.index(p - 1) if p > 0 else {}
            for s in self.basis(p):
                col = {}
                if p > 0:
                    for i in range(len(s)):
                        face = s[:i] + s[i + 1:]
                        r = rows.get(face)
                        if r is not None:
                            col[r] = -1 if i % 2 else 1
                cols.append(col)
            self._cache[key] = cols
        return self._cache[key]

    def boundary_matrix(self, p: int) -> np.ndarray:
        """Dense boundary matrix (rows: (p-1)-simplices, columns: p-simplices), reduced mod p."""
        cols = self.boundary_columns(p)
        M = np.zeros((len(self.basis(p - 1)) if p > 0 else 0, len(cols)), dtype=np.int64)
        for j, col in enumerate(cols):
            for i, v in col.items():
                M[i, j] = v
        return M % self.ring.p if self.ring.is_field else M

    def chain_from_simplices(self, p: int, terms: Iterable[tuple[Sequence[int], int]]) -> dict:
        idx = self.index(p)
        chain: dict[int, int] = {}
        for s, c in terms:
            s = tuple(s)
            if s not in idx:
                raise InputError(f"{s} is not a relative {p}-simplex")
            chain[idx[s]] = chain.get(idx[s], 0) + c
        return self._normalise(chain)

    def _normalise(self, chain: dict) -> dict:
        if self.ring.is_field:
            q = self.ring.p
            return {k: v % q for k, v in chain.items() if v % q}
        return {k: v for k, v in chain.items() if v}

    def boundary(self, p: int, chain: Mapping[int, int]) -> dict:
        cols = self.boundary_columns(p)
        out: dict[int, int] = {}
        for j, c in chain.items():
            for i, v in cols[j].items():
                out[i] = out.get(i, 0) + c * v
        return self._normalise(out)

    def check_degree(self, p: int) -> None:
        if p < 0:
            raise InputError("homology degree must be non-negative")
        if not self.pair.degree_computable(p):
            raise NotComputedError(
                f"degree {p} not computed: complex was capped at dimension {self.pair.total.max_dim}"
            )

    # -- field homology --------------------------------------------------------
    def _field_pivots(self, p: int) -> dict:
        """Reduced boundary columns of degree p+1 keyed by their low (a p-simplex index)."""
        key = ("piv", p)
        if key not in self._cache:
            cols = [self._normalise(c) for c in self.boundary_columns(p + 1)]
            self._cache[key], _ = _reduce_field(cols, self.ring.p)
        return self._cache[key]

    def _field_basis(self, p: int) -> dict:
        key = ("hbasis", p)
        if key not in self._cache:
            piv = self._field_pivots(p)
            cols = [self._normalise(c) for c in self.boundary_columns(p)]
            _, kernel = _reduce_field(cols, self.ring.p, cleared=piv.keys(), track=True)
            gens = {j: v for j, v in sorted(kernel.items())}
            self._cache[key] = gens
        return self._cache[key]

    # -- integer homology --------------------------------------------------------
    def _int_data(self, p: int):
        key = ("zdata", p)
        if key not in self._cache:
            n_p = len(self.basis(p))
            n_lo = len(self.basis(p - 1)) if p > 0 else 0
            D = [[0] * n_p for _ in range(n_lo)]
            for j, col in enumerate(self.boundary_columns(p)):
                for i, v in col.items():
                    D[i][j] = v
            snf_p = smith_normal_form(D, n_lo, n_p)
            r = snf_p.rank
            # kernel basis = columns r.. of Q; coordinates via rows r.. of Q_inv
            up = self.boundary_columns(p + 1)
            n_up = len(up)
            k = n_p - r
            Dp = [[0] * n_up for _ in range(k)]
            Qi = snf_p.Q_inv
            for j, col in enumerate(up):
                y = _sparse_matvec(Qi, col)
                if any(y[:r]):
                    raise InvariantViolation("boundary is not a cycle (dd != 0)")
                for i in range(k):
                    Dp[i][j] = y[r + i]
            snf_b = smith_normal_form(Dp, k, n_up)
            diag = snf_b.diagonal + [0] * (k - len(snf_b.diagonal))
            s = snf_b.rank
            free = list(range(s, k))
            tors = [i for i in range(s) if diag[i] > 1]
            # new kernel basis K' = K @ P_inv
            K = [[snf_p.Q[row][r + i] for i in range(k)] for row in range(n_p)]
            order = free + tors
            gens = []
            for i in order:
                col = {row: sum(K[row][t] * snf_b.P_inv[t][i] for t in range(k)) for row in range(n_p)}
                gens.append({a: b for a, b in col.items() if b})
            self._cache[key] = {
                "r": r, "Qinv": snf_p.Q_inv, "P": snf_b.P, "order": order,
                "moduli": [0] * len(free) + [diag[i] for i in tors],
                "gens": gens, "torsion": tuple(diag[i] for i in tors), "betti": len(free),
            }
        return self._cache[key]

    # -- public ------------------------------------------------------------------
    def group(self, p: int) -> HomologyGroup:
        self.check_degree(p)
        key = ("group", p)
        if key not in self._cache:
            basis = self.basis(p)
            if self.ring.is_field:
                gens = self._field_basis(p)
                chains = list(gens.values())
                betti, torsion = len(chains), ()
            else:
                data = self._int_data(p)
                chains, betti, torsion = data["gens"], data["betti"], data["torsion"]
            generators = tuple(tuple((basis[i], c) for i, c in sorted(ch.items())) for ch in chains)
            self._cache[key] = HomologyGroup(p, self.ring, betti, torsion, generators)
        return self._cache[key]

    def generator_chains(self, p: int) -> list[dict]:
        self.check_degree(p)
        if self.ring.is_field:
            return list(self._field_basis(p).values())
        return list(self._int_data(p)["gens"])

    def moduli(self, p: int) -> list[int]:
        """Order of each homology coordinate: 0 for free (or field) coordinates, d for Z/d."""
        self.check_degree(p)
        if self.ring.is_field:
            return [0] * len(self._field_basis(p))
        return list(self._int_data(p)["moduli"])

    def coordinates(self, p: int, chain: Mapping[int, int]) -> list[int]:
        """Coordinates of the class of a relative cycle in the homology basis."""
        self.check_degree(p)
        if self.ring.is_field:
            return self._field_coordinates(p, chain)
        data = self._int_data(p)
        y = _sparse_matvec(data["Qinv"], chain)
        r = data["r"]
        if any(y[:r]):
            raise InvariantViolation("chain is not a cycle")
        z = matvec(data["P"], y[r:])
        out = []
        for i, mod in zip(data["order"], data["moduli"]):
            out.append(z[i] % mod if mod else z[i])
        return out

    def _field_coordinates(self, p: int, chain: Mapping[int, int]) -> list[int]:
        q = self.ring.p
        piv = self._field_pivots(p)
        gens = self._field_basis(p)
        slot = {j: k for k, j in enumerate(gens)}
        coords = [0] * len(gens)
        c = self._normalise(dict(chain))
        while c:
            t = _top(c)
            a = c[t]
            if t in piv:
                col = piv[t]
                _axpy(c, (-a * pow(col[t], q - 2, q)) % q, col, q)
            elif t in slot:
                coords[slot[t]] = (coords[slot[t]] + a) % q
                _axpy(c, (-a) % q, gens[t], q)
            else:
                raise InvariantViolation(f"chain is not a relative {p}-cycle")
        return coords

    def is_boundary(self, p: int, chain: Mapping[int, int]) -> bool:
        return not any(self.coordinates(p, chain))


def _sparse_matvec(A, x: Mapping[int, int]) -> list[int]:
    return [sum(row[i] * v for i, v in x.items()) for row in A]


def homology(cx: SimplicialComplex | SimplicialComplexPair, degree: int, ring: Ring | str = Z2) -> HomologyGroup:
    return ChainComplex(cx, ring).group(degree)


def relative_homology(pair: SimplicialComplexPair, degree: int, ring: Ring | str = Z2) -> HomologyGroup:
    return ChainComplex(pair, ring).group(degree)


# --- simplicial maps ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SimplicialMapChecked:
    """A vertex map certified to send simplices to simplices (and sub into sub)."""

    vertex_map: tuple
    source: SimplicialComplexPair
    target: SimplicialComplexPair

    def __call__(self, v: int) -> int:
        return self.vertex_map[v]

    def compose_after(self, first: "SimplicialMapChecked") -> "SimplicialMapChecked":
        """``self ∘ first``."""
        vm = tuple(self.vertex_map[first.vertex_map[v]] for v in range(len(first.vertex_map)))
        return check_simplicial(vm, first.source, self.target)


def _as_table(vertex_map, n: int) -> tuple:
    if callable(vertex_map):
        return tuple(int(vertex_map(v)) for v in range(n))
    if isinstance(vertex_map, Mapping):
        try:
            return tuple(int(vertex_map[v]) for v in range(n))
        except KeyError as e:
            raise InputError(f"vertex map undefined at {e.args[0]}") from None
    table = tuple(int(v) for v in vertex_map)
    if len(table) < n:
        raise InputError(f"vertex map covers {len(table)} of {n} vertices")
    return table


def check_simplicial(vertex_map, source: SimplicialComplexPair, target: SimplicialComplexPair) -> SimplicialMapChecked:
    """Certify ``vertex_map`` as a simplicial map of pairs or raise with the offending simplex."""
    table = _as_table(vertex_map, source.vertex_count)
    for s in source.total:
        img = [table[v] for v in s]
        if not target.total.is_simplex(img):
            raise NotSimplicialError(s, img, "total")
    for s in source.sub:
        img = [table[v] for v in s]
        if not target.sub.is_simplex(img):
            raise NotSimplicialError(s, img, "sub")
    return SimplicialMapChecked(table, source, target)


def push_chain(fmap: SimplicialMapChecked, p: int, chain: Mapping[int, int],
               source: ChainComplex, target: ChainComplex) -> dict:
    """Chain map induced by a simplicial map; collapsing simplices go to zero."""
    out: dict[int, int] = {}
    basis = source.basis(p)
    tidx = target.index(p)
    tsub = target.pair.sub
    for j, c in chain.items():
        img = [fmap.vertex_map[v] for v in basis[j]]
        if len(set(img)) < len(img):
            continue
        s = tuple(sorted(img))
        k = tidx.get(s)
        if k is None:
            if s in tsub:
                continue
            raise InvariantViolation(f"image {s} missing from target complex")
        out[k] = out.get(k, 0) + c * permutation_sign(img)
    return target._normalise(out)


def induced_map(fmap: SimplicialMapChecked, degree: int, ring: Ring | str = Z2,
                source: ChainComplex | None = None, target: ChainComplex | None = None) -> np.ndarray:
    """Matrix of ``H_degree(f)`` in the stored generator bases (columns: source generators)."""
    ring = Ring.parse(ring)
    source = source or ChainComplex(fmap.source, ring)
    target = target or ChainComplex(fmap.target, ring)
    if source.ring != ring or target.ring != ring:
        raise InvariantViolation("chain complexes carry a different ring")
    if source.pair is not fmap.source or target.pair is not fmap.target:
        raise InvariantViolation("chain complexes do not match the map's pairs")
    gens = source.generator_chains(degree)
    rows = len(target.moduli(degree))
    M = np.zeros((rows, len(gens)), dtype=np.int64)
    for j, g in enumerate(gens):
        M[:, j] = target.coordinates(degree, push_chain(fmap, degree, g, source, target))
    return M


def reduce_matrix(M: np.ndarray, ring: Ring, moduli: Sequence[int] | None = None) -> np.ndarray:
    """Canonical representative of a homology matrix (entries mod p, torsion rows mod d)."""
    M = np.array(M, dtype=np.int64)
    if ring.is_field:
        return M % ring.p
    if moduli is not None:
        for i, d in enumerate(moduli):
            if d:
                M[i] %= d
    return M


def compose_matrices(second: np.ndarray, first: np.ndarray, ring: Ring,
                     moduli: Sequence[int] | None = None) -> np.ndarray:
    return reduce_matrix(np.asarray(second, dtype=np.int64) @ np.asarray(first, dtype=np.int64), ring, moduli)


def contiguity_check(f: SimplicialMapChecked, g: SimplicialMapChecked):
    """Whether ``f(σ) ∪ g(σ)`` is a target simplex for every source simplex.

    On failure the witness is ``(where, simplex)`` with ``where`` in {"total", "sub"}.
    """
    if f.source is not g.source or f.target is not g.target:
        if not (f.source.total == g.source.total and f.target.total == g.target.total):
            raise InputError("contiguity needs maps between the same pairs")
    for where, src, tgt in (("total", f.source.total, f.target.total), ("sub", f.source.sub, f.target.sub)):
        for s in src:
            union = {f.vertex_map[v] for v in s} | {g.vertex_map[v] for v in s}
            if not tgt.is_simplex(union):
                return Check(False, (where, s))
    return Check(True)


def rank_mod_p(M: np.ndarray, p: int) -> int:
    """Rank over Z/p by Gaussian elimination."""
    A = np.array(M, dtype=np.int64) % p
    rows, cols = A.shape
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if A[i, c]), None)
        if piv is None:
            continue
        A[[r, piv]] = A[[piv, r]]
        A[r] = (A[r] * pow(int(A[r, c]), p - 2, p)) % p
        for i in range(rows):
            if i != r and A[i, c]:
                A[i] = (A[i] - A[i, c] * A[r]) % p
        r += 1
        if r == rows:
            break
    return r


def rank_rational(M: np.ndarray) -> int:
    """Rank over Q via Smith normal form (exact)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    return smith_normal_form(M.tolist()).rank
