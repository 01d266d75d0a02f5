"""V-continuity, uniform V-homotopies and the scale-wise induced map f_V."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import entourage_pair
from .errors import InputError, InvariantViolation, LadderTooSparse, NotSimplicialError
from .homology import (
    ChainComplex,
    Check,
    Ring,
    check_simplicial,
    compose_matrices,
    contiguity_check,
    induced_map,
)
from .space import Entourage, EntourageLadder, MetricCloud, check_subset, entourage_from_metric


@dataclass(frozen=True, eq=False)
class ScaledMap:
    """Vertex function between two clouds, as a map of pairs ``(X, A) -> (Y, B)``."""

    images: tuple
    source: MetricCloud
    target: MetricCloud
    source_ladder: EntourageLadder | None = None
    target_ladder: EntourageLadder | None = None
    source_sub: frozenset = frozenset()
    target_sub: frozenset = frozenset()

    def __post_init__(self):
        images = tuple(int(y) for y in self.images)
        if len(images) != self.source.n:
            raise InputError(f"map defines {len(images)} images for {self.source.n} source points")
        if any(not 0 <= y < self.target.n for y in images):
            raise InputError("map image outside the target cloud")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "source_sub", check_subset(self.source_sub, self.source.n))
        object.__setattr__(self, "target_sub", check_subset(self.target_sub, self.target.n))
        stray = sorted(a for a in self.source_sub if images[a] not in self.target_sub)
        if stray:
            raise InputError(f"points {stray} of the source subset leave the target subset")

    def __call__(self, x: int) -> int:
        return self.images[x]

    def with_images(self, images: Sequence[int]) -> "ScaledMap":
        return ScaledMap(tuple(images), self.source, self.target, self.source_ladder,
                         self.target_ladder, self.source_sub, self.target_sub)

    def then(self, other: "ScaledMap") -> "ScaledMap":
        """``other ∘ self``."""
        return ScaledMap(tuple(other.images[y] for y in self.images), self.source, other.target,
                         self.source_ladder, other.target_ladder, self.source_sub, other.target_sub)


def identity_map(cloud: MetricCloud, ladder: EntourageLadder | None = None, sub=frozenset()) -> ScaledMap:
    return ScaledMap(tuple(range(cloud.n)), cloud, cloud, ladder, ladder, sub, sub)


def is_V_continuous(f: ScaledMap, U: Entourage, V: Entourage, uniform: bool = True) -> Check:
    """Check ``f(U[x]) ⊆ V[f(x)]``.

    Uniform: one verdict for all x, witness ``((x, y), (f(x), f(y)))`` for the
    lexicographically first pair in U whose image leaves V. Otherwise
    ``detail`` lists, per point, whether the inclusion holds there.
    """
    img = np.asarray(f.images)
    bad = U.relation & ~V.relation[np.ix_(img, img)]
    if uniform:
        hits = np.argwhere(bad)
        if len(hits):
            x, y = map(int, hits[0])
            return Check(False, ((x, y), (f.images[x], f.images[y])))
        return Check(True)
    per_point = tuple(not row.any() for row in bad)
    first = next((x for x, ok in enumerate(per_point) if not ok), None)
    return Check(all(per_point), first, per_point)


def check_uniform_V_homotopy(steps: Sequence[ScaledMap], U: Entourage, V: Entourage) -> Check:
    """Shared-modulus uniform V-homotopy check.

    Every step must satisfy ``h(U[x]) ⊆ V[h(x)]`` and consecutive steps must
    be V-close pointwise. ``detail`` is the first failing index.
    """
    if not steps:
        raise InputError("a homotopy needs at least one step")
    n = steps[0].source.n
    for i, h in enumerate(steps):
        if h.source.n != n or h.target.n != steps[0].target.n:
            raise InputError("homotopy steps must share source and target")
        c = is_V_continuous(h, U, V)
        if not c:
            return Check(False, ("continuity", c.witness), i)
        if i + 1 < len(steps):
            nxt = steps[i + 1]
            close = V.relation[np.asarray(h.images), np.asarray(nxt.images)]
            if not close.all():
                x = int(np.flatnonzero(~close)[0])
                return Check(False, ("adjacency", x, (h.images[x], nxt.images[x])), i)
    return Check(True)


def splice(h: Sequence[ScaledMap], k: Sequence[ScaledMap]) -> list[ScaledMap]:
    """Concatenate a homotopy ``h`` (f ~ f') with ``k`` (g ~ g') into one for ``g f ~ g' f'``.

    Step i is ``k_0 h_i`` for ``i <= m`` and ``k_{i-m} h_m`` afterwards.
    """
    m = len(h) - 1
    out = [hi.then(k[0]) for hi in h]
    out += [h[m].then(kj) for kj in k[1:]]
    return out


def _target_entourage(f: ScaledMap, scale: float) -> Entourage:
    if f.target_ladder is not None:
        for s, U in zip(f.target_ladder.scales, f.target_ladder.entourages):
            if np.isclose(s, scale, rtol=1e-12, atol=0):
                return U
    return entourage_from_metric(f.target, scale)


@dataclass
class InducedReport:
    """``f_V`` at one target scale: the chosen source rung and the matrix of H(f) there."""

    degree: int
    ring: Ring
    target_scale: float
    rung: int
    source_scale: float
    matrix: np.ndarray
    finer_rung_agrees: bool | None

    def to_dict(self) -> dict:
        return {
            "degree": self.degree, "ring": str(self.ring), "target_scale": self.target_scale,
            "rung": self.rung, "source_scale": self.source_scale, "matrix": self.matrix.tolist(),
            "finer_rung_agrees": self.finer_rung_agrees,
        }


def _modulus_rungs(f: ScaledMap, target_pair, max_dim: int):
    """Source rungs, coarse to fine, at which f is simplicial into ``target_pair``."""
    for k, U in enumerate(f.source_ladder.entourages):
        pair = entourage_pair(U, f.source_sub, max_dim)
        try:
            yield k, check_simplicial(f.images, pair, target_pair)
        except NotSimplicialError:
            continue


def induced_f_V(f: ScaledMap, V_scale: float, ring="z2", degree: int = 1,
                max_dim: int | None = None) -> InducedReport:
    """Matrix of ``H(f)`` from the coarsest admissible source rung into ``(Y_V, B_V)``.

    The choice is cross-checked at the next finer rung through the bonding map.
    """
    ring = Ring.parse(ring)
    if f.source_ladder is None:
        raise InputError("induced_f_V needs a source ladder")
    max_dim = degree + 1 if max_dim is None else max_dim
    V = _target_entourage(f, V_scale)
    tpair = entourage_pair(V, f.target_sub, max_dim)
    tcc = ChainComplex(tpair, ring)
    found = next(_modulus_rungs(f, tpair, max_dim), None)
    if found is None:
        raise LadderTooSparse("modulus not found at available scales")
    k, fm = found
    scc = ChainComplex(fm.source, ring)
    M = induced_map(fm, degree, ring, scc, tcc)
    agrees = None
    if k + 1 < len(f.source_ladder):
        finer = entourage_pair(f.source_ladder[k + 1], f.source_sub, max_dim)
        fcc = ChainComplex(finer, ring)
        fm2 = check_simplicial(f.images, finer, tpair)
        bond = check_simplicial(range(f.source.n), finer, fm.source)
        B = induced_map(bond, degree, ring, fcc, scc)
        via = compose_matrices(M, B, ring, tcc.moduli(degree))
        agrees = bool(np.array_equal(induced_map(fm2, degree, ring, fcc, tcc), via))
    return InducedReport(degree, ring, float(V_scale), k, f.source_ladder.scales[k], M, agrees)


def sqrt_rung(ladder: EntourageLadder, V: Entourage) -> int | None:
    """Coarsest rung W of ``ladder`` with ``W∘W ⊆ V``."""
    for k, W in enumerate(ladder.entourages):
        if W.compose(W).issubset(V):
            return k
    return None


@dataclass
class HomotopyVerdict:
    ok: bool
    stages: list = field(default_factory=list)
    sqrt_scale: float | None = None
    source_scale: float | None = None
    matrices: dict = field(default_factory=dict)

    def stage(self, name: str, ok: bool, witness=None, **extra):
        self.stages.append({"stage": name, "ok": bool(ok), "witness": witness, **extra})
        if not ok:
            self.ok = False
        return ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok, "stages": self.stages, "sqrt_scale": self.sqrt_scale,
            "source_scale": self.source_scale,
            "matrices": {str(d): {k: m.tolist() for k, m in ms.items()} for d, ms in self.matrices.items()},
        }


def homotopy_axiom_check(f: ScaledMap, g: ScaledMap, homotopy: Sequence[ScaledMap], V_scale: float,
                         ring="z2", degrees: Iterable[int] = (0, 1), max_dim: int | None = None) -> HomotopyVerdict:
    """Run the contiguity route from a uniform √V-homotopy to ``f_V = g_V``.

    Stages: adjacency (steps √V-close), modulus (one source rung making every
    step uniformly √V-continuous), simplicial (every step into ``(Y_V, B_V)``),
    contiguity (adjacent steps), induced (equal matrices in each degree).
    The verdict stops at the first failing stage.
    """
    ring = Ring.parse(ring)
    degrees = sorted(set(degrees))
    max_dim = (max(degrees) + 1) if max_dim is None else max_dim
    steps = list(homotopy) if homotopy else [f, g]
    if steps[0].images != f.images or steps[-1].images != g.images:
        raise InputError("homotopy endpoints must be f and g")
    if f.target_ladder is None or f.source_ladder is None:
        raise InputError("homotopy check needs source and target ladders")
    V = _target_entourage(f, V_scale)
    r = sqrt_rung(f.target_ladder, V)
    if r is None:
        raise LadderTooSparse(f"ladder too sparse: no rung squares into V at scale {V_scale}")
    W = f.target_ladder[r]
    verdict = HomotopyVerdict(True, sqrt_scale=f.target_ladder.scales[r])

    bad = None
    for i in range(len(steps) - 1):
        close = W.relation[np.asarray(steps[i].images), np.asarray(steps[i + 1].images)]
        if not close.all():
            x = int(np.flatnonzero(~close)[0])
            bad = {"step": i, "point": x, "images": [steps[i].images[x], steps[i + 1].images[x]]}
            break
    if not verdict.stage("adjacency", bad is None, bad):
        return verdict

    chosen = None
    last = None
    for k, U in enumerate(f.source_ladder.entourages):
        res = check_uniform_V_homotopy(steps, U, W)
        if res:
            chosen = k
            break
        last = {"rung": k, "step": res.detail, "witness": res.witness}
    if not verdict.stage("modulus", chosen is not None, None if chosen is not None else last):
        return verdict
    verdict.source_scale = f.source_ladder.scales[chosen]

    spair = entourage_pair(f.source_ladder[chosen], f.source_sub, max_dim)
    tpair = entourage_pair(V, f.target_sub, max_dim)
    maps = []
    for i, h in enumerate(steps):
        try:
            maps.append(check_simplicial(h.images, spair, tpair))
        except NotSimplicialError as e:
            verdict.stage("simplicial", False, {"step": i, "simplex": list(e.simplex), "where": e.where})
            return verdict
    verdict.stage("simplicial", True)

    for i in range(len(maps) - 1):
        c = contiguity_check(maps[i], maps[i + 1])
        if not c:
            verdict.stage("contiguity", False, {"step": i, "where": c.witness[0], "simplex": list(c.witness[1])})
            return verdict
    verdict.stage("contiguity", True)

    scc, tcc = ChainComplex(spair, ring), ChainComplex(tpair, ring)
    for d in degrees:
        mats = [induced_map(m, d, ring, scc, tcc) for m in maps]
        verdict.matrices[d] = {"f": mats[0], "g": mats[-1]}
        if not all(np.array_equal(mats[0], M) for M in mats[1:]):
            raise InvariantViolation(f"contiguous steps induced different maps in degree {d}")
    verdict.stage("induced", True)
    return verdict


def interpolating_homotopy(f: ScaledMap, g: ScaledMap, n_steps: int) -> list[ScaledMap]:
    """Helper, not a checker: straight-line interpolation in target coordinates,
    snapped to the nearest target point (lowest index on ties)."""
    if f.target.coords is None:
        raise InputError("interpolation needs target coordinates")
    Y = f.target.coords
    a, b = Y[list(f.images)], Y[list(g.images)]
    out = [f]
    for i in range(1, n_steps):
        t = i / n_steps
        pts = (1 - t) * a + t * b
        d = ((pts[:, None, :] - Y[None, :, :]) ** 2).sum(-1)
        out.append(f.with_images(np.argmin(d, axis=1).tolist()))
    out.append(g)
    return out
