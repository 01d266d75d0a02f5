"""Named experiments: each builds its inputs, runs the checks and grades expectations.

A bundle is a plain dict (JSON-ready) with the sub-reports, one entry per
expected property and a top-level ``passed`` flag. Nothing time- or
host-dependent goes into a bundle, so a fixed spec gives identical bytes.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

from . import generate as gen
from .connect import connectivity_profile, hu_bound
from .errors import InputError
from .homology import Ring
from .homotopy import homotopy_axiom_check, identity_map, induced_f_V
from .space import EntourageLadder, MetricCloud, entourage_from_metric, geometric_scales
from .tower import build_tower, excision_verify, persistent_rank, plateau_estimate

STABILITY_FACTOR = 4.0


@dataclass(frozen=True)
class LadderSpec:
    """Explicit scales, or a geometric run ``start, start*ratio, ...`` (start defaults to ratio*diameter)."""

    scales: tuple | None = None
    start: float | None = None
    ratio: float = 0.8
    count: int = 12

    def __post_init__(self):
        if self.scales is not None:
            s = tuple(float(x) for x in self.scales)
            if not s or any(not (math.isfinite(x) and x > 0) for x in s):
                raise InputError("ladder scales must be positive and finite")
            if any(a <= b for a, b in zip(s, s[1:])):
                raise InputError(f"ladder scales must strictly decrease: {s}")
            object.__setattr__(self, "scales", s)
        elif not 0 < self.ratio < 1 or int(self.count) != self.count or self.count < 1:
            raise InputError("geometric ladder needs 0 < ratio < 1 and a positive integer count")

    @classmethod
    def parse(cls, text: str) -> "LadderSpec":
        """``"s0:ratio:count"`` with any field blank for its default, e.g. ``":0.8:12"``."""
        parts = text.split(":")
        if len(parts) != 3:
            raise InputError(f"ladder spec must be start:ratio:count, got {text!r}")
        try:
            start = float(parts[0]) if parts[0] else None
            ratio = float(parts[1]) if parts[1] else 0.8
            count = int(parts[2]) if parts[2] else 12
        except ValueError:
            raise InputError(f"bad ladder spec {text!r}") from None
        return cls(start=start, ratio=ratio, count=count)

    @classmethod
    def from_list(cls, text: str) -> "LadderSpec":
        try:
            return cls(scales=tuple(float(t) for t in text.split(",") if t.strip()))
        except ValueError:
            raise InputError(f"bad scale list {text!r}") from None

    def resolve(self, cloud: MetricCloud) -> list[float]:
        if self.scales is not None:
            return list(self.scales)
        # a one-point cloud has diameter 0; fall back to unit scale
        start = self.ratio * (cloud.diameter() or 1.0) if self.start is None else self.start
        return geometric_scales(start, self.ratio, self.count)

    def ladder(self, cloud: MetricCloud) -> EntourageLadder:
        return EntourageLadder.from_metric(cloud, self.resolve(cloud))


@dataclass
class ExperimentSpec:
    name: str
    generator: str | None = None
    params: dict = field(default_factory=dict)
    ladder: LadderSpec = field(default_factory=LadderSpec)
    ring: str = "z2"
    max_dim: int = 2
    degrees: tuple = (0, 1)
    seed: int = 0

    def __post_init__(self):
        if self.name not in EXPERIMENTS:
            raise InputError(f"unknown experiment {self.name!r}; choose from {sorted(EXPERIMENTS)}")
        Ring.parse(self.ring)
        if self.max_dim < 1:
            raise InputError("max_dim must be at least 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ladder"] = {k: v for k, v in asdict(self.ladder).items() if v is not None}
        return d


class _Grader:
    def __init__(self):
        self.items = []

    def expect(self, name: str, ok: bool, **detail) -> bool:
        self.items.append({"name": name, "ok": bool(ok), **detail})
        return bool(ok)

    @property
    def passed(self) -> bool:
        return all(i["ok"] for i in self.items)


def _cloud(spec: ExperimentSpec, kind: str, **defaults) -> MetricCloud:
    params = {**defaults, **spec.params}
    return gen.generate(spec.generator or kind, seed=spec.seed, **params)


def _best_plateau(tower, degree):
    ps = plateau_estimate(tower, degree)
    return max(ps, key=lambda p: (p.length, -p.start_rung), default=None)


def _window_rank(tower, degree, plateau) -> int:
    return persistent_rank(tower, degree, plateau.end_rung, plateau.start_rung)


def _tower_summary(tower, degrees) -> dict:
    return {str(d): {"betti": tower.betti(d),
                     "bond_ranks": [persistent_rank(tower, d, k + 1, k) for k in range(len(tower) - 1)]}
            for d in degrees}


def circle_h1(spec: ExperimentSpec, g: _Grader) -> dict:
    cloud = _cloud(spec, "circle", n=60)
    tower = build_tower(cloud, (), spec.ladder.ladder(cloud), spec.max_dim, spec.ring, (0, 1))
    p1 = _best_plateau(tower, 1)
    g.expect("degree-1 plateau exists", p1 is not None)
    if p1 is not None:
        g.expect("degree-1 stable rank is 1", p1.rank == 1 and _window_rank(tower, 1, p1) == 1, rank=p1.rank)
        g.expect("plateau spans at least 3 rungs", p1.length >= 3, rungs=p1.length)
        same = all(b == 1 for b in tower.betti(0)[p1.start_rung:p1.end_rung + 1]) and \
            _window_rank(tower, 0, p1) == 1
        g.expect("degree-0 stable rank 1 on the same window", same)
    return {"tower": tower.to_dict(), "plateau": None if p1 is None else p1.to_dict()}


def _agreement(t1, t2, degrees, threshold, bonds=True):
    rungs = [k for k, s in enumerate(t1.ladder.scales) if s > threshold]
    mismatches = []
    for d in degrees:
        b1, b2 = t1.betti(d), t2.betti(d)
        mismatches += [{"degree": d, "rung": k, "betti": [b1[k], b2[k]]} for k in rungs if b1[k] != b2[k]]
        if bonds:
            for k in rungs:
                if k + 1 in rungs:
                    r1, r2 = persistent_rank(t1, d, k + 1, k), persistent_rank(t2, d, k + 1, k)
                    if r1 != r2:
                        mismatches.append({"degree": d, "bond": [k + 1, k], "ranks": [r1, r2]})
    return rungs, mismatches


def rational_circle(spec: ExperimentSpec, g: _Grader) -> dict:
    N = spec.params.get("N", 12)
    rat = gen.rational_circle(N)
    uni = gen.circle(rat.n)
    scales = spec.ladder.resolve(uni)
    t_rat = build_tower(rat, (), EntourageLadder.from_metric(rat, scales), spec.max_dim, spec.ring, (0, 1))
    t_uni = build_tower(uni, (), EntourageLadder.from_metric(uni, scales), spec.max_dim, spec.ring, (0, 1))
    delta = gen.circle_covering_radius(rat)
    threshold = STABILITY_FACTOR * delta
    p_rat, p_uni = _best_plateau(t_rat, 1), _best_plateau(t_uni, 1)
    g.expect("rational sample has a degree-1 plateau of rank 1", p_rat is not None and p_rat.rank == 1)
    g.expect("uniform sample has a degree-1 plateau of rank 1", p_uni is not None and p_uni.rank == 1)
    rungs, mism = _agreement(t_rat, t_uni, (0, 1), threshold, bonds=False)
    g.expect("towers agree above the stability threshold", bool(rungs) and not mism,
             rungs=rungs, mismatches=mism)
    return {"points": rat.n, "covering_radius": delta, "threshold": threshold,
            "rational": _tower_summary(t_rat, (0, 1)), "uniform": _tower_summary(t_uni, (0, 1)),
            "plateaus": {"rational": p_rat and p_rat.to_dict(), "uniform": p_uni and p_uni.to_dict()}}


def sampling_stability(spec: ExperimentSpec, g: _Grader) -> dict:
    n, k = spec.params.get("n", 100), spec.params.get("k", 50)
    cloud = gen.circle(n)
    idx = gen.subsample(cloud, k, spec.seed)
    sub = cloud.subcloud(idx)
    scales = spec.ladder.resolve(cloud)
    t_full = build_tower(cloud, (), EntourageLadder.from_metric(cloud, scales), spec.max_dim, spec.ring, (0, 1))
    t_sub = build_tower(sub, (), EntourageLadder.from_metric(sub, scales), spec.max_dim, spec.ring, (0, 1))
    delta = cloud.covering_radius(idx)
    threshold = STABILITY_FACTOR * delta
    rungs, mism = _agreement(t_full, t_sub, (0, 1), threshold)
    g.expect("betti and bonding ranks agree above the stability threshold", bool(rungs) and not mism,
             rungs=rungs, mismatches=mism)
    return {"subsample": idx, "covering_radius": delta, "threshold": threshold,
            "full": _tower_summary(t_full, (0, 1)), "sub": _tower_summary(t_sub, (0, 1))}


def hexagon_rotation_steps(cloud: MetricCloud, ladder: EntourageLadder):
    """Identity to rotation-by-one the long way round: rot0, rot-1, ..., rot-5 = rot1."""
    n = cloud.n
    f = identity_map(cloud, ladder)
    return [f.with_images([(x - i) % n for x in range(n)]) for i in range(n)]


def homotopy_axiom(spec: ExperimentSpec, g: _Grader) -> dict:
    hexagon = gen.circle(6)
    s = gen.chord(6)
    ladder = EntourageLadder.from_metric(hexagon, [s, 0.4 * s])
    steps = hexagon_rotation_steps(hexagon, ladder)
    verdict = homotopy_axiom_check(steps[0], steps[-1], steps, 2 * s, spec.ring, (0, 1))
    g.expect("hexagon: contiguous chain found", verdict.ok)
    g.expect("hexagon: square-root rung is the edge length", verdict.sqrt_scale is not None
             and math.isclose(verdict.sqrt_scale, s), sqrt_scale=verdict.sqrt_scale)
    eq = verdict.ok and all((m["f"] == m["g"]).all() for m in verdict.matrices.values())
    g.expect("hexagon: f_V equals g_V", eq)
    rot = induced_f_V(steps[-1], s, spec.ring, 1)
    g.expect("hexagon: rotation induces the identity at the edge scale", rot.matrix.tolist() == [[1]])

    # a finer polygon where the target scale still sees the loop
    n = 24
    poly = gen.circle(n)
    lad = EntourageLadder.from_metric(poly, [gen.chord(n, k) for k in (8, 6, 4, 3, 2, 1)])
    f = identity_map(poly, lad)
    rot1 = f.with_images([(x + 1) % n for x in range(n)])
    v24 = homotopy_axiom_check(f, rot1, [], gen.chord(n, 4), spec.ring, (0, 1))
    nontriv = v24.ok and v24.matrices[1]["f"].tolist() == [[1]] == v24.matrices[1]["g"].tolist()
    g.expect("24-gon: identity and rotation induce the same nonzero degree-1 map", nontriv)
    return {"hexagon": verdict.to_dict(), "hexagon_rotation_f_V": rot.to_dict(), "polygon24": v24.to_dict()}


def arc_decomposition(n: int = 40, collar: int = 2):
    """Two overlapping half-circle arcs of circle(n), each padded by ``collar`` points."""
    half = n // 2
    A = sorted({x % n for x in range(-collar, half + collar)})
    B = sorted({x % n for x in range(half - collar, n + collar)})
    return A, B


def excision_ladder(n: int = 40) -> EntourageLadder:
    cloud = gen.circle(n)
    return EntourageLadder.from_metric(cloud, [gen.chord(n, k) for k in (5, 4, 3, 2, 1)] + [0.5 * gen.chord(n)])


def excision(spec: ExperimentSpec, g: _Grader) -> dict:
    n = spec.params.get("n", 40)
    cloud = gen.circle(n)
    A, B = arc_decomposition(n, spec.params.get("collar", 2))
    ladder = excision_ladder(n)
    out = {"A": A, "B": B}
    for ring in ("z2", "z"):
        v = excision_verify(cloud, A, B, ladder, max_dim=2, ring=ring, degrees=(0, 1))
        g.expect(f"all stages pass over {Ring.parse(ring)}", v.ok)
        out[ring] = v.to_dict()
    return out


def discrete_additivity(spec: ExperimentSpec, g: _Grader) -> dict:
    out = {}
    for n in spec.params.get("sizes", (1, 5, 25)):
        cloud = gen.discrete(n)
        scales = [s for s in spec.ladder.resolve(cloud) if s < 1] or [0.5]
        tower = build_tower(cloud, (), EntourageLadder.from_metric(cloud, scales), 1, spec.ring, (0,))
        b0 = tower.betti(0)
        g.expect(f"discrete({n}): degree-0 betti {n} below scale 1", all(b == n for b in b0), betti=b0)
        out[str(n)] = {"scales": scales, "betti0": b0}
    return out


def line_boundedness(spec: ExperimentSpec, g: _Grader) -> dict:
    sizes = spec.params.get("sizes", (5, 10, 50))
    bounds = []
    for n in sizes:
        cloud = gen.line(n)
        U = entourage_from_metric(cloud, 1.0)
        b = hu_bound(range(cloud.n), U)
        g.expect(f"line({n}): Hu bound is {n + 1}", b == n + 1, bound=b)
        bounds.append(b)
    g.expect("Hu bound strictly increases with n", all(a < b for a, b in zip(bounds, bounds[1:])))
    prof = connectivity_profile(gen.line(sizes[0]), EntourageLadder.from_metric(gen.line(sizes[0]), [2.0, 1.0, 0.5]))
    return {"sizes": list(sizes), "hu_bounds": bounds, "profile": prof.to_dict()}


def interval_contractible(spec: ExperimentSpec, g: _Grader) -> dict:
    cloud = _cloud(spec, "interval", n=50)
    tower = build_tower(cloud, (), spec.ladder.ladder(cloud), spec.max_dim, spec.ring, (0, 1))
    b1 = tower.betti(1)
    g.expect("degree-1 betti 0 at every rung", all(b == 0 for b in b1), betti=b1)
    return {"tower": tower.to_dict()}


EXPERIMENTS: dict[str, Callable] = {
    "circle_h1": circle_h1,
    "rational_circle": rational_circle,
    "sampling_stability": sampling_stability,
    "homotopy_axiom": homotopy_axiom,
    "excision": excision,
    "discrete_additivity": discrete_additivity,
    "line_boundedness": line_boundedness,
    "interval_contractible": interval_contractible,
}


def run_experiment(spec: ExperimentSpec) -> dict:
    g = _Grader()
    try:
        reports = EXPERIMENTS[spec.name](spec, g)
    except InputError as e:
        raise type(e)(f"experiment {spec.name}: {e}") from e
    return {"experiment": spec.name, "spec": spec.to_dict(), "reports": reports,
            "expectations": g.items, "passed": g.passed}
