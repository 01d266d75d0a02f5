"""Sample clouds for classical spaces."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import InputError
from .space import MetricCloud


def _count(n, name="n", minimum=1) -> int:
    if isinstance(n, bool) or int(n) != n or n < minimum:
        raise InputError(f"{name} must be an integer >= {minimum}, got {n!r}")
    return int(n)


def circle(n: int, radius: float = 1.0) -> MetricCloud:
    """n equally spaced points on a circle (a regular n-gon of side 2 r sin(pi/n))."""
    n = _count(n)
    t = 2 * np.pi * np.arange(n) / n
    return MetricCloud.from_coords(radius * np.column_stack([np.cos(t), np.sin(t)]))


def farey_fractions(N: int, closed: bool = False) -> list[Fraction]:
    """Reduced fractions p/q in [0, 1) with q <= N (plus 1 when ``closed``)."""
    N = _count(N, "N")
    fr = {Fraction(p, q) for q in range(1, N + 1) for p in range(q + (1 if closed else 0))}
    return sorted(fr)


def rational_circle(N: int) -> MetricCloud:
    """Points at angles 2*pi*p/q on the unit circle for every reduced p/q with q <= N."""
    t = np.array([2 * np.pi * float(f) for f in farey_fractions(N)])
    return MetricCloud.from_coords(np.column_stack([np.cos(t), np.sin(t)]))


def interval(n: int) -> MetricCloud:
    """n equally spaced points on [0, 1]."""
    n = _count(n)
    return MetricCloud.from_coords(np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(1))


def rational_interval(N: int) -> MetricCloud:
    """Reduced fractions in [0, 1] with denominator at most N."""
    return MetricCloud.from_coords(np.array([float(f) for f in farey_fractions(N, closed=True)]))


def discrete(n: int) -> MetricCloud:
    """n points, all pairwise distances 1."""
    n = _count(n)
    return MetricCloud.from_matrix(np.ones((n, n)) - np.eye(n))


def line(n: int, step: float = 1.0) -> MetricCloud:
    """The n+1 points 0, step, ..., n*step."""
    n = _count(n, minimum=0)
    if not step > 0:
        raise InputError("step must be positive")
    return MetricCloud.from_coords(step * np.arange(n + 1, dtype=float))


def torus(n: int, m: int) -> MetricCloud:
    """n x m grid on the flat torus R^2/Z^2 with the quotient metric."""
    n, m = _count(n), _count(m, "m")
    g = np.array([(i / n, j / m) for i in range(n) for j in range(m)])
    d = np.abs(g[:, None, :] - g[None, :, :])
    d = np.minimum(d, 1 - d)
    return MetricCloud.from_matrix(np.sqrt((d**2).sum(-1)))


def subsample(cloud: MetricCloud, k: int, seed: int = 0) -> list[int]:
    """Sorted random subset of k point indices."""
    k = _count(k, "k")
    if k > cloud.n:
        raise InputError(f"cannot draw {k} of {cloud.n} points")
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(cloud.n, size=k, replace=False).tolist())


def nearest_point_map(cloud: MetricCloud, targets: list[int]) -> list[int]:
    """For each point, the position in ``targets`` of its nearest target (lowest on ties)."""
    d = cloud.distances[:, targets]
    return np.argmin(d, axis=1).tolist()


GENERATORS = {
    "circle": (circle, ("n",)),
    "rational_circle": (rational_circle, ("N",)),
    "interval": (interval, ("n",)),
    "rational_interval": (rational_interval, ("N",)),
    "discrete": (discrete, ("n",)),
    "torus": (torus, ("n", "m")),
    "line": (line, ("n", "step")),
}


def generate(kind: str, seed: int | None = None, **params) -> MetricCloud:
    """Build a named cloud; ``seed`` is accepted for interface uniformity (all kinds are deterministic)."""
    if kind not in GENERATORS:
        raise InputError(f"unknown space kind {kind!r}; choose from {sorted(GENERATORS)}")
    fn, names = GENERATORS[kind]
    unknown = set(params) - set(names)
    if unknown:
        raise InputError(f"{kind} does not take {sorted(unknown)}")
    return fn(**params)


def chord(n: int, k: int = 1, radius: float = 1.0) -> float:
    """Distance between points k steps apart on circle(n)."""
    return 2 * radius * math.sin(math.pi * k / n)


def circle_covering_radius(cloud: MetricCloud) -> float:
    """Chordal covering radius of a unit-circle sample within the whole circle (half its widest gap)."""
    if cloud.coords is None or cloud.coords.shape[1] != 2:
        raise InputError("need planar coordinates on the unit circle")
    t = np.sort(np.mod(np.arctan2(cloud.coords[:, 1], cloud.coords[:, 0]), 2 * np.pi))
    gaps = np.diff(np.append(t, t[0] + 2 * np.pi))
    return float(2 * np.sin(gaps.max() / 4))
