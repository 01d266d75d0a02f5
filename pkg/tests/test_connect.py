import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uvhom.connect import (
    chain_components,
    chain_profile,
    connectivity_profile,
    hu_bound,
    min_chain_length,
)
from uvhom.errors import InputError
from uvhom.generate import circle, line
from uvhom.space import Entourage, EntourageLadder, MetricCloud, entourage_from_metric


def bfs_points(U, x, y):
    """Chain length in points by plain breadth-first search."""
    seen = {x: 1}
    q = deque([x])
    while q:
        a = q.popleft()
        for b in np.flatnonzero(U.relation[a]):
            b = int(b)
            if b not in seen:
                seen[b] = seen[a] + 1
                q.append(b)
    return seen.get(y, math.inf)


@pytest.fixture
def gapped():
    return MetricCloud.from_coords([0.0, 1.0, 2.0, 10.0])


def test_component_examples(gapped):
    assert chain_components(Entourage.identity(4)) == [[0], [1], [2], [3]]
    assert chain_components(Entourage.complete(4)) == [[0, 1, 2, 3]]
    assert chain_components(entourage_from_metric(gapped, 1.5)) == [[0, 1, 2], [3]]


def test_chain_length_examples(gapped):
    U = entourage_from_metric(line(10), 1.0)
    assert min_chain_length(U, 4, 4) == 1
    assert min_chain_length(U, 0, 10) == 11
    assert min_chain_length(entourage_from_metric(gapped, 1.5), 0, 3) == math.inf
    with pytest.raises(InputError):
        min_chain_length(U, 0, 11)


def test_hu_bound_examples(gapped):
    U = entourage_from_metric(line(10), 1.0)
    assert hu_bound({3}, U) == 1
    assert hu_bound({0, 10}, U) == 11
    assert hu_bound({0, 3}, entourage_from_metric(gapped, 1.5)) == math.inf


@pytest.mark.parametrize("n", [5, 10, 50])
def test_integer_line_bound(n):
    assert hu_bound(range(n + 1), entourage_from_metric(line(n), 1.0)) == n + 1
    assert chain_profile(entourage_from_metric(line(n), 1.0)).step_bound == n


def test_single_point_profile():
    cloud = MetricCloud.from_coords([[0.0, 0.0]])
    prof = connectivity_profile(cloud, EntourageLadder.from_metric(cloud, [1.0, 0.5]))
    assert prof.chain_connected_at_all_rungs
    assert all(p.hu_bound == 1 for p in prof.profiles)


def test_circle_profile_grows_as_scale_shrinks():
    cloud = circle(60)
    gap = cloud.min_gap()
    ladder = EntourageLadder.geometric(cloud, start=1.6, count=12)
    prof = connectivity_profile(cloud, ladder)
    above = [p for p in prof.profiles if p.scale >= gap]
    assert all(p.connected and math.isfinite(p.hu_bound) for p in above)
    bounds = [p.hu_bound for p in above]
    assert bounds == sorted(bounds) and bounds[-1] > bounds[0]
    d = prof.to_dict(with_lengths=False)
    assert "lengths" not in d["rungs"][0] and d["rungs"][0]["hu_bound_steps"] == bounds[0] - 1


clouds = st.integers(1, 10).flatmap(
    lambda n: st.lists(st.floats(0, 10, allow_nan=False), min_size=n, max_size=n)
    .map(lambda xs: MetricCloud.from_coords(np.array(xs))))


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.1, 4), st.data())
def test_lengths_match_bfs_and_components(cloud, eps, data):
    U = entourage_from_metric(cloud, eps)
    x = data.draw(st.integers(0, cloud.n - 1))
    y = data.draw(st.integers(0, cloud.n - 1))
    d = min_chain_length(U, x, y)
    assert d == bfs_points(U, x, y)
    same = any(x in c and y in c for c in chain_components(U))
    assert math.isfinite(d) == same


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.1, 4), st.floats(0.1, 4), st.data())
def test_monotone_in_scale(cloud, a, b, data):
    lo, hi = sorted((a, b))
    Ulo, Uhi = entourage_from_metric(cloud, lo), entourage_from_metric(cloud, hi)
    coarse = chain_components(Uhi)
    for c in chain_components(Ulo):
        assert any(set(c) <= set(k) for k in coarse)
    B = data.draw(st.frozensets(st.integers(0, cloud.n - 1), min_size=1))
    assert hu_bound(B, Uhi) <= hu_bound(B, Ulo)
    x, y = data.draw(st.integers(0, cloud.n - 1)), data.draw(st.integers(0, cloud.n - 1))
    assert min_chain_length(Uhi, x, y) <= min_chain_length(Ulo, x, y)


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.1, 4))
def test_bound_is_max_pairwise_length(cloud, eps):
    U = entourage_from_metric(cloud, eps)
    pairwise = max(min_chain_length(U, x, y) for x in range(cloud.n) for y in range(cloud.n))
    assert hu_bound(range(cloud.n), U) == pairwise
