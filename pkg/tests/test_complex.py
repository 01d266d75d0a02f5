from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from uvhom.complex import (
    cover_pair,
    cover_vietoris_complex,
    entourage_complex,
    entourage_pair,
    load_complex,
    vietoris_complex,
    vietoris_pair,
)
from uvhom.errors import InputError
from uvhom.generate import line
from uvhom.space import Cover, Entourage, MetricCloud, ball_cover, entourage_from_metric

RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
       (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]


def brute_vietoris(points, witnesses, R, max_dim):
    """Every vertex set tested directly against the witness list."""
    out = set()
    for k in range(1, max_dim + 2):
        for s in combinations(sorted(points), k):
            if any(all(R[a, w] for a in s) for w in witnesses):
                out.add(s)
    return out


def test_line_is_a_filled_triangle():
    U = entourage_from_metric(line(2), 1.0)
    cx = vietoris_complex(range(3), range(3), U.relation, max_dim=2)
    assert cx.f_vector() == (3, 3, 1)
    assert (0, 1, 2) in cx


def test_identity_relation_gives_vertices():
    cx = entourage_complex(Entourage.identity(5))
    assert cx.f_vector() == (5,)


def test_square_is_hollow_tetrahedron():
    square = MetricCloud.from_coords([[0, 0], [1, 0], [1, 1], [0, 1]])
    cx = entourage_complex(entourage_from_metric(square, 1.0), max_dim=3)
    # every corner sees both neighbours, none sees its opposite
    assert cx.f_vector() == (4, 6, 4)
    assert (0, 1, 2, 3) not in cx
    assert not cx.truncated


def test_pair_examples():
    U = entourage_from_metric(line(2), 1.0)
    empty = vietoris_pair(range(3), (), U, 2)
    assert len(empty.sub) == 0
    full = vietoris_pair(range(3), range(3), U, 2)
    assert full.sub == full.total
    p = vietoris_pair(range(3), {0, 1}, U, 2)
    assert p.total.f_vector() == (3, 3, 1)
    assert set(p.sub) == {(0,), (1,), (0, 1)}


def test_cover_complex_examples():
    assert cover_vietoris_complex(range(4), Cover.trivial(4), 3).f_vector() == (4, 6, 4, 1)
    assert cover_vietoris_complex(range(4), Cover.singletons(4)).f_vector() == (4,)
    bc = ball_cover(entourage_from_metric(line(2), 1.0))
    assert cover_vietoris_complex(range(3), bc, 2).f_vector() == (3, 3, 1)


def test_load_complex_examples():
    assert load_complex([[0, 1, 2]]).f_vector() == (3, 3, 1)
    assert len(load_complex([])) == 0
    assert load_complex(RP2).f_vector() == (6, 15, 10)


def test_maximal_simplices_round_trip():
    cx = load_complex(RP2 + [(6, 7)])
    assert cx.maximal_simplices() == sorted(RP2 + [(6, 7)])
    assert load_complex(cx.maximal_simplices()) == cx


def test_truncation_is_recorded():
    cx = entourage_complex(Entourage.complete(5), max_dim=2)
    assert cx.truncated
    assert cx.degree_computable(1) and not cx.degree_computable(2)
    # witness masks still decide membership above the cap
    assert cx.is_simplex(range(5))


def test_full_simplex_above_diameter():
    cloud = MetricCloud.from_coords(np.random.default_rng(0).normal(size=(6, 3)))
    cx = entourage_complex(entourage_from_metric(cloud, cloud.diameter()), max_dim=3)
    assert cx.f_vector() == (6, 15, 20, 15)


def test_restrict_matches_definitional_sub():
    cloud = MetricCloud.from_coords(np.random.default_rng(1).normal(size=(9, 2)))
    U = entourage_from_metric(cloud, 1.0)
    A = {0, 2, 3, 7}
    assert entourage_pair(U, A, 3).sub == vietoris_pair(range(9), A, U, 3).sub


def test_bad_input():
    with pytest.raises(InputError):
        load_complex([[0, -1]])
    with pytest.raises(InputError):
        vietoris_pair(range(3), {5}, Entourage.identity(3))


clouds = st.integers(2, 8).flatmap(
    lambda n: st.lists(st.floats(-3, 3, allow_nan=False), min_size=2 * n, max_size=2 * n)
    .map(lambda xs: MetricCloud.from_coords(np.array(xs).reshape(-1, 2))))


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.05, 4), st.integers(0, 3))
def test_matches_brute_force(cloud, eps, max_dim):
    U = entourage_from_metric(cloud, eps)
    cx = entourage_complex(U, max_dim)
    assert set(cx) == brute_vietoris(range(cloud.n), range(cloud.n), U.relation, max_dim)
    for s in cx:
        assert list(s) == sorted(s)
        assert all(f in cx for k in range(1, len(s)) for f in combinations(s, k))


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.05, 4), st.floats(0.05, 4))
def test_monotone_under_scale(cloud, a, b):
    lo, hi = sorted((a, b))
    small = entourage_complex(entourage_from_metric(cloud, lo), 3)
    big = entourage_complex(entourage_from_metric(cloud, hi), 3)
    assert small.is_subcomplex_of(big)
    bs, bb = ball_cover(entourage_from_metric(cloud, lo)), ball_cover(entourage_from_metric(cloud, hi))
    assert cover_vietoris_complex(range(cloud.n), bs).is_subcomplex_of(cover_vietoris_complex(range(cloud.n), bb))


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.05, 4), st.data())
def test_cover_and_entourage_complexes_agree(cloud, eps, data):
    U = entourage_from_metric(cloud, eps)
    A = data.draw(st.frozensets(st.integers(0, cloud.n - 1)))
    ep, cp = entourage_pair(U, A, 3), cover_pair(ball_cover(U), A, 3)
    assert ep.total == cp.total
    assert ep.sub == cp.sub


@settings(max_examples=100, deadline=None)
@given(clouds, st.floats(0.05, 4))
def test_construction_is_deterministic(cloud, eps):
    U = entourage_from_metric(cloud, eps)
    assert entourage_complex(U).simplices == entourage_complex(U).simplices
