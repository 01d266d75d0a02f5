"""Independent reference computations used by the test suite."""
from itertools import combinations

import numpy as np
from hypothesis import strategies as st

from uvhom.complex import SimplicialComplexPair, load_complex

RP2 = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 1, 5),
       (1, 2, 4), (2, 3, 5), (1, 3, 4), (2, 4, 5), (1, 3, 5)]


def _span(vectors):
    """All Z/2 combinations of bitmask vectors, by exhaustive enumeration."""
    span = {0}
    for v in vectors:
        span |= {s ^ v for s in span}
    return span


def _boundary_mask(s, index):
    m = 0
    for f in combinations(s, len(s) - 1):
        m |= 1 << index[f]
    return m


def brute_betti_z2(simplices, degree):
    """dim ker d_p - dim im d_{p+1} over Z/2 from explicit kernel and image sets."""
    levels = {}
    for s in simplices:
        levels.setdefault(len(s) - 1, []).append(tuple(sorted(s)))
    cp = sorted(levels.get(degree, []))
    if not cp:
        return 0
    index_p = {s: i for i, s in enumerate(cp)}
    below = {s: i for i, s in enumerate(sorted(levels.get(degree - 1, [])))}
    cols = [_boundary_mask(s, below) if degree else 0 for s in cp]
    kernel = 0
    for bits in range(1 << len(cp)):
        acc = 0
        for i in range(len(cp)):
            if bits >> i & 1:
                acc ^= cols[i]
        kernel += acc == 0
    image = _span(_boundary_mask(s, index_p) for s in levels.get(degree + 1, []))
    return int(np.log2(kernel)) - int(np.log2(len(image)))


def all_complexes(n_vertices):
    """Every downward-closed family of non-empty subsets of range(n_vertices)."""
    cands = [s for k in range(1, n_vertices + 1) for s in combinations(range(n_vertices), k)]

    def rec(i, chosen):
        if i == len(cands):
            yield list(chosen)
            return
        yield from rec(i + 1, chosen)
        s = cands[i]
        if len(s) == 1 or all(f in chosen for f in combinations(s, len(s) - 1)):
            chosen.add(s)
            yield from rec(i + 1, chosen)
            chosen.discard(s)

    yield from rec(0, set())


@st.composite
def complexes(draw, max_vertices=6, max_dim=3):
    """Random downward closure of a few random simplices."""
    n = draw(st.integers(1, max_vertices))
    tops = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=1, max_size=max_dim + 1, unique=True),
                         min_size=1, max_size=8))
    return load_complex(tops, vertex_count=n)


def random_map_chain(rng):
    """K -> L -> M with L, M closures of the images plus noise, so both maps are simplicial."""
    nk, nl, nm = rng.randint(2, 6), rng.randint(2, 6), rng.randint(2, 6)
    K = [rng.sample(range(nk), rng.randint(1, min(3, nk))) for _ in range(rng.randint(1, 6))]
    f = [rng.randrange(nl) for _ in range(nk)]
    g = [rng.randrange(nm) for _ in range(nl)]
    L = [[f[v] for v in s] for s in K] + [rng.sample(range(nl), rng.randint(1, min(3, nl))) for _ in range(3)]
    M = [[g[v] for v in s] for s in L] + [rng.sample(range(nm), rng.randint(1, min(3, nm))) for _ in range(3)]
    cK, cL, cM = (SimplicialComplexPair.absolute(load_complex(x, n)) for x, n in ((K, nk), (L, nl), (M, nm)))
    return cK, cL, cM, f, g


def random_contiguous_instance(rng):
    """A target built to contain f(s) ∪ g(s) for a random pair of vertex maps."""
    ns, nt = rng.randint(2, 6), rng.randint(2, 7)
    S = [rng.sample(range(ns), rng.randint(1, min(3, ns))) for _ in range(rng.randint(1, 5))]
    f = [rng.randrange(nt) for _ in range(ns)]
    g = [f[v] if rng.random() < 0.5 else rng.randrange(nt) for v in range(ns)]
    T = [sorted({f[v] for v in s} | {g[v] for v in s}) for s in S]
    T += [rng.sample(range(nt), rng.randint(1, min(3, nt))) for _ in range(rng.randint(0, 4))]
    src, tgt = SimplicialComplexPair.absolute(load_complex(S, ns)), SimplicialComplexPair.absolute(load_complex(T, nt))
    return src, tgt, f, g
