"""Homology towers over entourage ladders, plateaus, excision and resolution checks.

A tower is the finite truncation of the inverse system ``H(X_U, A_U)`` along
a ladder. Nothing here computes the inverse limit itself; persistent ranks
and plateau windows are its finite-ladder shadow.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import DEFAULT_MAX_DIM, SimplicialComplexPair, cover_pair, entourage_pair
from .errors import InputError, NotComputedError, NotSimplicialError
from .homology import (
    ChainComplex,
    HomologyGroup,
    Ring,
    check_simplicial,
    compose_matrices,
    induced_map,
    rank_mod_p,
    rank_rational,
)
from .smith import smith_normal_form
from .space import (
    EntourageLadder,
    MetricCloud,
    ball_cover,
    check_subset,
    is_refinement,
    star,
    strong_containment_rung,
    Cover,
)


class TorsionCaveat(UserWarning):
    """Integer persistent rank ignores torsion present in the groups involved."""


@dataclass
class HomologyTower:
    ladder: EntourageLadder
    subset: frozenset
    ring: Ring
    max_dim: int
    degrees: tuple
    pairs: list
    chains: list
    groups: dict
    bonds: dict
    capped: list

    def __len__(self) -> int:
        return len(self.ladder)

    def betti(self, degree: int) -> list:
        return [None if g is None else g.betti for g in self.groups[degree]]

    def group(self, degree: int, rung: int) -> HomologyGroup:
        g = self.groups.get(degree, [None] * len(self))[rung]
        if g is None:
            raise NotComputedError(f"degree {degree} not computed at rung {rung}")
        return g

    def composite(self, degree: int, finer: int, coarser: int) -> np.ndarray:
        """Bonding map from rung ``finer`` to rung ``coarser`` as a product of adjacent maps."""
        if finer < coarser:
            raise InputError("the finer rung must have the larger index")
        size = len(self.chains[finer].moduli(degree)) if self.groups[degree][finer] else None
        if size is None:
            raise NotComputedError(f"degree {degree} not computed at rung {finer}")
        M = np.eye(size, dtype=np.int64)
        for k in range(finer - 1, coarser - 1, -1):
            B = self.bonds[degree][k]
            if B is None:
                raise NotComputedError(f"bonding map {k + 1}->{k} not computed in degree {degree}")
            M = compose_matrices(B, M, self.ring, self.chains[k].moduli(degree))
        return M

    def direct_bond(self, degree: int, finer: int, coarser: int) -> np.ndarray:
        """Bonding map computed straight from the inclusion, without passing through middle rungs."""
        n = self.ladder.n
        inc = check_simplicial(range(n), self.pairs[finer], self.pairs[coarser])
        return induced_map(inc, degree, self.ring, self.chains[finer], self.chains[coarser])

    def to_dict(self, plateaus: bool = True) -> dict:
        rungs = []
        for k, s in enumerate(self.ladder.scales):
            entry = {"rung": k, "scale": s, "capped": self.capped[k],
                     "f_vector": list(self.pairs[k].total.f_vector()), "degrees": {}}
            for d in self.degrees:
                g = self.groups[d][k]
                entry["degrees"][str(d)] = "not computed" if g is None else {
                    "betti": g.betti, "torsion": list(g.torsion)}
            rungs.append(entry)
        out = {
            "ring": str(self.ring), "max_dim": self.max_dim, "subset": sorted(self.subset),
            "rungs": rungs,
            "bonding_maps": {str(d): [None if B is None else B.tolist() for B in self.bonds[d]]
                             for d in self.degrees},
        }
        if plateaus and len(self) >= 2:
            out["plateaus"] = {}
            for d in self.degrees:
                try:
                    out["plateaus"][str(d)] = [p.to_dict() for p in plateau_estimate(self, d)]
                except NotComputedError:
                    out["plateaus"][str(d)] = "not computed"
        return out

    def csv_rows(self) -> list[tuple]:
        return [(s, d, g.betti) for d in self.degrees
                for s, g in zip(self.ladder.scales, self.groups[d]) if g is not None]


def build_tower(cloud: MetricCloud | None, A: Iterable[int], ladder: EntourageLadder,
                max_dim: int = DEFAULT_MAX_DIM, ring="z2", degrees: Iterable[int] | None = None,
                cover_based: bool = False) -> HomologyTower:
    """Complexes, homology and adjacent bonding maps for every rung.

    With ``cover_based`` the complexes are ``V(X, cov, ∈)`` of the rung's ball
    cover instead of ``V(X, X, U)``.
    """
    ring = Ring.parse(ring)
    A = check_subset(A, ladder.n)
    if cloud is not None and cloud.n != ladder.n:
        raise InputError("ladder carrier does not match the cloud")
    degrees = tuple(sorted(set(range(max_dim) if degrees is None else degrees)))
    pairs = []
    for U in ladder.entourages:
        pairs.append(cover_pair(ball_cover(U), A, max_dim) if cover_based else entourage_pair(U, A, max_dim))
    chains = [ChainComplex(p, ring) for p in pairs]
    capped = [p.total.truncated for p in pairs]
    groups = {d: [cc.group(d) if cc.pair.degree_computable(d) else None for cc in chains] for d in degrees}
    bonds: dict = {d: [] for d in degrees}
    ident = range(ladder.n)
    for k in range(len(ladder) - 1):
        inc = check_simplicial(ident, pairs[k + 1], pairs[k])
        for d in degrees:
            if groups[d][k] is None or groups[d][k + 1] is None:
                bonds[d].append(None)
            else:
                bonds[d].append(induced_map(inc, d, ring, chains[k + 1], chains[k]))
    return HomologyTower(ladder, A, ring, max_dim, degrees, pairs, chains, groups, bonds, capped)


def persistent_rank(tower: HomologyTower, degree: int, finer_rung: int, coarser_rung: int) -> int:
    """Rank of the composite bonding map (rational rank of the free part over Z)."""
    M = tower.composite(degree, finer_rung, coarser_rung)
    if tower.ring.is_field:
        return rank_mod_p(M, tower.ring.p)
    gf, gc = tower.group(degree, finer_rung), tower.group(degree, coarser_rung)
    if gf.torsion or gc.torsion:
        warnings.warn(f"torsion present in degree {degree}; rank counts the free part only", TorsionCaveat)
    return rank_rational(M[:gc.betti, :gf.betti])


@dataclass
class Plateau:
    start_rung: int
    end_rung: int
    coarse_scale: float
    fine_scale: float
    rank: int

    @property
    def length(self) -> int:
        return self.end_rung - self.start_rung + 1

    def to_dict(self) -> dict:
        return {"rungs": [self.start_rung, self.end_rung], "scales": [self.coarse_scale, self.fine_scale],
                "rank": self.rank}


def plateau_estimate(tower: HomologyTower, degree: int, min_rungs: int = 2,
                     include_zero: bool = False) -> list[Plateau]:
    """Maximal runs of rungs with a common betti number b whose bonding maps all have rank b.

    Adjacent maps of full rank between equal-dimensional groups compose to
    isomorphisms, so every pairwise persistent rank inside a run equals b.
    Runs shorter than ``min_rungs`` and rank-0 runs (unless asked) are dropped.
    """
    betti = tower.betti(degree)
    if any(b is None for b in betti):
        raise NotComputedError(f"degree {degree} not computed on every rung")
    out = []
    start = 0
    for k in range(1, len(betti) + 1):
        if k < len(betti) and betti[k] == betti[start] and \
                persistent_rank(tower, degree, k, k - 1) == betti[start]:
            continue
        b = betti[start]
        if k - start >= min_rungs and (b > 0 or include_zero):
            out.append(Plateau(start, k - 1, tower.ladder.scales[start], tower.ladder.scales[k - 1], b))
        start = k
    return out


def is_isomorphism(M: np.ndarray, source_moduli: Sequence[int], target_moduli: Sequence[int],
                   ring: Ring, torsion_limit: int = 100_000) -> bool:
    """Whether a homology matrix is invertible over the ring.

    Over Z the free block must be unimodular and the torsion block a bijection
    of the (finite) torsion subgroups, checked by enumeration.
    """
    M = np.asarray(M, dtype=np.int64)
    if len(source_moduli) != len(target_moduli) or M.shape != (len(target_moduli), len(source_moduli)):
        return False
    if ring.is_field:
        return rank_mod_p(M, ring.p) == M.shape[0]
    if sorted(source_moduli) != sorted(target_moduli):
        return False
    b = sum(1 for m in source_moduli if m == 0)
    if b:
        snf = smith_normal_form(M[:b, :b].tolist())
        if snf.rank != b or any(d != 1 for d in snf.diagonal):
            return False
    tors_src, tors_tgt = list(source_moduli[b:]), list(target_moduli[b:])
    if not tors_src:
        return True
    if math.prod(tors_src) > torsion_limit:
        raise InputError("torsion subgroup too large to check by enumeration")
    T = M[b:, b:]
    seen = set()
    for x in itertools.product(*(range(m) for m in tors_src)):
        y = tuple(int(v) % m for v, m in zip(T @ np.array(x, dtype=np.int64), tors_tgt))
        if y in seen:
            return False
        seen.add(y)
    return True


@dataclass
class Verdict:
    ok: bool = True
    stages: list = field(default_factory=list)

    def stage(self, name: str, ok: bool, witness=None, **extra) -> bool:
        self.stages.append({"stage": name, "ok": bool(ok), "witness": witness, **extra})
        self.ok = self.ok and bool(ok)
        return bool(ok)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "stages": self.stages}


def microsimplex_violation(pair_total, A: frozenset, B: frozenset):
    """First simplex of ``pair_total`` lying neither in A nor in B, else None."""
    for s in pair_total:
        if not (A.issuperset(s) or B.issuperset(s)):
            return s
    return None


def excision_verify(cloud: MetricCloud | None, A: Iterable[int], B: Iterable[int], ladder: EntourageLadder,
                    max_dim: int = 2, ring="z2", degrees: Iterable[int] = (0, 1)) -> Verdict:
    """Check the excision route for ``(A, A∩B) -> (X, B)`` along a ladder.

    Stage 1 looks for rungs where ``X∖A`` is strongly contained in B; stage 2
    checks every simplex of ``X_U`` lies in ``A_U`` or ``B_U`` at those rungs;
    stage 3 certifies the inclusion simplicial and its homology map invertible.
    """
    ring = Ring.parse(ring)
    n = ladder.n
    A, B = check_subset(A, n), check_subset(B, n)
    degrees = sorted(set(degrees))
    verdict = Verdict()
    if A | B != frozenset(range(n)):
        warnings.warn("A ∪ B does not cover the carrier")
    rest = frozenset(range(n)) - A
    k0 = strong_containment_rung(rest, B, ladder)
    if k0 is None:
        leak = sorted(star(rest, ball_cover(ladder[-1])) - B)
        verdict.stage("strong_containment", False,
                      {"message": "hypothesis not satisfied at available scales",
                       "finest_scale": ladder.scales[-1], "leaking_points": leak[:1]})
        return verdict
    verdict.stage("strong_containment", True, scale=ladder.scales[k0], rung=k0)

    rungs = list(range(k0, len(ladder)))
    micro = []
    for k in rungs:
        total = entourage_pair(ladder[k], (), max_dim).total
        bad = microsimplex_violation(total, A, B)
        micro.append({"rung": k, "scale": ladder.scales[k], "ok": bad is None,
                      "simplex": None if bad is None else list(bad)})
    if not verdict.stage("microsimplex", all(m["ok"] for m in micro),
                         next((m for m in micro if not m["ok"]), None), rungs=micro):
        return verdict

    checks = []
    all_ok = True
    for k in rungs:
        total = entourage_pair(ladder[k], (), max_dim).total
        src = SimplicialComplexPair(total.restrict(A), total.restrict(A & B))
        tgt = SimplicialComplexPair(total, total.restrict(B))
        try:
            inc = check_simplicial(range(n), src, tgt)
        except NotSimplicialError as e:
            checks.append({"rung": k, "ok": False, "simplex": list(e.simplex)})
            all_ok = False
            continue
        scc, tcc = ChainComplex(src, ring), ChainComplex(tgt, ring)
        per_degree = {}
        for d in degrees:
            M = induced_map(inc, d, ring, scc, tcc)
            iso = is_isomorphism(M, scc.moduli(d), tcc.moduli(d), ring)
            per_degree[str(d)] = {"matrix": M.tolist(), "invertible": iso}
            all_ok = all_ok and iso
        checks.append({"rung": k, "scale": ladder.scales[k],
                       "ok": all(v["invertible"] for v in per_degree.values()), "degrees": per_degree})
    verdict.stage("isomorphism", all_ok, next((c for c in checks if not c["ok"]), None), rungs=checks)
    return verdict


def pullback_cover(cov: Cover, vertex_map: Sequence[int], n: int) -> Cover:
    """``{f⁻¹(V) : V ∈ cov}`` on ``0..n-1`` with empty preimages dropped."""
    members = [{x for x in range(n) if vertex_map[x] in m} for m in cov.members]
    return Cover(n, [m for m in members if m])


def resolution_check(base: tuple, systems: Sequence[tuple], bonding: Sequence[Sequence[int]],
                     cone: Sequence[Sequence[int]]) -> Verdict:
    """Finite-instance check of the two uniform-resolution conditions.

    ``base`` and each system entry are ``(cloud, ladder)``; ``bonding[k]``
    maps system k+1 to system k; ``cone[i]`` maps the base to system i.
    Uniform covers are read as ladder ball covers.
    """
    base_cloud, base_ladder = base
    nsys = len(systems)
    if len(cone) != nsys or len(bonding) != max(nsys - 1, 0):
        raise InputError("need one cone map per system and one bonding map between consecutive systems")
    for i, (cl, _) in enumerate(systems):
        if len(cone[i]) != base_cloud.n or any(not 0 <= y < cl.n for y in cone[i]):
            raise InputError(f"cone map {i} is not a total map into system {i}")
    for k, bm in enumerate(bonding):
        if len(bm) != systems[k + 1][0].n or any(not 0 <= y < systems[k][0].n for y in bm):
            raise InputError(f"bonding map {k + 1}->{k} is not a total map")

    def p(j, i):
        table = list(range(systems[j][0].n))
        for k in range(j - 1, i - 1, -1):
            table = [bonding[k][y] for y in table]
        return table

    verdict = Verdict()
    found1, fail1 = [], None
    for r, U in enumerate(base_ladder.entourages):
        cov = ball_cover(U)
        hit = next(((i, s) for i, (_, lad) in enumerate(systems) for s, V in enumerate(lad.entourages)
                    if is_refinement(cov, pullback_cover(ball_cover(V), cone[i], base_cloud.n))), None)
        if hit is None:
            fail1 = {"base_rung": r, "scale": base_ladder.scales[r]}
            break
        found1.append({"base_rung": r, "system": hit[0], "rung": hit[1]})
    verdict.stage("refinement", fail1 is None, fail1, found=found1)

    found2, fail2 = [], None
    for i, (_, lad) in enumerate(systems):
        image = set(cone[i])
        for s, V in enumerate(lad.entourages):
            st = star(image, ball_cover(V))
            hit, misses = None, {}
            for j in range(i, nsys):
                outside = sorted(set(p(j, i)) - st)
                if not outside:
                    hit = j
                    break
                misses[j] = outside[0]
            if hit is None:
                fail2 = {"system": i, "rung": s, "scale": lad.scales[s], "missed_point": misses}
                break
            found2.append({"system": i, "rung": s, "j": hit})
        if fail2:
            break
    verdict.stage("star_image", fail2 is None, fail2, found=found2)
    return verdict
