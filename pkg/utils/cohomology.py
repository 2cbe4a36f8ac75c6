"""
Cech complexes of finite basic covers and their cohomology.

Cochains in degree p are tuples of stalk classes, one slot per (index tuple,
prime of the intersection) with tuples in lexicographic order and primes
ascending. Intersections of basic opens are taken as prime sets.
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils import CapExceededError, CoverError, NotGroupCompleteError
from utils.abelian import GroupOps, subquotient_invariants
from utils.config import DEFAULT_CONFIG, RunConfig
from utils.ideals import SpectrumSpace, basic_open, spectrum
from utils.modules import GammaModule
from utils.semiring import TernarySemiring
from utils.sheaf import OpenSet, Sheaf, open_set

logger = logging.getLogger(__name__)

Cochain = Tuple[int, ...]


@dataclass
class CochainGroup:
    degree: int
    index_tuples: List[Tuple[int, ...]]
    opens: List[OpenSet]
    sections: List[List[Tuple[int, ...]]]
    slots: List[Tuple[Tuple[int, ...], int]] = field(default_factory=list)

    @property
    def order(self) -> int:
        return int(np.prod([len(s) for s in self.sections], dtype=object))

    def elements(self):
        for parts in product(*self.sections):
            yield tuple(c for part in parts for c in part)

    def component(self, c: Cochain, k: int) -> Tuple[int, ...]:
        start = sum(len(V) for V in self.opens[:k])
        return c[start:start + len(self.opens[k])]


@dataclass
class CechComplex:
    sheaf: Sheaf
    cover: Tuple[int, ...]
    groups: List[CochainGroup]
    group_complete: bool
    equalizer_only: bool = False

    @property
    def top_degree(self) -> int:
        return len(self.groups) - 1

    def ops(self, p: int) -> GroupOps:
        tables = [self.sheaf.stalk(q).class_add_table for _, q in self.groups[p].slots]

        def add(x: Cochain, y: Cochain) -> Cochain:
            return tuple(int(t[a, b]) for t, a, b in zip(tables, x, y))

        return GroupOps(add, (0,) * len(tables))

    def coboundary(self, p: int, c: Cochain) -> Cochain:
        """(d c)_J = sum_k (-1)^k c_{J minus j_k} restricted to U_J."""
        if not self.group_complete:
            raise NotGroupCompleteError("Coboundaries need group-complete stalks")
        source, target = self.groups[p], self.groups[p + 1]
        position = {J: k for k, J in enumerate(source.index_tuples)}
        out: List[int] = []
        for J, V in zip(target.index_tuples, target.opens):
            for q in V.ordered:
                table = self.sheaf.stalk(q).class_add_table
                negate = self.sheaf.negation(q)
                total = 0
                for k in range(len(J)):
                    face = J[:k] + J[k + 1:]
                    k_src = position[face]
                    value = source.component(c, k_src)[source.opens[k_src].ordered.index(q)]
                    if k % 2:
                        value = negate[value]
                    total = int(table[total, value])
                out.append(total)
        return tuple(out)

    def to_dict(self) -> Dict:
        return {
            "cover": list(self.cover),
            "group_complete": self.group_complete,
            "cochain_orders": [g.order for g in self.groups],
            "intersections": [
                [{"indices": list(J), "open": list(V.ordered)} for J, V in zip(g.index_tuples, g.opens)]
                for g in self.groups
            ],
        }

    def dump(self) -> Dict:
        """Every cochain with its coboundary, degree by degree."""
        degrees = []
        for p, g in enumerate(self.groups):
            entry = {
                "degree": p,
                "slots": [{"indices": list(J), "prime": int(q)} for J, q in g.slots],
                "sections": [[[int(v) for v in s] for s in part] for part in g.sections],
            }
            if self.group_complete and p < self.top_degree:
                entry["coboundary"] = [[[int(v) for v in c], list(self.coboundary(p, c))] for c in g.elements()]
            degrees.append(entry)
        return {"degrees": degrees}


def cech_complex(
    T: TernarySemiring,
    cover: Sequence[int],
    M: Optional[GammaModule] = None,
    config: RunConfig = DEFAULT_CONFIG,
    S: Optional[SpectrumSpace] = None,
    equalizer_only: bool = False,
) -> CechComplex:
    """
    Cech complex of the basic cover {D(a_i)} with coefficients in the sheaf
    associated with M (the structure sheaf when M is None).
    """
    S = S or spectrum(T, config)
    cover = tuple(int(a) for a in cover)
    opens = [basic_open(S, a) for a in cover]
    if frozenset().union(*opens) != S.points:
        missing = sorted(S.points - frozenset().union(*opens))
        raise CoverError(f"D({list(cover)}) misses prime(s) {missing}")
    F = Sheaf(S, M, config)
    group_complete = all(F.group_complete(q) for q in S.points)
    if not group_complete and not equalizer_only:
        logger.info("Stalks are not group-complete; only the degree-0 equalizer is available")

    degrees = 1 if equalizer_only else len(cover)
    groups = []
    for p in range(degrees):
        tuples = list(combinations(range(len(cover)), p + 1))
        intersections = [open_set(S, frozenset.intersection(*(opens[i] for i in J))) for J in tuples]
        sections = [[s.values for s in F.sections(V)] for V in intersections]
        group = CochainGroup(p, tuples, intersections, sections)
        group.slots = [(J, q) for J, V in zip(tuples, intersections) for q in V.ordered]
        if group.order > config.cap_sections:
            raise CapExceededError("cochains", config.cap_sections, group.order)
        groups.append(group)
    logger.info(f"Cech complex on cover {list(cover)} with cochain orders {[g.order for g in groups]}")
    return CechComplex(F, cover, groups, group_complete, equalizer_only)


def verify_d_squared(C: CechComplex) -> List[Tuple[int, Cochain]]:
    """Cochains c with d(d(c)) != 0, by degree."""
    failures = []
    for p in range(C.top_degree - 1):
        zero = (0,) * len(C.groups[p + 2].slots)
        for c in C.groups[p].elements():
            if C.coboundary(p + 1, C.coboundary(p, c)) != zero:
                failures.append((p, c))
    return failures


def _equalizer(C: CechComplex) -> int:
    # families of sections, one per cover member, agreeing on overlaps
    g0 = C.groups[0]
    count = 0
    for parts in product(*g0.sections):
        ok = True
        for i, j in combinations(range(len(parts)), 2):
            Ui, Uj = g0.opens[i], g0.opens[j]
            for q in Ui.primes & Uj.primes:
                if parts[i][Ui.ordered.index(q)] != parts[j][Uj.ordered.index(q)]:
                    ok = False
        count += ok
    return count


def cohomology(C: CechComplex) -> List[Dict]:
    """
    H^p = ker d^p / im d^(p-1) for every degree of the complex, as invariant
    factors. Without group-complete stalks only H^0 is reported, as the size
    of the equalizer.
    """
    if not C.group_complete or C.equalizer_only:
        return [{"degree": 0, "invariant_factors": None, "order": _equalizer(C)}]
    results = []
    images: Dict[int, set] = {0: None}
    for p in range(C.top_degree + 1):
        ops = C.ops(p)
        if p < C.top_degree:
            zero = (0,) * len(C.groups[p + 1].slots)
            kernel, image = [], set()
            for c in C.groups[p].elements():
                d = C.coboundary(p, c)
                if d == zero:
                    kernel.append(c)
                image.add(d)
            images[p + 1] = image
        else:
            kernel = list(C.groups[p].elements())
        boundaries = images.get(p) or {ops.zero}
        factors, order = subquotient_invariants(kernel, boundaries, ops)
        results.append({"degree": p, "invariant_factors": factors, "order": order})
    logger.info(f"Cohomology orders {[h['order'] for h in results]}")
    return results


def is_acyclic(H: Sequence[Dict]) -> bool:
    return all(h["order"] == 1 for h in H if h["degree"] > 0)
