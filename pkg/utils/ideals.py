"""
Gamma-ideals, prime ideals and the Zariski topology on Spec_Gamma(T).
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils import CapExceededError, ImproperPreimageError, InternalConsistencyError
from utils.config import DEFAULT_CONFIG, RunConfig
from utils.semiring import AxiomReport, TernarySemiring, TGHomomorphism

logger = logging.getLogger(__name__)

PrimeSet = FrozenSet[int]


@dataclass(frozen=True)
class GammaIdeal:
    """An ideal, compared by its sorted member tuple."""

    parent: TernarySemiring = field(compare=False, hash=False, repr=False)
    members: Tuple[int, ...]
    generators: Optional[Tuple[int, ...]] = field(default=None, compare=False, hash=False)

    def __contains__(self, a: int) -> bool:
        return a in self._member_set

    def __len__(self) -> int:
        return len(self.members)

    @property
    def _member_set(self) -> FrozenSet[int]:
        return frozenset(self.members)

    @property
    def is_proper(self) -> bool:
        return len(self.members) < self.parent.n

    @property
    def sort_key(self) -> Tuple[int, Tuple[int, ...]]:
        return len(self.members), self.members

    def mask(self) -> np.ndarray:
        inside = np.zeros(self.parent.n, dtype=bool)
        inside[list(self.members)] = True
        return inside

    def label(self) -> str:
        if self.generators:
            return "(" + ",".join(self.parent.name(g) for g in self.generators) + ")"
        return "{" + ",".join(self.parent.name(a) for a in self.members) + "}"

    def to_dict(self) -> Dict:
        return {"members": list(self.members), "generators": list(self.generators or ())}


@dataclass
class PrimeVerdict:
    prime: bool
    witness: Optional[Tuple[int, int, int, int]] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.prime


def ideal_closure(T: TernarySemiring, seed: Iterable[int]) -> GammaIdeal:
    """
    Smallest Gamma-ideal containing seed: add 0, then close under + and
    under ternary absorption in all three slots until nothing changes.
    """
    seed = tuple(sorted(set(int(a) for a in seed)))
    members = set(seed) | {0}
    add, ter = T.add_table, T.ternary_tables
    while True:
        arr = np.array(sorted(members))
        grown = set(members)
        grown.update(np.unique(add[np.ix_(arr, arr)]).tolist())
        grown.update(np.unique(ter[:, arr, :, :]).tolist())
        grown.update(np.unique(ter[:, :, arr, :]).tolist())
        grown.update(np.unique(ter[:, :, :, arr]).tolist())
        if grown == members:
            break
        members = grown
    return GammaIdeal(T, tuple(sorted(members)), generators=seed or (0,))


def ideal_sum(T: TernarySemiring, ideals: Sequence[GammaIdeal]) -> GammaIdeal:
    """I + J + ... read as the closure of the union."""
    union = set()
    for I in ideals:
        union.update(I.members)
    return ideal_closure(T, union)


def ideal_intersection(T: TernarySemiring, ideals: Sequence[GammaIdeal]) -> GammaIdeal:
    members = set(range(T.n))
    for I in ideals:
        members &= set(I.members)
    return GammaIdeal(T, tuple(sorted(members)))


def enumerate_ideals(T: TernarySemiring, config: RunConfig = DEFAULT_CONFIG) -> List[GammaIdeal]:
    """
    All Gamma-ideals of T (T included), ordered by size then members.
    Every ideal is the join of the closures of its members, so closing the
    singleton and pair closures under joins is complete.
    """
    if T.n > config.cap_ideals:
        raise CapExceededError("ideal enumeration carrier", config.cap_ideals, T.n)
    found: Dict[Tuple[int, ...], GammaIdeal] = {}

    def keep(I: GammaIdeal) -> bool:
        if I.members in found:
            return False
        found[I.members] = I
        return True

    keep(ideal_closure(T, ()))
    for a in range(T.n):
        keep(ideal_closure(T, (a,)))
    for a, b in combinations(range(1, T.n), 2):
        keep(ideal_closure(T, (a, b)))
    keep(ideal_closure(T, range(T.n)))

    frontier = list(found.values())
    while frontier:
        fresh = []
        current = list(found.values())
        for I in frontier:
            for J in current:
                K = ideal_closure(T, set(I.members) | set(J.members))
                if keep(K):
                    fresh.append(K)
        frontier = fresh

    ideals = sorted(found.values(), key=lambda I: I.sort_key)
    logger.info(f"Enumerated {len(ideals)} ideals of a carrier of size {T.n}")
    return ideals


def is_prime(T: TernarySemiring, I: GammaIdeal) -> PrimeVerdict:
    """
    Decide primality; on failure give the least (a, b, c, gamma) with
    {abc}_gamma in I and none of a, b, c in I.
    """
    if not I.is_proper:
        return PrimeVerdict(False, None, "not proper")
    inside = I.mask()
    ter = T.ternary_tables
    outside = ~inside
    mask = inside[ter] & outside[None, :, None, None] & outside[None, None, :, None] & outside[None, None, None, :]
    hits = np.argwhere(mask.transpose(1, 2, 3, 0))
    if len(hits):
        a, b, c, g = (int(x) for x in hits[0])
        return PrimeVerdict(False, (a, b, c, g), "product falls inside")
    return PrimeVerdict(True)


def replay_prime_witness(T: TernarySemiring, I: GammaIdeal, witness: Tuple[int, int, int, int]) -> bool:
    """True if the witness shows I is not prime."""
    a, b, c, g = witness
    return int(T.ternary_tables[g, a, b, c]) in I and not (a in I or b in I or c in I)


@dataclass(frozen=True, eq=False)
class SpectrumSpace:
    parent: TernarySemiring
    ideals: Tuple[GammaIdeal, ...]
    primes: Tuple[GammaIdeal, ...]
    closed_sets: Tuple[PrimeSet, ...]

    @property
    def points(self) -> PrimeSet:
        return frozenset(range(len(self.primes)))

    @property
    def open_sets(self) -> Tuple[PrimeSet, ...]:
        return tuple(sorted((self.points - C for C in self.closed_sets), key=_set_key))

    def is_open(self, U: Iterable[int]) -> bool:
        return self.points - frozenset(U) in self.closed_sets

    def prime_index(self, P: GammaIdeal) -> int:
        return self.primes.index(P)

    def to_dict(self) -> Dict:
        return {
            "primes": [P.to_dict() for P in self.primes],
            "closed_sets": [sorted(C) for C in self.closed_sets],
            "t0": is_t0(self),
            "discrete": is_discrete(self),
        }


def _set_key(s: PrimeSet) -> Tuple[int, Tuple[int, ...]]:
    return len(s), tuple(sorted(s))


def _lattice_closure(sets: Iterable[PrimeSet]) -> Tuple[PrimeSet, ...]:
    family = set(sets)
    while True:
        grown = set(family)
        for A in family:
            for B in family:
                grown.add(A | B)
                grown.add(A & B)
        if grown == family:
            return tuple(sorted(family, key=_set_key))
        family = grown


def spectrum(T: TernarySemiring, config: RunConfig = DEFAULT_CONFIG) -> SpectrumSpace:
    """Spec_Gamma(T) with every closed set materialized."""
    ideals = enumerate_ideals(T, config)
    primes = []
    for I in ideals:
        if I.is_proper and is_prime(T, I):
            generators = _principal_generator(T, I)
            primes.append(GammaIdeal(T, I.members, generators))
    points = range(len(primes))
    vanishing = [frozenset(i for i in points if set(I.members) <= set(primes[i].members)) for I in ideals]
    closed = _lattice_closure(vanishing + [frozenset(), frozenset(points)])
    logger.info(f"Spectrum has {len(primes)} prime(s) and {len(closed)} closed set(s)")
    return SpectrumSpace(T, tuple(ideals), tuple(primes), closed)


def _principal_generator(T: TernarySemiring, I: GammaIdeal) -> Optional[Tuple[int, ...]]:
    for a in I.members:
        if a and ideal_closure(T, (a,)).members == I.members:
            return (a,)
    return I.generators


def vanishing_set(S: SpectrumSpace, I: GammaIdeal) -> PrimeSet:
    """V(I): primes containing I."""
    members = set(I.members)
    return frozenset(i for i, P in enumerate(S.primes) if members <= set(P.members))


def basic_open(S: SpectrumSpace, a: int) -> PrimeSet:
    """D(a): primes not containing a."""
    return frozenset(i for i, P in enumerate(S.primes) if a not in P)


def is_t0(S: SpectrumSpace) -> bool:
    return t0_violation(S) is None


def t0_violation(S: SpectrumSpace) -> Optional[Tuple[int, int]]:
    """A pair of distinct primes that no basic open separates, if any."""
    opens = [basic_open(S, a) for a in range(S.parent.n)]
    for p, q in combinations(range(len(S.primes)), 2):
        if not any((p in D) != (q in D) for D in opens):
            return p, q
    return None


def is_discrete(S: SpectrumSpace) -> bool:
    return all(frozenset([p]) in S.open_sets for p in S.points)


def verify_zariski_axioms(S: SpectrumSpace, config: RunConfig = DEFAULT_CONFIG) -> AxiomReport:
    """
    Check V(0) = Spec, V(T) = empty, V(I cap J) = V(I) cup V(J), V(sum I) = cap V(I),
    closure of the closed sets under union and intersection, and T0 separation.
    Families for the sum identity are all subsets when there are at most 12 ideals,
    otherwise `family_sample` seeded random subsets.
    """
    T = S.parent
    report = AxiomReport(
        checked=["vanishing_of_zero", "vanishing_of_whole", "intersection_to_union",
                 "sum_to_intersection", "closed_under_union", "closed_under_intersection", "t0_separation"]
    )
    ideals = S.ideals
    zero = ideal_closure(T, ())
    whole = ideal_closure(T, range(T.n))
    if vanishing_set(S, zero) != S.points:
        report.violations.append(("vanishing_of_zero", ()))
    if vanishing_set(S, whole):
        report.violations.append(("vanishing_of_whole", ()))

    for i, j in combinations(range(len(ideals)), 2):
        meet = ideal_intersection(T, (ideals[i], ideals[j]))
        if vanishing_set(S, meet) != vanishing_set(S, ideals[i]) | vanishing_set(S, ideals[j]):
            report.violations.append(("intersection_to_union", (i, j)))

    if len(ideals) <= 12:
        families = [f for r in range(1, len(ideals) + 1) for f in combinations(range(len(ideals)), r)]
    else:
        rng = np.random.default_rng(config.seed)
        logger.info(f"Sampling {config.family_sample} ideal families with seed {config.seed}")
        families = []
        for _ in range(config.family_sample):
            picks = rng.random(len(ideals)) < 0.5
            families.append(tuple(int(i) for i in np.flatnonzero(picks)) or (0,))
    for family in families:
        total = ideal_sum(T, [ideals[i] for i in family])
        expected = S.points
        for i in family:
            expected = expected & vanishing_set(S, ideals[i])
        if vanishing_set(S, total) != expected:
            report.violations.append(("sum_to_intersection", family))

    closed = set(S.closed_sets)
    for i, j in combinations(range(len(S.closed_sets)), 2):
        A, B = S.closed_sets[i], S.closed_sets[j]
        if A | B not in closed:
            report.violations.append(("closed_under_union", (i, j)))
        if A & B not in closed:
            report.violations.append(("closed_under_intersection", (i, j)))

    pair = t0_violation(S)
    if pair is not None:
        report.violations.append(("t0_separation", pair))

    report.violations.sort()
    if not report.passed:
        logger.warning(f"Zariski axioms failed with {len(report.violations)} violation(s)")
    return report


@dataclass(frozen=True, eq=False)
class SpectrumMap:
    """f*: Spec(target) -> Spec(source), as target prime index -> source prime index."""

    mapping: Tuple[int, ...]
    continuous: bool
    source_spectrum: SpectrumSpace
    target_spectrum: SpectrumSpace

    def __call__(self, j: int) -> int:
        return self.mapping[j]


def induced_spectrum_map(
    f: TGHomomorphism,
    source_spectrum: Optional[SpectrumSpace] = None,
    target_spectrum: Optional[SpectrumSpace] = None,
    config: RunConfig = DEFAULT_CONFIG,
) -> SpectrumMap:
    """
    Pull every prime of the target back along f and locate it in Spec(source),
    then check that preimages of closed sets are closed.
    """
    source_spectrum = source_spectrum or spectrum(f.source, config)
    target_spectrum = target_spectrum or spectrum(f.target, config)
    em = np.asarray(f.element_map)
    mapping = []
    for j, P in enumerate(target_spectrum.primes):
        members = tuple(int(a) for a in np.flatnonzero(P.mask()[em]))
        pulled = GammaIdeal(f.source, members)
        if not pulled.is_proper:
            raise ImproperPreimageError(f"Preimage of prime {P.label()} is the whole source")
        verdict = is_prime(f.source, pulled)
        if not verdict or pulled not in source_spectrum.primes:
            logger.error(f"Preimage {pulled.members} of prime {P.members} is not prime: {verdict.witness}")
            raise InternalConsistencyError(f"Preimage of prime {P.label()} is not prime")
        mapping.append(source_spectrum.prime_index(pulled))

    target_closed = set(target_spectrum.closed_sets)
    continuous = all(
        frozenset(j for j, i in enumerate(mapping) if i in C) in target_closed
        for C in source_spectrum.closed_sets
    )
    return SpectrumMap(tuple(mapping), continuous, source_spectrum, target_spectrum)
