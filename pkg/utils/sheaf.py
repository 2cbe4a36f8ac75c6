"""
Structure sheaf and associated module sheaves on a finite prime spectrum.

Opens are prime-index sets. A section over U is a family of stalk classes,
one per prime in U, that is locally a single fraction: every prime has a
basic neighbourhood D(f) inside U and a fraction x/b, with b outside every
prime of D(f), whose class matches the family at each prime of D(f).
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils import CapExceededError, DegenerateSystemError, GammaSpecError, InternalConsistencyError
from utils.config import DEFAULT_CONFIG, RunConfig
from utils.ideals import GammaIdeal, SpectrumSpace, basic_open
from utils.localization import LocalizedSemiring, complement_system, generated_mult_system, localize, localize_at_prime
from utils.modules import GammaModule, LocalizedModule, localize_module
from utils.semiring import AxiomReport

logger = logging.getLogger(__name__)

Stalk = Union[LocalizedSemiring, LocalizedModule]


@dataclass(frozen=True)
class OpenSet:
    spectrum: SpectrumSpace = field(compare=False, repr=False)
    primes: FrozenSet[int]
    basis_decomposition: Tuple[int, ...] = ()

    @property
    def ordered(self) -> Tuple[int, ...]:
        return tuple(sorted(self.primes))

    def __contains__(self, q: int) -> bool:
        return q in self.primes

    def __len__(self) -> int:
        return len(self.primes)


def open_set(S: SpectrumSpace, primes: Iterable[int]) -> OpenSet:
    """Wrap a prime set, checking it is open and covering it greedily by basic opens."""
    U = frozenset(int(p) for p in primes)
    if not U <= S.points:
        raise GammaSpecError(f"Unknown prime index in {sorted(U)}")
    if not S.is_open(U):
        raise GammaSpecError(f"{sorted(U)} is not open")
    covered: FrozenSet[int] = frozenset()
    decomposition = []
    for a in range(S.parent.n):
        if covered == U:
            break
        D = basic_open(S, a)
        if D and D <= U and not D <= covered:
            decomposition.append(a)
            covered |= D
    if covered != U:
        raise InternalConsistencyError(f"Basic opens do not cover the open set {sorted(U)}")
    return OpenSet(S, U, tuple(decomposition))


def whole_space(S: SpectrumSpace) -> OpenSet:
    return open_set(S, S.points)


@dataclass(frozen=True)
class Certificate:
    prime: int
    basic: int
    neighbourhood: FrozenSet[int]
    fraction: Tuple[int, int]

    def to_dict(self) -> Dict:
        return {
            "prime": self.prime,
            "basic": self.basic,
            "neighbourhood": sorted(self.neighbourhood),
            "fraction": list(self.fraction),
        }


@dataclass(frozen=True)
class SectionFamily:
    open_set: OpenSet
    values: Tuple[int, ...]
    certificates: Tuple[Certificate, ...] = ()

    def value_at(self, q: int) -> int:
        return self.values[self.open_set.ordered.index(q)]

    def to_dict(self) -> Dict:
        return {
            "open": list(self.open_set.ordered),
            "values": list(self.values),
            "certificates": [c.to_dict() for c in self.certificates],
        }


class Sheaf:
    """
    Structure sheaf of a spectrum, or the sheaf associated with a module over
    the same semiring when `module` is given. Stalks are cached per prime.
    """

    def __init__(self, spectrum: SpectrumSpace, module: Optional[GammaModule] = None, config: RunConfig = DEFAULT_CONFIG):
        self.spectrum = spectrum
        self.module = module
        self.config = config
        self._stalks: Dict[int, Stalk] = {}
        self._pieces: Dict[FrozenSet[int], Dict[Tuple[int, ...], Tuple[int, int]]] = {}
        self._sections: Dict[FrozenSet[int], List[SectionFamily]] = {}

    @property
    def carrier_size(self) -> int:
        return self.module.n if self.module is not None else self.spectrum.parent.n

    def stalk(self, q: int) -> Stalk:
        if q not in self._stalks:
            self._stalks[q] = self._build_stalk(q)
        return self._stalks[q]

    def _build_stalk(self, q: int) -> Stalk:
        T = self.spectrum.parent
        P = self.spectrum.primes[q]
        if self.module is None:
            local = localize_at_prime(T, P, self.config)
        else:
            local = localize_module(self.module, complement_system(T, P), self.config)
        if local.num_classes > self.config.cap_stalk:
            raise CapExceededError("stalk classes", self.config.cap_stalk, local.num_classes)
        return local

    def stalks(self, primes: Iterable[int]) -> List[Stalk]:
        primes = sorted(primes)
        missing = [q for q in primes if q not in self._stalks]
        if len(missing) > 1 and self.config.threads > 1:
            with ThreadPoolExecutor(max_workers=self.config.threads) as pool:
                for q, local in zip(missing, pool.map(self._build_stalk, missing)):
                    self._stalks[q] = local
        return [self.stalk(q) for q in primes]

    def group_complete(self, q: int) -> bool:
        table = self.stalk(q).class_add_table
        return table is not None and bool((table == 0).any(axis=1).all())

    def negation(self, q: int) -> np.ndarray:
        return np.argmax(self.stalk(q).class_add_table == 0, axis=1)

    def pieces(self, D: FrozenSet[int]) -> Dict[Tuple[int, ...], Tuple[int, int]]:
        """
        Value tuples over D (ascending primes) realized by a single fraction
        x/b with b outside every prime of D, each with its least fraction.
        """
        if D not in self._pieces:
            T = self.spectrum.parent
            primes = sorted(D)
            allowed = [b for b in range(T.n) if all(b not in self.spectrum.primes[q] for q in primes)]
            found: Dict[Tuple[int, ...], Tuple[int, int]] = {}
            if allowed:
                xs = np.repeat(np.arange(self.carrier_size), len(allowed))
                bs = np.tile(np.array(allowed), self.carrier_size)
                columns = [self.stalk(q).fractions.class_of_pair[xs, bs] for q in primes]
                for i, row in enumerate(zip(*columns)):
                    found.setdefault(tuple(int(c) for c in row), (int(xs[i]), int(bs[i])))
            self._pieces[D] = found
        return self._pieces[D]

    def _neighbourhoods(self, U: OpenSet) -> List[Tuple[FrozenSet[int], int]]:
        # distinct nonempty basic opens inside U, each with its least element
        seen: Dict[FrozenSet[int], int] = {}
        for f in range(self.spectrum.parent.n):
            D = basic_open(self.spectrum, f)
            if D and D <= U.primes:
                seen.setdefault(D, f)
        return sorted(seen.items(), key=lambda item: (len(item[0]), sorted(item[0]), item[1]))

    def certify(self, U: OpenSet, values: Sequence[int]) -> Optional[Tuple[Certificate, ...]]:
        """A certificate per prime of U, or None when the family is not locally a fraction."""
        order = U.ordered
        at = dict(zip(order, values))
        certificates = []
        neighbourhoods = self._neighbourhoods(U)
        for q in order:
            for D, f in neighbourhoods:
                if q not in D:
                    continue
                fraction = self.pieces(D).get(tuple(at[p] for p in sorted(D)))
                if fraction is not None:
                    certificates.append(Certificate(q, f, D, fraction))
                    break
            else:
                return None
        return tuple(certificates)

    def sections(self, U: OpenSet) -> List[SectionFamily]:
        if U.primes in self._sections:
            return self._sections[U.primes]
        order = U.ordered
        candidates: List[set] = [set() for _ in order]
        for D, _ in self._neighbourhoods(U):
            positions = [order.index(p) for p in sorted(D)]
            for piece in self.pieces(D):
                for pos, c in zip(positions, piece):
                    candidates[pos].add(c)
        total = int(np.prod([len(c) for c in candidates], dtype=object))
        if total > self.config.cap_sections:
            raise CapExceededError("section families", self.config.cap_sections, total)
        found = []
        for values in product(*(sorted(c) for c in candidates)):
            certificates = self.certify(U, values)
            if certificates is not None:
                found.append(SectionFamily(U, tuple(values), certificates))
        logger.debug(f"{len(found)} section(s) over {list(order)}")
        self._sections[U.primes] = found
        return found

    def replay(self, s: SectionFamily) -> bool:
        """Every certificate reproduces the family on its neighbourhood."""
        for cert in s.certificates:
            x, b = cert.fraction
            for q in cert.neighbourhood:
                if self.stalk(q).fractions.class_of_pair[x, b] != s.value_at(q):
                    return False
        return True

    def act(self, g: int, a: int, s: SectionFamily, b: int) -> Tuple[int, ...]:
        """{a s b}_g computed stalkwise."""
        if self.module is None:
            raise GammaSpecError("The action is defined on module sheaves")
        out = []
        for q, c in zip(s.open_set.ordered, s.values):
            out.append(int(self.stalk(q).action_tables[g, a, c, b]))
        return tuple(out)


@lru_cache(maxsize=8)
def _structure_sheaf(S: SpectrumSpace, config: RunConfig) -> Sheaf:
    return Sheaf(S, None, config)


def _prime_index(S: SpectrumSpace, P: Union[int, GammaIdeal]) -> int:
    if isinstance(P, GammaIdeal):
        return S.prime_index(P)
    if not 0 <= int(P) < len(S.primes):
        raise GammaSpecError(f"No prime with index {P}")
    return int(P)


def stalk(S: SpectrumSpace, P: Union[int, GammaIdeal], config: RunConfig = DEFAULT_CONFIG) -> LocalizedSemiring:
    return _structure_sheaf(S, config).stalk(_prime_index(S, P))


def sections(S: SpectrumSpace, U: OpenSet, config: RunConfig = DEFAULT_CONFIG) -> List[SectionFamily]:
    return _structure_sheaf(S, config).sections(U)


def restrict(s: SectionFamily, V: OpenSet) -> SectionFamily:
    if not V.primes <= s.open_set.primes:
        raise GammaSpecError(f"{sorted(V.primes)} is not contained in {sorted(s.open_set.primes)}")
    values = tuple(s.value_at(q) for q in V.ordered)
    certificates = tuple(
        Certificate(c.prime, c.basic, c.neighbourhood & V.primes, c.fraction)
        for c in s.certificates
        if c.prime in V
    )
    return SectionFamily(V, values, certificates)


def verify_sheaf_axioms(
    S: SpectrumSpace, cover: Sequence[OpenSet], config: RunConfig = DEFAULT_CONFIG, sheaf: Optional[Sheaf] = None
) -> AxiomReport:
    """
    Locality: sections of the union that agree on every member coincide.
    Gluing: every family of member sections agreeing on pairwise overlaps
    is the restriction of exactly one section of the union.
    """
    F = sheaf or _structure_sheaf(S, config)
    U = open_set(S, frozenset().union(*(V.primes for V in cover)))
    report = AxiomReport(checked=["locality", "gluing"])
    limit = config.violation_limit
    whole = F.sections(U)

    seen: Dict[Tuple, int] = {}
    for i, s in enumerate(whole):
        key = tuple(restrict(s, V).values for V in cover)
        if key in seen and len(report.violations) < limit:
            report.violations.append(("locality", (seen[key], i)))
        seen.setdefault(key, i)

    member_sections = [F.sections(V) for V in cover]
    total = int(np.prod([len(m) for m in member_sections], dtype=object))
    if total > config.cap_sections:
        raise CapExceededError("section families", config.cap_sections, total)
    for choice in product(*(range(len(m)) for m in member_sections)):
        family = [member_sections[k][i] for k, i in enumerate(choice)]
        if not _compatible(family):
            continue
        glued = [i for i, s in enumerate(whole) if all(restrict(s, V).values == t.values for V, t in zip(cover, family))]
        if len(glued) != 1 and len(report.violations) < limit:
            report.violations.append(("gluing", choice))
    report.truncated = len(report.violations) >= limit
    if not report.passed:
        logger.warning(f"Sheaf axioms failed with {len(report.violations)} violation(s)")
    return report


def _compatible(family: Sequence[SectionFamily]) -> bool:
    for i, s in enumerate(family):
        for t in family[i + 1:]:
            for q in s.open_set.primes & t.open_set.primes:
                if s.value_at(q) != t.value_at(q):
                    return False
    return True


@dataclass
class BasicSectionsReport:
    element: int
    open: Tuple[int, ...]
    num_sections: int
    num_fractions: Optional[int] = None
    well_defined: bool = True
    injective: Optional[bool] = None
    surjective: Optional[bool] = None
    degenerate: bool = False
    reason: str = ""

    @property
    def isomorphic(self) -> bool:
        return bool(self.well_defined and self.injective and self.surjective)

    def to_dict(self) -> Dict:
        return {
            "element": self.element,
            "open": list(self.open),
            "num_sections": self.num_sections,
            "num_fractions": self.num_fractions,
            "degenerate": self.degenerate,
            "reason": self.reason,
            "basic_iso": {
                "well_defined": self.well_defined,
                "injective": self.injective,
                "surjective": self.surjective,
            },
        }


def compare_basic_sections(S: SpectrumSpace, a: int, config: RunConfig = DEFAULT_CONFIG) -> BasicSectionsReport:
    """
    Compare T_a with the sections over D(a) through x/s -> (class of x/s at each prime).
    A degenerate generated system is reported rather than raised.
    """
    F = _structure_sheaf(S, config)
    U = open_set(S, basic_open(S, a))
    over = F.sections(U)
    T = S.parent
    try:
        local = localize(T, generated_mult_system(T, {a}), config)
    except DegenerateSystemError as e:
        logger.info(f"T_{a} undefined: {e}")
        return BasicSectionsReport(a, U.ordered, len(over), degenerate=True, reason=str(e))

    stalks = F.stalks(U.primes)
    images = []
    well_defined = True
    for pairs in local.classes:
        values = {tuple(int(st.fractions.class_of_pair[x, s]) for st in stalks) for x, s in pairs}
        well_defined &= len(values) == 1
        images.append(min(values))
    hit = set(images)
    targets = {s.values for s in over}
    return BasicSectionsReport(
        element=a,
        open=U.ordered,
        num_sections=len(over),
        num_fractions=local.num_classes,
        well_defined=well_defined,
        injective=len(hit) == local.num_classes,
        surjective=hit == targets,
    )


def check_restriction_action(sheaf: Sheaf, U: OpenSet, V: OpenSet, limit: Optional[int] = None) -> AxiomReport:
    """
    On a module sheaf: {a s b}_g is again a section over U, and restricting
    it to V gives {a (s|V) b}_g.
    """
    limit = limit or sheaf.config.violation_limit
    T = sheaf.spectrum.parent
    report = AxiomReport(checked=["action_closed", "restriction_action"])
    over_u = {s.values for s in sheaf.sections(U)}
    for i, s in enumerate(sheaf.sections(U)):
        small = restrict(s, V)
        for g, a, b in product(range(T.num_gamma), range(T.n), range(T.n)):
            if len(report.violations) >= limit:
                report.truncated = True
                return report
            acted = sheaf.act(g, a, s, b)
            if acted not in over_u:
                report.violations.append(("action_closed", (i, g, a, b)))
                continue
            lhs = restrict(SectionFamily(U, acted), V).values
            if lhs != sheaf.act(g, a, small, b):
                report.violations.append(("restriction_action", (i, g, a, b)))
    return report
