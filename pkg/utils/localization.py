"""
Localization S^-1 T of a finite ternary Gamma-semiring.

Fractions (x, s) with s in S are identified by the cubic-scaling identity
    {u, x, {ttt}_g}_d = {u, y, {sss}_h}_d   for some u in S, g, d, h in Gamma
and the equivalence is the closure of that relation. The same machinery
localizes Gamma-modules, with the module element in the middle slot.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils import (
    DegenerateSystemError,
    GammaSpecError,
    NotPrimeError,
    RepresentativeDependenceError,
)
from utils.config import DEFAULT_CONFIG, AdditionRule, Coupling, RunConfig
from utils.congruence import UnionFind
from utils.ideals import GammaIdeal, is_prime
from utils.semiring import (
    TernarySemiring,
    TGHomomorphism,
    enumerate_homomorphisms,
    find_gamma_inverse,
    map_violations,
    verify_homomorphism,
)

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class MultiplicativeSystem:
    parent: TernarySemiring
    members: Tuple[int, ...]

    def __contains__(self, s: int) -> bool:
        return s in self.members

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class SystemVerdict:
    ok: bool
    witness: Optional[Tuple[int, int, int, int]] = None
    contains_zero: bool = False

    def __bool__(self) -> bool:
        return self.ok


def is_multiplicative_system(T: TernarySemiring, S) -> SystemVerdict:
    """0 not in S, and {s1 s2 s3}_g in S for all members and gammas."""
    members = sorted(set(int(s) for s in S))
    if 0 in members:
        return SystemVerdict(False, None, True)
    if not members:
        return SystemVerdict(True)
    inside = np.zeros(T.n, dtype=bool)
    inside[members] = True
    arr = np.array(members)
    products = T.ternary_tables[:, arr[:, None, None], arr[None, :, None], arr[None, None, :]]
    hits = np.argwhere(~inside[products].transpose(1, 2, 3, 0))
    if len(hits):
        i, j, k, g = (int(x) for x in hits[0])
        return SystemVerdict(False, (members[i], members[j], members[k], g))
    return SystemVerdict(True)


def generated_mult_system(T: TernarySemiring, seed) -> MultiplicativeSystem:
    """Least superset of seed closed under all ternary products."""
    members = set(int(s) for s in seed)
    if 0 in members:
        raise DegenerateSystemError("Seed contains 0")
    while True:
        arr = np.array(sorted(members))
        products = set(np.unique(T.ternary_tables[:, arr[:, None, None], arr[None, :, None], arr[None, None, :]]).tolist())
        if 0 in products:
            raise DegenerateSystemError(f"System generated by {sorted(seed)} degenerates: closure hits 0")
        if products <= members:
            return MultiplicativeSystem(T, tuple(sorted(members)))
        members |= products


def complement_system(T: TernarySemiring, P: GammaIdeal) -> MultiplicativeSystem:
    return MultiplicativeSystem(T, tuple(a for a in range(T.n) if a not in P))


def check_complement_stability(T: TernarySemiring, P: GammaIdeal) -> SystemVerdict:
    """s, t, u outside P forces {stu}_g outside P."""
    return is_multiplicative_system(T, complement_system(T, P).members)


# ---------------------------------------------------------------------------
# Fraction classes, shared by semiring and module localization

@dataclass
class FractionClasses:
    """Classes of X x S under the closed cubic-scaling relation."""

    num_size: int
    system: Tuple[int, ...]
    classes: Tuple[Tuple[Pair, ...], ...]
    class_of_pair: np.ndarray
    raw_relation_transitive: bool
    closure_added_pairs: int

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def representative(self, c: int) -> Pair:
        return self.classes[c][0]

    def class_of(self, x: int, s: int) -> int:
        c = int(self.class_of_pair[x, s])
        if c < 0:
            raise GammaSpecError(f"Denominator {s} is not in the system")
        return c

    def pair_arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Numerators, denominators and class ids of every pair, in pair order."""
        xs = np.repeat(np.arange(self.num_size), len(self.system))
        ss = np.tile(np.array(self.system), self.num_size)
        return xs, ss, self.class_of_pair[xs, ss]

    def rep_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        reps = [self.representative(c) for c in range(self.num_classes)]
        return np.array([r[0] for r in reps]), np.array([r[1] for r in reps])


def cube_table(T: TernarySemiring) -> np.ndarray:
    """cubes[t, g] = {ttt}_g"""
    ar = np.arange(T.n)
    return T.ternary_tables[:, ar, ar, ar].T


def fraction_classes(
    T: TernarySemiring,
    S: MultiplicativeSystem,
    scale: np.ndarray,
    coupling: Coupling = Coupling.MATCHED,
) -> FractionClasses:
    """
    Equivalence classes of fractions x/s for x in a carrier X of size
    scale.shape[2], where scale[d, u, x, v] realizes {u x v}_d.

    Witness search runs over every u in S and every (g, d, h); with matched
    coupling only g == h is allowed.
    """
    system = np.array(S.members)
    m, G = len(system), T.num_gamma
    nx = scale.shape[2]
    cubes = cube_table(T)[system]  # (m, G) indexed [t, g]
    xs = np.arange(nx)
    # V[x, t, u, d, g] = {u, x, {ttt}_g}_d
    V = scale[
        np.arange(G)[None, None, None, :, None],
        system[None, None, :, None, None],
        xs[:, None, None, None, None],
        cubes[None, :, None, None, :],
    ]
    related = np.zeros((nx, m, nx, m), dtype=bool)
    for u in range(m):
        for d in range(G):
            for g in range(G):
                etas = [g] if coupling == Coupling.MATCHED else range(G)
                left = V[:, :, u, d, g]  # [x, t]
                for h in etas:
                    right = V[:, :, u, d, h]  # [y, s]
                    related |= left[:, None, None, :] == right.T[None, :, :, None]
    related = related.reshape(nx * m, nx * m)

    uf = UnionFind(nx * m)
    for p, q in np.argwhere(related):
        if p < q:
            uf.union(int(p), int(q))
    groups = uf.classes(range(nx * m))

    class_of_pair = np.full((nx, T.n), -1, dtype=np.int64)
    classes = []
    complete_pairs = 0
    for c, group in enumerate(groups):
        pairs = tuple((p // m, int(system[p % m])) for p in group)
        classes.append(pairs)
        for x, s in pairs:
            class_of_pair[x, s] = c
        complete_pairs += len(group) ** 2
    raw_pairs = int(related.sum())
    added = complete_pairs - raw_pairs
    if added:
        logger.info(f"Transitive closure added {added} related pair(s)")
    return FractionClasses(
        num_size=nx,
        system=tuple(int(s) for s in system),
        classes=tuple(classes),
        class_of_pair=class_of_pair,
        raw_relation_transitive=added == 0,
        closure_added_pairs=added,
    )


@dataclass
class AdditionOutcome:
    rule: AdditionRule
    table: Optional[np.ndarray]
    failure: Optional[Tuple[str, Tuple[Any, ...]]] = None

    @property
    def supported(self) -> bool:
        return self.table is not None


def fraction_sum(
    T: TernarySemiring,
    scale: np.ndarray,
    add_x: np.ndarray,
    rule: AdditionRule,
    x: np.ndarray,
    s: np.ndarray,
    y: np.ndarray,
    t: np.ndarray,
    w: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Numerator and denominator of x/s + y/t under the given rule, with gamma_0."""
    ter = T.ternary_tables[0]
    if rule == AdditionRule.SQUARED:
        num = add_x[scale[0, t, x, t], scale[0, s, y, s]]
        den = ter[s, t, t]
    else:
        cube = cube_table(T)[:, 0]
        num = add_x[scale[0, cube[t], x, cube[w]], scale[0, cube[s], y, cube[w]]]
        den = ter[s, t, w]
    return num, den


def class_addition(
    T: TernarySemiring,
    fc: FractionClasses,
    scale: np.ndarray,
    add_x: np.ndarray,
    rule: AdditionRule,
) -> AdditionOutcome:
    """
    Build the class addition table from representatives, then verify it
    exhaustively: independence of representatives, commutativity,
    associativity and the zero class as identity.
    """
    w = fc.system[0]
    rx, rs = fc.rep_arrays()
    k = fc.num_classes
    num, den = fraction_sum(T, scale, add_x, rule, rx[:, None], rs[:, None], rx[None, :], rs[None, :], w)
    table = fc.class_of_pair[num, den]
    if (table < 0).any():
        return AdditionOutcome(rule, None, ("denominator_outside_system", ()))

    xs, ss, cls = fc.pair_arrays()
    num, den = fraction_sum(T, scale, add_x, rule, xs[:, None], ss[:, None], xs[None, :], ss[None, :], w)
    bad = np.argwhere(fc.class_of_pair[num, den] != table[cls[:, None], cls[None, :]])
    if len(bad):
        p, q = (int(i) for i in bad[0])
        return AdditionOutcome(rule, None, ("representative_dependence", ((int(xs[p]), int(ss[p])), (int(xs[q]), int(ss[q])))))

    bad = np.argwhere(table != table.T)
    if len(bad):
        return AdditionOutcome(rule, None, ("commutativity", tuple(int(i) for i in bad[0])))
    ar = np.arange(k)
    bad = np.argwhere(table[table[:, :, None], ar[None, None, :]] != table[ar[:, None, None], table[None, :, :]])
    if len(bad):
        return AdditionOutcome(rule, None, ("associativity", tuple(int(i) for i in bad[0])))
    bad = np.flatnonzero(table[0] != ar)
    if len(bad):
        return AdditionOutcome(rule, None, ("zero_identity", (int(bad[0]),)))
    return AdditionOutcome(rule, table)


# ---------------------------------------------------------------------------
# Localized semiring

@dataclass(frozen=True, eq=False)
class LocalizedSemiring:
    source: TernarySemiring
    system: MultiplicativeSystem
    coupling: Coupling
    fractions: FractionClasses
    class_ternary_tables: np.ndarray
    addition: AdditionOutcome
    canonical_map: Tuple[int, ...]
    local_units: Dict[int, Optional[int]] = field(default_factory=dict)
    local_inverses: Dict[int, Optional[Tuple[int, int]]] = field(default_factory=dict)

    @property
    def classes(self) -> Tuple[Tuple[Pair, ...], ...]:
        return self.fractions.classes

    @property
    def num_classes(self) -> int:
        return self.fractions.num_classes

    @property
    def class_add_table(self) -> Optional[np.ndarray]:
        return self.addition.table

    @property
    def addition_supported(self) -> bool:
        return self.addition.supported

    @property
    def raw_relation_transitive(self) -> bool:
        return self.fractions.raw_relation_transitive

    def class_of(self, a: int, s: int) -> int:
        return self.fractions.class_of(a, s)

    def canonical_map_violations(self) -> List:
        """Failures of a -> class({a s0 s0}, {s0 s0 s0}) to be a homomorphism."""
        T = self.source
        return map_violations(
            T.add_table if self.addition_supported else None,
            T.ternary_tables,
            self.class_add_table,
            self.class_ternary_tables,
            tuple(range(T.num_gamma)),
            self.canonical_map,
            DEFAULT_CONFIG.violation_limit,
        )

    def as_semiring(self) -> TernarySemiring:
        if not self.addition_supported:
            raise GammaSpecError("Fraction addition is unsupported for this localization")
        return TernarySemiring(
            add_table=self.class_add_table,
            ternary_tables=self.class_ternary_tables,
            gamma_names=self.source.gamma_names,
            element_names=tuple(f"{a}/{s}" for a, s in (c[0] for c in self.classes)),
        )

    def to_dict(self) -> Dict:
        failure = self.addition.failure
        return {
            "system": list(self.system.members),
            "coupling": self.coupling.value,
            "addition_rule": self.addition.rule.value,
            "num_classes": self.num_classes,
            "classes": [[list(p) for p in c] for c in self.classes],
            "canonical_map": list(self.canonical_map),
            "raw_relation_transitive": self.raw_relation_transitive,
            "closure_added_pairs": self.fractions.closure_added_pairs,
            "addition_supported": self.addition_supported,
            "addition_failure": None if failure is None else {"kind": failure[0], "witness": _jsonable(failure[1])},
            "local_units": {str(s): g for s, g in sorted(self.local_units.items())},
            "local_inverses": {str(s): None if w is None else list(w) for s, w in sorted(self.local_inverses.items())},
        }


def _jsonable(value):
    if isinstance(value, (tuple, list)):
        return [_jsonable(v) for v in value]
    return int(value)


def _class_products(T: TernarySemiring, fc: FractionClasses) -> np.ndarray:
    rx, rs = fc.rep_arrays()
    ter = T.ternary_tables
    G = T.num_gamma
    tables = np.empty((G, fc.num_classes, fc.num_classes, fc.num_classes), dtype=np.int64)
    for lam in range(G):
        num = ter[lam][rx[:, None, None], rx[None, :, None], rx[None, None, :]]
        den = ter[lam][rs[:, None, None], rs[None, :, None], rs[None, None, :]]
        tables[lam] = fc.class_of_pair[num, den]
    return tables


def verify_class_products(T: TernarySemiring, fc: FractionClasses, tables: np.ndarray, chunk: int = 16) -> None:
    """
    Every choice of representatives lands in the tabulated class.
    Raises RepresentativeDependenceError with the first offending triple.
    """
    xs, ss, cls = fc.pair_arrays()
    ter = T.ternary_tables
    for lam in range(T.num_gamma):
        t = ter[lam]
        rest_x = t[:, xs[:, None], xs[None, :]]  # [a, q, r] -> {a x_q x_r}
        rest_s = t[:, ss[:, None], ss[None, :]]
        for start in range(0, len(xs), chunk):
            block = slice(start, start + chunk)
            num = rest_x[xs[block]]  # [p, q, r]
            den = rest_s[ss[block]]
            got = fc.class_of_pair[num, den]
            want = tables[lam][cls[block][:, None, None], cls[None, :, None], cls[None, None, :]]
            bad = np.argwhere(got != want)
            if len(bad):
                p, q, r = (int(i) for i in bad[0])
                p += start
                witness = (lam,) + tuple((int(xs[i]), int(ss[i])) for i in (p, q, r))
                logger.error(f"Representative-dependent product: {witness}")
                raise RepresentativeDependenceError("Class product depends on representatives", witness)


def _local_units(fc: FractionClasses, tables: np.ndarray) -> Dict[int, Optional[int]]:
    """Least gamma with {s/s, s/s, x}_gamma = x for every class x, or None."""
    ar = np.arange(fc.num_classes)
    units = {}
    for s in fc.system:
        c = fc.class_of(s, s)
        units[s] = next((g for g in range(tables.shape[0]) if np.array_equal(tables[g, c, c], ar)), None)
    return units


def _local_inverses(fc: FractionClasses, tables: np.ndarray) -> Dict[int, Optional[Tuple[int, int]]]:
    """
    For each s, the least (partner class e, gamma) with {s/s, e, x}_gamma = x
    for every class x. Partners are tried by ascending class, then gamma.
    """
    ar = np.arange(fc.num_classes)
    inverses = {}
    for s in fc.system:
        c = fc.class_of(s, s)
        inverses[s] = next(
            ((e, g) for e in range(fc.num_classes) for g in range(tables.shape[0]) if np.array_equal(tables[g, c, e], ar)),
            None,
        )
    return inverses


def localize(
    T: TernarySemiring,
    S: MultiplicativeSystem,
    config: RunConfig = DEFAULT_CONFIG,
) -> LocalizedSemiring:
    """
    Build S^-1 T: fraction classes, class product tables (verified to be
    independent of representatives), the configured addition rule (verified,
    or reported unsupported), the canonical map and the local-unit table.
    """
    verdict = is_multiplicative_system(T, S.members)
    if not verdict:
        raise GammaSpecError(f"Not a multiplicative system: {S.members} (witness {verdict.witness})")
    if not S.members:
        raise GammaSpecError("Multiplicative system is empty")
    logger.info(f"Localizing carrier {T.n} at {list(S.members)} ({config.coupling.value} coupling)")

    fc = fraction_classes(T, S, T.ternary_tables, config.coupling)
    tables = _class_products(T, fc)
    verify_class_products(T, fc, tables)
    addition = class_addition(T, fc, T.ternary_tables, T.add_table, config.addition)
    if not addition.supported:
        logger.warning(f"Addition rule {config.addition.value} unsupported: {addition.failure}")

    s0 = S.members[0]
    ter0 = T.ternary_tables[0]
    canonical = tuple(fc.class_of(int(ter0[a, s0, s0]), int(ter0[s0, s0, s0])) for a in range(T.n))
    localized = LocalizedSemiring(
        source=T,
        system=S,
        coupling=config.coupling,
        fractions=fc,
        class_ternary_tables=tables,
        addition=addition,
        canonical_map=canonical,
        local_units=_local_units(fc, tables),
        local_inverses=_local_inverses(fc, tables),
    )
    idle = [s for s, g in localized.local_units.items() if g is None]
    if idle:
        logger.warning(f"s/s is not a two-sided local unit for s in {idle}")
    missing = [s for s, w in localized.local_inverses.items() if w is None]
    if missing:
        logger.warning(f"s/s has no ternary inverse for s in {missing}")
    logger.info(f"Localization has {localized.num_classes} classes")
    return localized


def localize_at_prime(T: TernarySemiring, P: GammaIdeal, config: RunConfig = DEFAULT_CONFIG) -> LocalizedSemiring:
    """T_P := (T minus P)^-1 T."""
    verdict = is_prime(T, P)
    if not verdict:
        logger.warning(f"Refusing to localize at non-prime {P.members}: {verdict.witness}")
        raise NotPrimeError(f"{P.label()} is not prime", verdict.witness)
    return localize(T, complement_system(T, P), config)


# ---------------------------------------------------------------------------
# Universal property

@dataclass
class UniversalPropertyReport:
    verdict: str  # unique | none | multiple | precondition | invalid_morphism
    factorizations: List[Tuple[int, ...]] = field(default_factory=list)
    non_invertible: List[int] = field(default_factory=list)
    additive: bool = True

    @property
    def passed(self) -> bool:
        return self.verdict == "unique"

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict,
            "count": len(self.factorizations),
            "factorizations": [list(f) for f in self.factorizations],
            "non_invertible": self.non_invertible,
            "additive": self.additive,
        }


def check_universal_property(
    T: TernarySemiring,
    S: MultiplicativeSystem,
    f: TGHomomorphism,
    config: RunConfig = DEFAULT_CONFIG,
) -> UniversalPropertyReport:
    """
    Enumerate every homomorphism g: S^-1 T -> R with g o phi = f.
    The property holds when exactly one exists. When fraction addition is
    unsupported only multiplicative structure is required of g.
    """
    if not verify_homomorphism(f).passed:
        return UniversalPropertyReport("invalid_morphism")
    R = f.target
    blocked = [s for s in S.members if find_gamma_inverse(R, f(s)) is None]
    if blocked:
        logger.info(f"Images of {blocked} are not invertible in the target")
        return UniversalPropertyReport("precondition", non_invertible=blocked)

    L = localize(T, S, config)
    fixed: Dict[int, int] = {}
    for a in range(T.n):
        c = L.canonical_map[a]
        if fixed.setdefault(c, f(a)) != f(a):
            logger.info(f"phi identifies elements that f separates (class {c})")
            return UniversalPropertyReport("none", additive=L.addition_supported)

    maps = enumerate_homomorphisms(
        L.class_add_table,
        L.class_ternary_tables,
        R,
        f.gamma_map,
        fixed=fixed,
        cap=config.cap_homs,
    )
    verdict = {0: "none", 1: "unique"}.get(len(maps), "multiple")
    return UniversalPropertyReport(verdict, maps, additive=L.addition_supported)


def replay_equivalence(
    T: TernarySemiring, S: MultiplicativeSystem, left: Pair, right: Pair, coupling: Coupling = Coupling.MATCHED
) -> Optional[Tuple[int, int, int, int]]:
    """
    Least direct witness (u, g, d, h) of {u, a, {ttt}_g}_d = {u, b, {sss}_h}_d,
    searched by ascending u then (g, d, h); None when the pair is not directly related.
    """
    (a, s), (b, t) = left, right
    ter = T.ternary_tables
    G = T.num_gamma
    for u in S.members:
        for g in range(G):
            for d in range(G):
                for h in range(G):
                    if coupling == Coupling.MATCHED and g != h:
                        continue
                    if ter[d, u, a, ter[g, t, t, t]] == ter[d, u, b, ter[h, s, s, s]]:
                        return u, g, d, h
    return None
