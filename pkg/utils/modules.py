"""
Finite Gamma-modules over a ternary Gamma-semiring and their localizations.
The action {a m b}_g is tabulated as action_tables[g, a, m, b].
"""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from utils import GammaSpecError, NotGroupCompleteError, RepresentativeDependenceError, TableError
from utils.config import DEFAULT_CONFIG, Coupling, RunConfig
from utils.ideals import SpectrumSpace, basic_open
from utils.localization import (
    AdditionOutcome,
    FractionClasses,
    MultiplicativeSystem,
    class_addition,
    complement_system,
    fraction_classes,
    generated_mult_system,
    is_multiplicative_system,
)
from utils.semiring import AxiomReport, TernarySemiring, _witnesses

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GammaModule:
    parent: TernarySemiring
    add_table: np.ndarray
    action_tables: np.ndarray
    element_labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        n = self.add_table.shape[0]
        expected = (self.parent.num_gamma, self.parent.n, n, self.parent.n)
        if self.add_table.shape != (n, n) or self.action_tables.shape != expected:
            raise TableError(f"Module tables have shapes {self.add_table.shape}, {self.action_tables.shape}")
        if n < 1 or self.add_table.min() < 0 or self.add_table.max() >= n:
            raise TableError("Module addition table has out-of-range entries")
        if self.action_tables.min() < 0 or self.action_tables.max() >= n:
            raise TableError("Module action table has out-of-range entries")

    @property
    def n(self) -> int:
        return int(self.add_table.shape[0])

    @property
    def group_complete(self) -> bool:
        return bool((self.add_table == 0).any(axis=1).all())

    def negation(self) -> np.ndarray:
        if not self.group_complete:
            raise NotGroupCompleteError("Some module element has no additive inverse")
        return np.argmax(self.add_table == 0, axis=1)

    def label(self, x: int) -> str:
        return self.element_labels[x] if self.element_labels else str(x)


def build_modular_module(T: TernarySemiring, m: int) -> GammaModule:
    """Z/m as a module over Z/n (m | n) with {a x b}_g = g*a*x*b mod m."""
    if T.modulus is None:
        raise TableError("Modular modules need a modular semiring")
    n = T.modulus
    if m < 1 or n % m:
        raise GammaSpecError(f"{m} does not divide {n}")
    ar_t = np.arange(n)
    ar_m = np.arange(m)
    add = (ar_m[:, None] + ar_m[None, :]) % m
    action = np.stack([
        (g * ar_t[:, None, None] * ar_m[None, :, None] * ar_t[None, None, :]) % m
        for g in T.gamma_values or ()
    ])
    return GammaModule(T, add, action)


def module_from_semiring(T: TernarySemiring) -> GammaModule:
    """T acting on itself."""
    return GammaModule(T, np.array(T.add_table), np.array(T.ternary_tables))


def zero_module(T: TernarySemiring) -> GammaModule:
    return GammaModule(T, np.zeros((1, 1), dtype=np.int64), np.zeros((T.num_gamma, T.n, 1, T.n), dtype=np.int64))


def direct_sum(M: GammaModule, N: GammaModule) -> GammaModule:
    """M + N on pairs (x, y) indexed x * |N| + y."""
    nm, nn = M.n, N.n
    xs = np.repeat(np.arange(nm), nn)
    ys = np.tile(np.arange(nn), nm)
    add = M.add_table[xs[:, None], xs[None, :]] * nn + N.add_table[ys[:, None], ys[None, :]]
    action = M.action_tables[:, :, xs, :] * nn + N.action_tables[:, :, ys, :]
    labels = tuple(f"({M.label(x)},{N.label(y)})" for x, y in zip(xs, ys))
    return GammaModule(M.parent, add, action, labels)


def submodule(M: GammaModule, members: Iterable[int]) -> Tuple[GammaModule, Tuple[int, ...]]:
    """Restrict M to a closed subset containing 0; returns the module and its inclusion."""
    keep = tuple(sorted(set(int(x) for x in members) | {0}))
    index = {x: i for i, x in enumerate(keep)}
    arr = np.array(keep)
    try:
        add = np.vectorize(index.__getitem__)(M.add_table[np.ix_(arr, arr)])
        action = np.vectorize(index.__getitem__)(M.action_tables[:, :, arr, :])
    except KeyError as e:
        raise GammaSpecError(f"Subset is not closed: produces {e.args[0]}") from e
    labels = tuple(M.label(x) for x in keep)
    return GammaModule(M.parent, add, action, labels), keep


def verify_module_axioms(M: GammaModule, limit: Optional[int] = None) -> AxiomReport:
    """
    Monoid axioms, distributivity of the action in each variable, zero
    absorption, symmetry {a m b} = {b m a} and compatibility
    {a {b m c}_g d}_h = {{a b c}_g m d}_h with the semiring product.
    """
    limit = limit or DEFAULT_CONFIG.violation_limit
    T = M.parent
    add, act = M.add_table, M.action_tables
    tadd, ter = T.add_table, T.ternary_tables
    n, nt, G = M.n, T.n, T.num_gamma
    ar, at = np.arange(n), np.arange(nt)
    report = AxiomReport()

    def record(name: str, mask: np.ndarray, prefix=()) -> None:
        if name not in report.checked:
            report.checked.append(name)
        budget = limit - len(report.violations)
        if budget > 0:
            report.violations.extend((name, w) for w in _witnesses(mask, prefix, budget))

    record("add_identity", (add[:, 0] != ar) | (add[0, :] != ar))
    record("add_commutativity", add != add.T)
    record("add_associativity", add[add[:, :, None], ar[None, None, :]] != add[ar[:, None, None], add[None, :, :]])
    record("zero_absorption", act[:, :, 0, :] != 0)
    record("zero_scalar", act[:, 0, :, :] != 0)
    record("action_symmetry", act != act.transpose(0, 3, 2, 1))
    for g in range(G):
        t = act[g]  # [a, x, b]
        left = t[tadd[:, :, None, None], ar[None, None, :, None], at[None, None, None, :]]
        record("distributivity_scalar", left != add[t[:, None], t[None, :]], (g,))
        middle = t[at[:, None, None, None], add[None, :, :, None], at[None, None, None, :]]
        record("distributivity_module", middle != add[t[:, :, None, :], t[:, None, :, :]], (g,))
    for g in range(G):
        for h in range(G):
            inner = act[g]  # [b, m, c]
            for a in range(nt):
                # axes (b, m, c, d)
                lhs = act[h][a][inner[:, :, :, None], at[None, None, None, :]]
                rhs = act[h][ter[g][a][:, None, :, None], ar[None, :, None, None], at[None, None, None, :]]
                record("action_compatibility", lhs != rhs, (g, h, a))
    report.truncated = len(report.violations) >= limit
    report.violations.sort()
    return report


# ---------------------------------------------------------------------------
# Localization

@dataclass(frozen=True, eq=False)
class LocalizedModule:
    module: GammaModule
    system: MultiplicativeSystem
    coupling: Coupling
    fractions: FractionClasses
    action_tables: np.ndarray
    addition: AdditionOutcome

    @property
    def num_classes(self) -> int:
        return self.fractions.num_classes

    @property
    def classes(self):
        return self.fractions.classes

    @property
    def class_add_table(self) -> Optional[np.ndarray]:
        return self.addition.table

    @property
    def group_complete(self) -> bool:
        table = self.addition.table
        return table is not None and bool((table == 0).any(axis=1).all())

    def class_of(self, x: int, s: int) -> int:
        return self.fractions.class_of(x, s)

    def as_module(self) -> GammaModule:
        if self.addition.table is None:
            raise NotGroupCompleteError(f"Fraction addition unsupported: {self.addition.failure}")
        labels = tuple(f"{x}/{s}" for x, s in (c[0] for c in self.classes))
        return GammaModule(self.module.parent, self.addition.table, self.action_tables, labels)

    def to_dict(self) -> Dict:
        return {
            "system": list(self.system.members),
            "coupling": self.coupling.value,
            "addition_rule": self.addition.rule.value,
            "num_classes": self.num_classes,
            "addition_supported": self.addition.supported,
            "group_complete": self.group_complete,
            "raw_relation_transitive": self.fractions.raw_relation_transitive,
        }


def localize_module(M: GammaModule, S: MultiplicativeSystem, config: RunConfig = DEFAULT_CONFIG) -> LocalizedModule:
    """
    M_S: classes of M x S under the module cubic-scaling relation
    {u, x, {ttt}_g}_d = {u, y, {sss}_h}_d (module element in the middle slot).
    T acts by {a, x/s, b}_g = {a x b}_g / s, verified on every representative.
    """
    T = M.parent
    verdict = is_multiplicative_system(T, S.members)
    if not verdict or not S.members:
        raise GammaSpecError(f"Not a multiplicative system: {S.members}")
    fc = fraction_classes(T, S, M.action_tables, config.coupling)

    rx, rs = fc.rep_arrays()
    act = M.action_tables
    action = fc.class_of_pair[act[:, :, rx, :], rs[None, None, :, None]]
    xs, ss, cls = fc.pair_arrays()
    got = fc.class_of_pair[act[:, :, xs, :], ss[None, None, :, None]]
    bad = np.argwhere(got != action[:, :, cls, :])
    if len(bad):
        g, a, p, b = (int(i) for i in bad[0])
        witness = (g, a, (int(xs[p]), int(ss[p])), b)
        logger.error(f"Representative-dependent module action: {witness}")
        raise RepresentativeDependenceError("Localized action depends on representatives", witness)

    addition = class_addition(T, fc, M.action_tables, M.add_table, config.addition)
    if not addition.supported:
        logger.info(f"Module addition rule {config.addition.value} unsupported: {addition.failure}")
    return LocalizedModule(M, S, config.coupling, fc, action, addition)


def associated_sheaf_sections(M: GammaModule, a: int, config: RunConfig = DEFAULT_CONFIG) -> LocalizedModule:
    """Sections of the associated sheaf over D(a): M localized at the system generated by a."""
    return localize_module(M, generated_mult_system(M.parent, {a}), config)


@dataclass
class StalkComparison:
    prime: int
    neighbourhood: int
    sections_classes: int
    stalk_classes: int
    well_defined: bool
    injective: bool
    surjective: bool

    @property
    def isomorphic(self) -> bool:
        return self.well_defined and self.injective and self.surjective

    def to_dict(self) -> Dict:
        return dict(self.__dict__, isomorphic=self.isomorphic)


def stalk_identification(
    M: GammaModule, S: SpectrumSpace, prime: int, config: RunConfig = DEFAULT_CONFIG
) -> StalkComparison:
    """
    Compare M_a over the smallest basic neighbourhood D(a) of the prime with
    the stalk M_P through the map x/s -> x/s. On a finite spectrum the germs
    at P are already realized on that neighbourhood.
    """
    T = M.parent
    candidates = []
    for a in range(T.n):
        D = basic_open(S, a)
        if prime in D:
            candidates.append((len(D), a))
    for _, a in sorted(candidates):
        try:
            local = associated_sheaf_sections(M, a, config)
            break
        except GammaSpecError:
            continue
    else:
        raise GammaSpecError(f"No non-degenerate basic neighbourhood of prime {prime}")
    stalk = localize_module(M, complement_system(T, S.primes[prime]), config)

    images = {}
    well_defined = True
    for c, pairs in enumerate(local.classes):
        values = {stalk.class_of(x, s) for x, s in pairs}
        well_defined &= len(values) == 1
        images[c] = min(values)
    hit = set(images.values())
    return StalkComparison(
        prime=prime,
        neighbourhood=a,
        sections_classes=local.num_classes,
        stalk_classes=stalk.num_classes,
        well_defined=well_defined,
        injective=len(hit) == local.num_classes,
        surjective=len(hit) == stalk.num_classes,
    )
