"""
Ternary Gamma-tensor products of finite modules, Tor_1 of cyclic modules over
modular semirings, and a flatness probe.

M (x) N is presented on the symbols m (x) n, one generator per pair, subject to
additivity in each slot, the balancing relation
    {t m u}_g (x) n = m (x) {t n u}_g
and zero absorption. Invariant factors come from Smith normal form; an
independent congruence-closure oracle recomputes them on small inputs.
"""

import logging
from dataclasses import dataclass, field
from math import gcd, lcm
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Set, Tuple

import numpy as np

from utils import CapExceededError, GammaSpecError, InternalConsistencyError, NotGroupCompleteError
from utils.abelian import (
    GroupOps,
    LatticeBasis,
    LatticeQuotient,
    chain_presentation,
    element_order,
    invariants_from_orders,
    scalar_multiple,
    subquotient_invariants,
)
from utils.config import DEFAULT_CONFIG, RunConfig
from utils.congruence import UnionFind
from utils.modules import GammaModule, direct_sum, module_from_semiring, submodule
from utils.semiring import AxiomReport, TernarySemiring

logger = logging.getLogger(__name__)

Relation = Tuple[Tuple[int, int], ...]


@dataclass
class AbGroupPresentation:
    num_generators: int
    relations: List[Relation]
    generator_labels: List[str] = field(default_factory=list)

    def dense(self) -> List[List[int]]:
        rows = []
        for rel in self.relations:
            row = [0] * self.num_generators
            for i, c in rel:
                row[i] += c
            rows.append(row)
        return rows


def _module_ops(M: GammaModule) -> GroupOps:
    table = M.add_table
    return GroupOps(lambda x, y: int(table[x, y]), 0)


def additive_exponent(M: GammaModule) -> int:
    ops = _module_ops(M)
    exponent = 1
    for x in range(M.n):
        exponent = lcm(exponent, element_order(x, ops, M.n))
    return exponent


def _check_pair(M: GammaModule, N: GammaModule) -> None:
    if M.parent is not N.parent and not M.parent.same_tables(N.parent):
        raise GammaSpecError("Modules are over different semirings")
    for name, X in (("left", M), ("right", N)):
        if not X.group_complete:
            raise NotGroupCompleteError(f"The {name} module is not group-complete")


def _relation(terms: Sequence[Tuple[int, int]]) -> Optional[Relation]:
    acc: Dict[int, int] = {}
    for i, c in terms:
        acc[i] = acc.get(i, 0) + c
    rel = tuple(sorted((i, c) for i, c in acc.items() if c))
    if not rel:
        return None
    # e_i - e_j and e_j - e_i generate the same subgroup
    if rel[0][1] < 0:
        rel = tuple((i, -c) for i, c in rel)
    return rel


def tensor_relations(M: GammaModule, N: GammaModule) -> Set[Relation]:
    """Every instance of the defining relations on the pair generators m * |N| + n."""
    nm, nn = M.n, N.n
    T = M.parent
    relations: Set[Relation] = set()

    def keep(terms):
        rel = _relation(terms)
        if rel is not None:
            relations.add(rel)

    addM, addN = M.add_table, N.add_table
    for n in range(nn):
        for m in range(nm):
            for m2 in range(m, nm):
                keep([(m * nn + n, 1), (m2 * nn + n, 1), (int(addM[m, m2]) * nn + n, -1)])
    for m in range(nm):
        for n in range(nn):
            for n2 in range(n, nn):
                keep([(m * nn + n, 1), (m * nn + n2, 1), (m * nn + int(addN[n, n2]), -1)])
    for g in range(T.num_gamma):
        for t in range(T.n):
            for u in range(T.n):
                tm = M.action_tables[g, t, :, u]
                tn = N.action_tables[g, t, :, u]
                for m in range(nm):
                    for n in range(nn):
                        keep([(int(tm[m]) * nn + n, 1), (m * nn + int(tn[n]), -1)])
    for n in range(nn):
        keep([(n, 1)])
    for m in range(nm):
        keep([(m * nn, 1)])
    return relations


@dataclass
class TensorProduct:
    left: GammaModule
    right: GammaModule
    presentation: AbGroupPresentation
    quotient: LatticeQuotient
    invariant_factors: List[int]

    @property
    def order(self) -> int:
        return self.quotient.order

    def symbol(self, m: int, n: int) -> Tuple[int, ...]:
        return self.quotient.generator(m * self.right.n + n)

    def ops(self) -> GroupOps:
        return GroupOps(self.quotient.add, self.quotient.zero)

    def to_dict(self) -> Dict:
        return {
            "generators": self.presentation.num_generators,
            "relations_count": len(self.presentation.relations),
            "invariant_factors": list(self.invariant_factors),
            "order": self.order,
        }


def tensor_product(M: GammaModule, N: GammaModule, config: RunConfig = DEFAULT_CONFIG) -> TensorProduct:
    _check_pair(M, N)
    bound = gcd(additive_exponent(M), additive_exponent(N))
    relations = tensor_relations(M, N)
    labels = [f"{M.label(m)}(x){N.label(n)}" for m in range(M.n) for n in range(N.n)]
    presentation = AbGroupPresentation(M.n * N.n, sorted(relations), labels)
    logger.debug(f"Tensor presentation: {presentation.num_generators} generators, {len(relations)} relations")

    basis = LatticeBasis(presentation.num_generators, bound)
    for row in presentation.dense():
        basis.insert(row)
    quotient = LatticeQuotient(basis)
    factors = quotient.invariant_factors()
    if int(np.prod(factors, dtype=object)) != quotient.order:
        raise InternalConsistencyError(f"Invariant factors {factors} do not multiply to {quotient.order}")
    logger.info(f"Tensor product of orders {M.n} and {N.n}: invariant factors {factors}")
    return TensorProduct(M, N, presentation, quotient, factors)


def tensor_oracle(M: GammaModule, N: GammaModule, cap: int = 4096) -> List[int]:
    """
    Invariant factors of M (x) N by congruence closure. Pairs are expanded
    bilinearly over generator chains of M and N, which maps the pair group
    onto (Z/e)^(r*s); the relation images are then closed with union-find.
    """
    _check_pair(M, N)
    e = gcd(additive_exponent(M), additive_exponent(N))
    pm = chain_presentation(range(M.n), _module_ops(M))
    pn = chain_presentation(range(N.n), _module_ops(N))
    r, s = len(pm.generators), len(pn.generators)
    width = r * s
    size = e ** width
    if size > cap:
        raise CapExceededError("oracle elements", cap, size)
    coords_m = np.array([pm.coords(x) for x in range(M.n)], dtype=np.int64).reshape(M.n, r)
    coords_n = np.array([pn.coords(y) for y in range(N.n)], dtype=np.int64).reshape(N.n, s)

    def phi(m: int, n: int) -> np.ndarray:
        return np.outer(coords_m[m], coords_n[n]).ravel() % e

    radix = e ** np.arange(width - 1, -1, -1, dtype=np.int64)

    def encode(v: np.ndarray) -> int:
        return int((v % e) @ radix) if width else 0

    generators = set()
    for rel in tensor_relations(M, N):
        v = np.zeros(width, dtype=np.int64)
        for i, c in rel:
            v += c * phi(i // N.n, i % N.n)
        code = encode(v)
        if code:
            generators.add(code)
    points = [np.array(np.unravel_index(k, (e,) * width)) if width else np.zeros(0, dtype=np.int64) for k in range(size)]
    uf = UnionFind(size)
    gen_vectors = [points[c] for c in sorted(generators)]
    for k in range(size):
        for g in gen_vectors:
            uf.union(k, encode(points[k] + g))
    classes = uf.classes(range(size))
    root = uf.find(0)
    orders = []
    for cls in classes:
        x = points[cls[0]]
        k = 1
        while uf.find(encode(k * x)) != root:
            k += 1
        orders.append(k)
    return invariants_from_orders(orders)


@dataclass
class BilinearReport:
    balanced: AxiomReport
    induced: Dict[Tuple[int, ...], Hashable] = field(default_factory=dict)
    factors: bool = False

    def to_dict(self) -> Dict:
        return {
            "balanced": self.balanced.to_dict(),
            "factors": self.factors,
            "induced_size": len(self.induced),
        }


def check_bilinear_universal_property(
    M: GammaModule,
    N: GammaModule,
    P: GroupOps,
    beta: Callable[[int, int], Hashable],
    config: RunConfig = DEFAULT_CONFIG,
) -> BilinearReport:
    """
    Check that beta: M x N -> P is additive in each slot, balanced and zero on
    zero, then build the induced homomorphism on M (x) N from the canonical
    coordinates and replay it on every symbol and every sum.
    """
    limit = config.violation_limit
    T = M.parent
    report = AxiomReport(checked=["left_additivity", "right_additivity", "balancing", "zero"])

    def flag(name, witness):
        if len(report.violations) < limit:
            report.violations.append((name, witness))

    for m in range(M.n):
        for m2 in range(M.n):
            for n in range(N.n):
                if P.add(beta(m, n), beta(m2, n)) != beta(int(M.add_table[m, m2]), n):
                    flag("left_additivity", (m, m2, n))
    for m in range(M.n):
        for n in range(N.n):
            for n2 in range(N.n):
                if P.add(beta(m, n), beta(m, n2)) != beta(m, int(N.add_table[n, n2])):
                    flag("right_additivity", (m, n, n2))
    for g in range(T.num_gamma):
        for t in range(T.n):
            for u in range(T.n):
                for m in range(M.n):
                    for n in range(N.n):
                        if beta(int(M.action_tables[g, t, m, u]), n) != beta(m, int(N.action_tables[g, t, n, u])):
                            flag("balancing", (g, t, u, m, n))
    for n in range(N.n):
        if beta(0, n) != P.zero:
            flag("zero", (0, n))
    for m in range(M.n):
        if beta(m, 0) != P.zero:
            flag("zero", (m, 0))
    report.truncated = len(report.violations) >= limit
    if not report.passed:
        return BilinearReport(report)

    tensor = tensor_product(M, N, config)
    q = tensor.quotient

    def induced(v: Tuple[int, ...]) -> Hashable:
        total = P.zero
        for i, c in enumerate(v):
            if c:
                total = P.add(total, scalar_multiple(c, beta(i // N.n, i % N.n), P))
        return total

    table = {v: induced(v) for v in q.elements(config.cap_sections)}
    factors = all(table[tensor.symbol(m, n)] == beta(m, n) for m in range(M.n) for n in range(N.n))
    factors = factors and all(table[q.add(x, y)] == P.add(table[x], table[y]) for x in table for y in table)
    return BilinearReport(report, table, factors)


# ---------------------------------------------------------------------------
# Tor_1

@dataclass
class TorResult:
    invariant_factors: List[int]
    order: int
    presentation: str
    kernel_order: int = 0
    free_order: int = 0
    relative: bool = True

    def to_dict(self) -> Dict:
        return {
            "invariant_factors": list(self.invariant_factors),
            "order": self.order,
            "presentation": self.presentation,
            "presentation_relative": self.relative,
        }


def tor1_from_presentation(
    K: GammaModule,
    F: GammaModule,
    inclusion: Sequence[int],
    N: GammaModule,
    config: RunConfig = DEFAULT_CONFIG,
    label: str = "",
) -> TorResult:
    """Kernel of the map K (x) N -> F (x) N induced by the inclusion K -> F."""
    KN = tensor_product(K, N, config)
    FN = tensor_product(F, N, config)
    nn = N.n
    dim_f = FN.quotient.dim
    kernel = []
    for v in KN.quotient.elements(config.cap_sections):
        w = np.zeros(dim_f, dtype=np.int64)
        for i, c in enumerate(v):
            if c:
                k, n = divmod(i, nn)
                w[inclusion[k] * nn + n] += c
        if FN.quotient.reduce(w) == FN.quotient.zero:
            kernel.append(v)
    ops = KN.ops()
    factors, order = subquotient_invariants(kernel, [ops.zero], ops)
    logger.info(f"Tor_1 via {label or 'given presentation'}: {factors}")
    return TorResult(factors, order, label, KN.order, FN.order)


def _require_divisor(T: TernarySemiring, m: int) -> int:
    if T.modulus is None:
        raise GammaSpecError("Tor of cyclic modules needs a modular semiring")
    n = T.modulus
    if m < 1 or n % m:
        raise GammaSpecError(f"{m} does not divide {n}")
    return n


def tor1_cyclic(T: TernarySemiring, m: int, N: GammaModule, config: RunConfig = DEFAULT_CONFIG) -> TorResult:
    """Tor_1(Z/m, N) from 0 -> (m) -> T -> Z/m -> 0 with T acting on itself."""
    n = _require_divisor(T, m)
    F = module_from_semiring(T)
    K, inclusion = submodule(F, range(0, n, m))
    return tor1_from_presentation(K, F, inclusion, N, config, f"0 -> ({m}) -> Z/{n} -> Z/{m} -> 0")


def tor1_second_presentation(T: TernarySemiring, m: int, N: GammaModule, config: RunConfig = DEFAULT_CONFIG) -> TorResult:
    """Tor_1(Z/m, N) from T + T -> Z/m, (x, y) -> x + y, with its kernel."""
    n = _require_divisor(T, m)
    F = module_from_semiring(T)
    F2 = direct_sum(F, F)
    members = [x * n + y for x in range(n) for y in range(n) if (x + y) % m == 0]
    K2, inclusion = submodule(F2, members)
    return tor1_from_presentation(K2, F2, inclusion, N, config, f"0 -> K -> Z/{n} + Z/{n} -> Z/{m} -> 0")


@dataclass
class FlatnessReport:
    flat: bool
    witness: Optional[int]
    results: Dict[int, List[int]]

    def to_dict(self) -> Dict:
        return {
            "flat": self.flat,
            "witness": self.witness,
            "tor1": {str(m): f for m, f in sorted(self.results.items())},
        }


def flatness_probe(T: TernarySemiring, N: GammaModule, config: RunConfig = DEFAULT_CONFIG) -> FlatnessReport:
    """Tor_1(Z/m, N) for every divisor m of n; the first nonzero one witnesses non-flatness."""
    n = _require_divisor(T, 1)
    results: Dict[int, List[int]] = {}
    witness = None
    for m in (d for d in range(1, n + 1) if n % d == 0):
        results[m] = tor1_cyclic(T, m, N, config).invariant_factors
        if results[m] and witness is None:
            witness = m
            logger.info(f"Non-flat: Tor_1(Z/{m}, N) = {results[m]}")
    return FlatnessReport(witness is None, witness, results)
