"""
Finite commutative ternary Gamma-semirings.
Tables are fully materialized numpy arrays indexed by dense element indices,
with index 0 as the additive zero.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from utils import CapExceededError, GammaSpecError, TableError
from utils.config import DEFAULT_CONFIG, RunConfig

logger = logging.getLogger(__name__)

Witness = Tuple[int, ...]
Violation = Tuple[str, Witness]

# bac and acb generate the rest; all five are checked
PERMUTATION_AXIOMS = {
    "commutativity_" + "".join("abc"[i] for i in perm): perm
    for perm in permutations(range(3))
    if perm != (0, 1, 2)
}


@dataclass(frozen=True, eq=False)
class TernarySemiring:
    """Carrier {0..n-1}, an addition table and one ternary table per gamma."""

    add_table: np.ndarray
    ternary_tables: np.ndarray
    gamma_names: Tuple[str, ...]
    element_names: Optional[Tuple[str, ...]] = None
    modulus: Optional[int] = None
    gamma_values: Optional[Tuple[int, ...]] = None

    @property
    def n(self) -> int:
        return int(self.add_table.shape[0])

    @property
    def num_gamma(self) -> int:
        return int(self.ternary_tables.shape[0])

    def name(self, a: int) -> str:
        if self.element_names:
            return self.element_names[a]
        return str(a)

    def same_tables(self, other: "TernarySemiring") -> bool:
        return (
            self.add_table.shape == other.add_table.shape
            and self.ternary_tables.shape == other.ternary_tables.shape
            and bool(np.array_equal(self.add_table, other.add_table))
            and bool(np.array_equal(self.ternary_tables, other.ternary_tables))
        )

    def describe(self) -> Dict:
        if self.modulus is not None:
            return {"kind": "modular", "n": self.modulus, "gamma": list(self.gamma_values or ())}
        return {"kind": "tables", "n": self.n, "gamma_names": list(self.gamma_names)}


@dataclass
class AxiomReport:
    """Outcome of an exhaustive check; every violation carries a replayable witness."""

    violations: List[Violation] = field(default_factory=list)
    checked: List[str] = field(default_factory=list)
    truncated: bool = False

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def to_dict(self) -> Dict:
        return {
            "verdict": self.verdict,
            "checked": list(self.checked),
            "truncated": self.truncated,
            "violations": [{"axiom": axiom, "witness": list(w)} for axiom, w in self.violations],
        }


def _check_caps(n: int, num_gamma: int, config: RunConfig) -> None:
    if n > config.cap_carrier:
        raise CapExceededError("carrier", config.cap_carrier, n)
    if num_gamma > config.cap_gamma:
        raise CapExceededError("gamma", config.cap_gamma, num_gamma)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array, dtype=np.int64)
    array.setflags(write=False)
    return array


def build_modular(n: int, gamma: Sequence[int], config: RunConfig = DEFAULT_CONFIG) -> TernarySemiring:
    """
    Build Z/nZ with {abc}_g = g*a*b*c mod n for each g in gamma.

    Args:
        n: Modulus, at least 1
        gamma: Residues mod n, one ternary table each

    Returns:
        The modular ternary Gamma-semiring
    """
    if n < 1:
        raise TableError(f"Modulus must be positive, got {n}")
    if not gamma:
        raise TableError("Gamma list must not be empty")
    for g in gamma:
        if not 0 <= g < n:
            raise TableError(f"Gamma value {g} is not a residue mod {n}")
    _check_caps(n, len(gamma), config)

    ar = np.arange(n, dtype=np.int64)
    add = (ar[:, None] + ar[None, :]) % n
    abc = ar[:, None, None] * ar[None, :, None] * ar[None, None, :]
    ternary = np.stack([(g * abc) % n for g in gamma])
    return TernarySemiring(
        add_table=_frozen(add),
        ternary_tables=_frozen(ternary),
        gamma_names=tuple(str(g) for g in gamma),
        modulus=n,
        gamma_values=tuple(int(g) for g in gamma),
    )


def build_from_tables(
    add_table,
    ternary_tables,
    gamma_names: Optional[Sequence[str]] = None,
    element_names: Optional[Sequence[str]] = None,
    config: RunConfig = DEFAULT_CONFIG,
) -> TernarySemiring:
    """
    Store explicit tables verbatim. Axioms are NOT verified here, so
    counterexample tables can be represented; call verify_axioms for that.
    """
    try:
        add = np.asarray(add_table, dtype=np.int64)
        ternary = np.asarray(ternary_tables, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise TableError(f"Tables are not rectangular integer arrays: {e}") from e

    if add.ndim != 2 or add.shape[0] != add.shape[1] or add.shape[0] < 1:
        raise TableError(f"Addition table must be n x n, got shape {add.shape}")
    n = add.shape[0]
    if ternary.ndim != 4 or ternary.shape[1:] != (n, n, n) or ternary.shape[0] < 1:
        raise TableError(f"Ternary tables must be |Gamma| x {n} x {n} x {n}, got shape {ternary.shape}")
    if add.min() < 0 or add.max() >= n or ternary.min() < 0 or ternary.max() >= n:
        raise TableError(f"Table entry outside 0..{n - 1}")

    num_gamma = ternary.shape[0]
    names = tuple(gamma_names) if gamma_names else tuple(str(i) for i in range(num_gamma))
    if len(names) != num_gamma:
        raise TableError(f"{len(names)} gamma names for {num_gamma} ternary tables")
    if element_names is not None and len(element_names) != n:
        raise TableError(f"{len(element_names)} element names for carrier of size {n}")
    _check_caps(n, num_gamma, config)

    return TernarySemiring(
        add_table=_frozen(add),
        ternary_tables=_frozen(ternary),
        gamma_names=names,
        element_names=tuple(element_names) if element_names is not None else None,
    )


def ternary_product(T: TernarySemiring, a: int, b: int, c: int, gamma: int) -> int:
    """Table lookup of {abc}_gamma."""
    n = T.n
    if not all(0 <= x < n for x in (a, b, c)) or not 0 <= gamma < T.num_gamma:
        raise TableError(f"Index out of range: ({a}, {b}, {c}, gamma={gamma})")
    return int(T.ternary_tables[gamma, a, b, c])


# ---------------------------------------------------------------------------
# Axiom verification

def _witnesses(mask: np.ndarray, prefix: Witness, budget: int) -> List[Witness]:
    found = []
    for idx in np.argwhere(mask)[:budget]:
        found.append(prefix + tuple(int(i) for i in idx))
    return found


def _permuted_index(xs: Sequence[int], perm: Tuple[int, ...]) -> Tuple[int, ...]:
    # Same index mapping as ndarray.transpose with axes perm
    out = [0, 0, 0]
    for k, p in enumerate(perm):
        out[p] = xs[k]
    return tuple(out)


def _associativity_chunk(T: TernarySemiring, g: int, h: int, a: int) -> np.ndarray:
    # {a b {cde}_g}_h  versus  {{abc}_g d e}_h, for fixed a; axes (b, c, d, e)
    n = T.n
    ar = np.arange(n)
    inner = T.ternary_tables[g]
    outer = T.ternary_tables[h]
    left = outer[a][ar[:, None, None, None], inner[None, :, :, :]]
    right = outer[inner[a][:, :, None, None], ar[None, None, :, None], ar[None, None, None, :]]
    return left != right


def verify_axioms(T: TernarySemiring, limit: Optional[int] = None, threads: int = 1) -> AxiomReport:
    """
    Exhaustively check every semiring axiom over the whole carrier and Gamma.

    Checks run cheapest first and stop once `limit` violations are collected.
    Within each axiom the witnesses come out in lexicographic order, so the
    report does not depend on the number of worker threads.
    """
    limit = limit or DEFAULT_CONFIG.violation_limit
    n, G = T.n, T.num_gamma
    add, ter = T.add_table, T.ternary_tables
    ar = np.arange(n)
    report = AxiomReport()
    logger.info(f"Verifying axioms for carrier {n}, |Gamma|={G}")

    def record(axiom: str, mask: np.ndarray, prefix: Witness = ()) -> bool:
        if axiom not in report.checked:
            report.checked.append(axiom)
        budget = limit - len(report.violations)
        report.violations.extend((axiom, w) for w in _witnesses(mask, prefix, budget))
        if len(report.violations) >= limit:
            report.truncated = True
            return True
        return False

    def run_checks() -> None:
        identity = (add[:, 0] != ar) | (add[0, :] != ar)
        if record("add_identity", identity):
            return
        if record("add_commutativity", add != add.T):
            return
        assoc = add[add[:, :, None], ar[None, None, :]] != add[ar[:, None, None], add[None, :, :]]
        if record("add_associativity", assoc):
            return
        if record("zero_absorption", ter[:, :, 0, :] != 0):
            return
        for name, perm in PERMUTATION_AXIOMS.items():
            if record(name, ter != ter.transpose((0,) + tuple(p + 1 for p in perm))):
                return
        for g in range(G):
            t = ter[g]
            slot1 = t[add[:, :, None, None], ar[None, None, :, None], ar[None, None, None, :]] != add[t[:, None], t[None, :]]
            if record("distributivity_1", slot1, (g,)):
                return
        for g in range(G):
            t = ter[g]
            slot2 = t[ar[:, None, None, None], add[None, :, :, None], ar[None, None, None, :]] != add[t[:, :, None, :], t[:, None, :, :]]
            if record("distributivity_2", slot2, (g,)):
                return
        for g in range(G):
            t = ter[g]
            slot3 = t[ar[:, None, None, None], ar[None, :, None, None], add[None, None, :, :]] != add[t[:, :, :, None], t[:, :, None, :]]
            if record("distributivity_3", slot3, (g,)):
                return
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            for g in range(G):
                for h in range(G):
                    # map() yields in submission order, keeping witnesses sorted by a
                    chunks = pool.map(lambda a, g=g, h=h: _associativity_chunk(T, g, h, a), range(n))
                    for a, mask in enumerate(chunks):
                        if record("associativity", mask, (g, h, a)):
                            return

    run_checks()
    report.violations.sort()
    if report.passed:
        logger.info("All axioms hold")
    else:
        logger.warning(f"Axiom verification found {len(report.violations)} violation(s)")
    return report


def replay_violation(T: TernarySemiring, axiom: str, witness: Witness) -> bool:
    """Return True if the witness reproduces a violation of the axiom."""
    add, ter = T.add_table, T.ternary_tables
    if axiom == "add_identity":
        (a,) = witness
        return add[a, 0] != a or add[0, a] != a
    if axiom == "add_commutativity":
        a, b = witness
        return add[a, b] != add[b, a]
    if axiom == "add_associativity":
        a, b, c = witness
        return add[add[a, b], c] != add[a, add[b, c]]
    if axiom == "zero_absorption":
        g, a, b = witness
        return ter[g, a, 0, b] != 0
    if axiom in PERMUTATION_AXIOMS:
        g, *xs = witness
        permuted = _permuted_index(xs, PERMUTATION_AXIOMS[axiom])
        return ter[(g, *xs)] != ter[(g, *permuted)]
    if axiom == "distributivity_1":
        g, a, a2, b, c = witness
        return ter[g, add[a, a2], b, c] != add[ter[g, a, b, c], ter[g, a2, b, c]]
    if axiom == "distributivity_2":
        g, a, b, b2, c = witness
        return ter[g, a, add[b, b2], c] != add[ter[g, a, b, c], ter[g, a, b2, c]]
    if axiom == "distributivity_3":
        g, a, b, c, c2 = witness
        return ter[g, a, b, add[c, c2]] != add[ter[g, a, b, c], ter[g, a, b, c2]]
    if axiom == "associativity":
        g, h, a, b, c, d, e = witness
        return ter[h, a, b, ter[g, c, d, e]] != ter[h, ter[g, a, b, c], d, e]
    raise GammaSpecError(f"Unknown axiom {axiom!r}")


# ---------------------------------------------------------------------------
# Invertibility

def is_gamma_inverse(T: TernarySemiring, s: int, s_bar: int, gamma: int) -> bool:
    """True if x -> {s, s_bar, x}_gamma is the identity of the carrier."""
    return bool(np.array_equal(T.ternary_tables[gamma, s, s_bar], np.arange(T.n)))


def find_gamma_inverse(T: TernarySemiring, s: int) -> Optional[Tuple[int, int]]:
    """
    Search for (s_bar, gamma) with {s, s_bar, x}_gamma = x for every x.
    Candidates are tried by ascending s_bar, then ascending gamma.
    """
    identity = np.arange(T.n)
    for s_bar in range(T.n):
        for g in range(T.num_gamma):
            if np.array_equal(T.ternary_tables[g, s, s_bar], identity):
                return s_bar, g
    return None


def is_strictly_gamma_invertible(T: TernarySemiring, s: int) -> bool:
    """One partner s_bar that works for every gamma at once."""
    identity = np.arange(T.n)
    return any(
        np.array_equal(T.ternary_tables[:, s, s_bar], np.broadcast_to(identity, (T.num_gamma, T.n)))
        for s_bar in range(T.n)
    )


# ---------------------------------------------------------------------------
# Homomorphisms

@dataclass(frozen=True, eq=False)
class TGHomomorphism:
    source: TernarySemiring
    target: TernarySemiring
    gamma_map: Tuple[int, ...]
    element_map: Tuple[int, ...]

    def __post_init__(self):
        if len(self.element_map) != self.source.n:
            raise TableError(f"Element map has {len(self.element_map)} entries for carrier {self.source.n}")
        if len(self.gamma_map) != self.source.num_gamma:
            raise TableError(f"Gamma map has {len(self.gamma_map)} entries for {self.source.num_gamma} gammas")
        if any(not 0 <= y < self.target.n for y in self.element_map):
            raise TableError("Element map leaves the target carrier")
        if any(not 0 <= g < self.target.num_gamma for g in self.gamma_map):
            raise TableError("Gamma map leaves the target Gamma")

    def __call__(self, a: int) -> int:
        return self.element_map[a]

    def then(self, other: "TGHomomorphism") -> "TGHomomorphism":
        """Composite other o self."""
        if other.source is not self.target and not other.source.same_tables(self.target):
            raise TableError("Cannot compose: target and source differ")
        return TGHomomorphism(
            source=self.source,
            target=other.target,
            gamma_map=tuple(other.gamma_map[g] for g in self.gamma_map),
            element_map=tuple(other.element_map[a] for a in self.element_map),
        )


def identity_hom(T: TernarySemiring) -> TGHomomorphism:
    return TGHomomorphism(T, T, tuple(range(T.num_gamma)), tuple(range(T.n)))


def map_violations(
    src_add: Optional[np.ndarray],
    src_ter: np.ndarray,
    tgt_add: Optional[np.ndarray],
    tgt_ter: np.ndarray,
    gamma_map: Sequence[int],
    element_map: Sequence[int],
    limit: int,
) -> List[Violation]:
    """Structure-preservation failures of an element map between table-described algebras."""
    em = np.asarray(element_map, dtype=np.int64)
    gm = np.asarray(gamma_map, dtype=np.int64)
    violations: List[Violation] = []
    if em[0] != 0:
        violations.append(("zero_preservation", ()))
    if src_add is not None and tgt_add is not None:
        mask = em[src_add] != tgt_add[em[:, None], em[None, :]]
        violations.extend(("additivity", w) for w in _witnesses(mask, (), limit))
    for g in range(src_ter.shape[0]):
        image = tgt_ter[gm[g]][em[:, None, None], em[None, :, None], em[None, None, :]]
        mask = em[src_ter[g]] != image
        violations.extend(("ternary_compatibility", w) for w in _witnesses(mask, (g,), limit))
        if len(violations) >= limit:
            break
    return violations[:limit]


def verify_homomorphism(f: TGHomomorphism, limit: Optional[int] = None) -> AxiomReport:
    """Exhaustive check of zero preservation, additivity and ternary compatibility."""
    limit = limit or DEFAULT_CONFIG.violation_limit
    report = AxiomReport(checked=["zero_preservation", "additivity", "ternary_compatibility"])
    report.violations = map_violations(
        f.source.add_table, f.source.ternary_tables, f.target.add_table, f.target.ternary_tables, f.gamma_map, f.element_map, limit
    )
    report.truncated = len(report.violations) >= limit
    report.violations.sort()
    return report


def build_modular_hom(source: TernarySemiring, target: TernarySemiring, k: int) -> TGHomomorphism:
    """
    The map a -> k*a mod m between modular semirings Z/n -> Z/m.
    Each source gamma goes to the least target gamma g' with k*g = g'*k^3 (mod m).
    """
    if source.modulus is None or target.modulus is None:
        raise TableError("Modular homomorphisms need modular source and target")
    n, m = source.modulus, target.modulus
    if (k * n) % m != 0:
        raise GammaSpecError(f"a -> {k}a is not well defined from Z/{n} to Z/{m}")
    gamma_map = []
    for g in source.gamma_values or ():
        matches = [j for j, g2 in enumerate(target.gamma_values or ()) if (k * g - g2 * k ** 3) % m == 0]
        if not matches:
            raise GammaSpecError(f"No target gamma matches source gamma {g} under a -> {k}a")
        gamma_map.append(matches[0])
    return TGHomomorphism(source, target, tuple(gamma_map), tuple((k * a) % m for a in range(n)))


def enumerate_homomorphisms(
    src_add: Optional[np.ndarray],
    src_ter: np.ndarray,
    target: TernarySemiring,
    gamma_map: Sequence[int],
    fixed: Optional[Dict[int, int]] = None,
    injective: bool = False,
    cap: int = DEFAULT_CONFIG.cap_homs,
    stop_after: Optional[int] = None,
) -> List[Tuple[int, ...]]:
    """
    All element maps from a table-described source into `target` that respect
    zero, addition (when src_add is given) and the ternary tables under gamma_map.
    Backtracking over elements in ascending order; partial assignments are
    pruned on every constraint whose inputs and output are already assigned.
    """
    k = src_ter.shape[1]
    G = src_ter.shape[0]
    tadd, tter = target.add_table, target.ternary_tables
    fixed = dict(fixed or {})
    fixed.setdefault(0, 0)
    if fixed[0] != 0:
        return []

    sums_to: Dict[int, List[Tuple[int, int]]] = {x: [] for x in range(k)}
    if src_add is not None:
        for a in range(k):
            for b in range(k):
                sums_to[int(src_add[a, b])].append((a, b))
    products_to: Dict[int, List[Tuple[int, int, int, int]]] = {x: [] for x in range(k)}
    for g, a, b, c in np.ndindex(src_ter.shape):
        products_to[int(src_ter[g, a, b, c])].append((g, a, b, c))
    involving: Dict[int, List[Tuple[int, int, int, int]]] = {x: [] for x in range(k)}
    for g, a, b, c in np.ndindex(src_ter.shape):
        for x in {a, b, c}:
            involving[x].append((g, a, b, c))

    val = [-1] * k

    def consistent(x: int) -> bool:
        if src_add is not None:
            for b in range(k):
                if val[b] < 0:
                    continue
                r = int(src_add[x, b])
                if val[r] >= 0 and val[r] != tadd[val[x], val[b]]:
                    return False
            for a, b in sums_to[x]:
                if val[a] >= 0 and val[b] >= 0 and val[x] != tadd[val[a], val[b]]:
                    return False
        for g, a, b, c in involving[x]:
            if val[a] < 0 or val[b] < 0 or val[c] < 0:
                continue
            r = int(src_ter[g, a, b, c])
            if val[r] >= 0 and val[r] != tter[gamma_map[g], val[a], val[b], val[c]]:
                return False
        for g, a, b, c in products_to[x]:
            if val[a] >= 0 and val[b] >= 0 and val[c] >= 0:
                if val[x] != tter[gamma_map[g], val[a], val[b], val[c]]:
                    return False
        return True

    for x, y in sorted(fixed.items()):
        val[x] = y
    if injective and len(set(fixed.values())) != len(fixed):
        return []
    for x in sorted(fixed):
        if not consistent(x):
            return []

    free = [x for x in range(k) if x not in fixed]
    found: List[Tuple[int, ...]] = []

    def search(pos: int) -> bool:
        if pos == len(free):
            candidate = tuple(val)
            if not map_violations(src_add, src_ter, tadd, tter, gamma_map, candidate, 1):
                found.append(candidate)
                if len(found) > cap:
                    raise CapExceededError("homomorphisms", cap, len(found))
                if stop_after is not None and len(found) >= stop_after:
                    return True
            return False
        x = free[pos]
        used = {v for v in val if v >= 0} if injective else set()
        for y in range(target.n):
            if y in used:
                continue
            val[x] = y
            if consistent(x) and search(pos + 1):
                return True
            val[x] = -1
        return False

    search(0)
    logger.debug(f"Homomorphism search over {k} elements found {len(found)} map(s)")
    return found


def find_isomorphism(
    src_add: Optional[np.ndarray],
    src_ter: np.ndarray,
    target: TernarySemiring,
    gamma_map: Optional[Sequence[int]] = None,
) -> Optional[Tuple[int, ...]]:
    """A bijective structure-preserving element map, or None."""
    if src_ter.shape[1] != target.n:
        return None
    gamma_map = tuple(gamma_map) if gamma_map is not None else tuple(range(src_ter.shape[0]))
    maps = enumerate_homomorphisms(src_add, src_ter, target, gamma_map, injective=True, stop_after=1)
    return maps[0] if maps else None


def replay_ternary(T: TernarySemiring, triples: Iterable[Tuple[int, int, int, int]]) -> List[int]:
    """Evaluate (a, b, c, gamma) tuples; convenience for witness display."""
    return [ternary_product(T, a, b, c, g) for a, b, c, g in triples]


def _square_roots_of_one(m: int) -> List[int]:
    return [k for k in range(1, m) if (k * k) % m == 1] or [1 % m]


def random_modular_hom_pairs(
    rng: np.random.Generator, count: int, max_n: int = 12, config: RunConfig = DEFAULT_CONFIG
) -> List[Tuple[TGHomomorphism, TGHomomorphism]]:
    """
    Composable pairs Z/n -> Z/m -> Z/p (p | m | n, Gamma = {1}) of maps a -> k*a
    with k a unit squaring to 1, so that every gamma condition holds and
    primes pull back to proper ideals.
    """
    semirings: Dict[int, TernarySemiring] = {}

    def ring(n: int) -> TernarySemiring:
        if n not in semirings:
            semirings[n] = build_modular(n, [1], config)
        return semirings[n]

    pairs = []
    while len(pairs) < count:
        n = int(rng.integers(2, max_n + 1))
        m = int(rng.choice([d for d in range(2, n + 1) if n % d == 0]))
        p = int(rng.choice([d for d in range(2, m + 1) if m % d == 0]))
        f = build_modular_hom(ring(n), ring(m), int(rng.choice(_square_roots_of_one(m))))
        g = build_modular_hom(ring(m), ring(p), int(rng.choice(_square_roots_of_one(p))))
        pairs.append((f, g))
    return pairs
