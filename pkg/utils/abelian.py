"""
Finite abelian groups from integer presentations.

Two independent routes to invariant factors live here: Smith normal form of
a relation matrix (sympy), and counting element orders of an explicitly
enumerated group.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Hashable, Iterable, Iterator, List, Sequence, Tuple

import numpy as np
from sympy import Matrix, factorint
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from utils import CapExceededError, InfiniteGroupError, InternalConsistencyError

logger = logging.getLogger(__name__)


def extended_gcd(a: int, b: int) -> Tuple[int, int, int]:
    """(g, s, t) with s*a + t*b = g = gcd(a, b) >= 0."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        return -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def smith_invariants(rows: Sequence[Sequence[int]], ncols: int) -> List[int]:
    """
    Invariant factors (all > 1, ascending, each dividing the next) of
    Z^ncols modulo the row span. Raises InfiniteGroupError on a free part.
    """
    if ncols == 0:
        return []
    if not rows:
        raise InfiniteGroupError(f"No relations on {ncols} generator(s)")
    snf = smith_normal_form(Matrix([list(map(int, r)) for r in rows]), domain=ZZ)
    diagonal = [abs(int(snf[i, i])) for i in range(min(snf.shape))]
    if len(diagonal) < ncols or 0 in diagonal:
        raise InfiniteGroupError("Relation matrix does not have full column rank")
    return sorted(d for d in diagonal if d != 1)


def invariants_from_orders(orders: Iterable[int]) -> List[int]:
    """
    Invariant factors of a finite abelian group given the order of every element.
    For each prime p, #{x : p^k x = 0} = p^(sum_i min(k, e_i)) pins down the
    exponents e_i of the p-primary part.
    """
    counts = Counter(orders)
    size = sum(counts.values())
    primary: Dict[int, List[int]] = {}
    for p, top in factorint(size).items():
        logs = []
        for k in range(top + 1):
            killed = sum(c for o, c in counts.items() if (p ** k) % o == 0)
            log = 0
            while killed % p == 0 and killed > 1:
                killed //= p
                log += 1
            logs.append(log)
        parts = []
        for k in range(1, top + 1):
            at_least_k = logs[k] - logs[k - 1]
            parts.append(at_least_k)
        # parts[k-1] = number of exponents >= k
        exponents = []
        for k in range(len(parts), 0, -1):
            more = parts[k - 1] - (parts[k] if k < len(parts) else 0)
            exponents.extend([k] * more)
        primary[p] = sorted(exponents, reverse=True)
    width = max((len(v) for v in primary.values()), default=0)
    factors = []
    for j in range(width):
        d = 1
        for p, exps in primary.items():
            if j < len(exps):
                d *= p ** exps[j]
        factors.append(d)
    return sorted(d for d in factors if d != 1)


# ---------------------------------------------------------------------------
# Lattices and quotients

class LatticeBasis:
    """
    Incrementally maintained triangular basis of a full-rank sublattice of Z^dim.
    Seeded with bound * e_i for every i, so every pivot divides `bound` and
    any vector may be reduced entrywise modulo `bound` without leaving its coset.
    """

    def __init__(self, dim: int, bound: int):
        self.dim = dim
        self.bound = bound
        self.rows: Dict[int, np.ndarray] = {}
        for i in range(dim):
            row = np.zeros(dim, dtype=np.int64)
            row[i] = bound
            self.rows[i] = row

    def insert(self, vector: Sequence[int]) -> None:
        v = np.array(vector, dtype=np.int64) % self.bound
        for i in range(self.dim):
            if v[i] == 0:
                continue
            row = self.rows[i]
            d = int(row[i])
            vi = int(v[i])
            if vi % d == 0:
                v = (v - (vi // d) * row) % self.bound
                continue
            g, s, t = extended_gcd(d, vi)
            pivot = s * row + t * v
            v = ((vi // g) * row - (d // g) * v) % self.bound
            pivot[i + 1:] %= self.bound
            self.rows[i] = pivot

    def insert_all(self, vectors: Iterable[Sequence[int]]) -> None:
        for v in vectors:
            self.insert(v)

    @property
    def diagonal(self) -> List[int]:
        return [int(self.rows[i][i]) for i in range(self.dim)]

    def reduce(self, vector) -> Tuple[int, ...]:
        """Canonical coset representative: 0 <= v_i < d_i for every i."""
        v = np.array(vector, dtype=np.int64)
        for i in range(self.dim):
            row = self.rows[i]
            q = v[i] // row[i]
            if q:
                v = v - q * row
        return tuple(int(x) for x in v)

    def presentation_rows(self) -> Tuple[List[List[int]], List[int]]:
        """
        Square relation matrix on the generators whose pivot exceeds 1.
        Unit pivots are eliminated from the bottom up, which leaves their
        columns zero everywhere except on their own row.
        """
        H = [[int(x) for x in self.rows[i]] for i in range(self.dim)]
        units = [i for i in range(self.dim) if H[i][i] == 1]
        for i in reversed(units):
            for k in range(i):
                c = H[k][i]
                if c:
                    H[k] = [a - c * b for a, b in zip(H[k], H[i])]
        keep = [i for i in range(self.dim) if H[i][i] != 1]
        return [[H[r][c] for c in keep] for r in keep], keep


@dataclass
class LatticeQuotient:
    """Z^dim / L for a full-rank lattice L, with canonical reduced elements."""

    basis: LatticeBasis
    _invariants: List[int] = field(default_factory=list, init=False, repr=False)

    @property
    def dim(self) -> int:
        return self.basis.dim

    @property
    def zero(self) -> Tuple[int, ...]:
        return (0,) * self.dim

    @property
    def order(self) -> int:
        return int(np.prod([d for d in self.basis.diagonal], dtype=object))

    def reduce(self, vector) -> Tuple[int, ...]:
        return self.basis.reduce(vector)

    def add(self, x, y) -> Tuple[int, ...]:
        return self.reduce(np.add(x, y))

    def generator(self, j: int) -> Tuple[int, ...]:
        e = np.zeros(self.dim, dtype=np.int64)
        e[j] = 1
        return self.reduce(e)

    def elements(self, cap: int) -> Iterator[Tuple[int, ...]]:
        if self.order > cap:
            raise CapExceededError("group elements", cap, self.order)
        return (tuple(v) for v in product(*(range(d) for d in self.basis.diagonal)))

    def invariant_factors(self) -> List[int]:
        if not self._invariants and self.order > 1:
            rows, keep = self.basis.presentation_rows()
            self._invariants = smith_invariants(rows, len(keep))
        return list(self._invariants)


# ---------------------------------------------------------------------------
# Explicit finite groups

@dataclass
class GroupOps:
    add: Callable[[Hashable, Hashable], Hashable]
    zero: Hashable


@dataclass
class ChainPresentation:
    """
    Generators g_1..g_r picked greedily, each with its relative order k_i and
    the relation k_i g_i = (combination of earlier generators).
    """

    generators: List[Hashable]
    rows: List[List[int]]
    coordinates: Dict[Hashable, Tuple[int, ...]]

    def coords(self, x: Hashable) -> List[int]:
        c = list(self.coordinates[x])
        return c + [0] * (len(self.generators) - len(c))


def scalar_multiple(k: int, x: Hashable, ops: GroupOps) -> Hashable:
    result, base = ops.zero, x
    while k:
        if k & 1:
            result = ops.add(result, base)
        base = ops.add(base, base)
        k >>= 1
    return result


def chain_presentation(elements: Iterable[Hashable], ops: GroupOps) -> ChainPresentation:
    """Presentation of the finite subgroup whose element set is given."""
    members = sorted(set(elements))
    target = len(members)
    span: Dict[Hashable, Tuple[int, ...]] = {ops.zero: ()}
    generators: List[Hashable] = []
    rows: List[List[int]] = []
    for x in members:
        if len(span) >= target:
            break
        if x in span:
            continue
        k, y = 1, x
        while y not in span:
            y = ops.add(y, x)
            k += 1
            if k > target:
                raise InternalConsistencyError("Element set is not closed under addition")
        prior = list(span[y]) + [0] * (len(generators) - len(span[y]))
        for r in rows:
            r.append(0)
        rows.append([-c for c in prior] + [k])
        grown: Dict[Hashable, Tuple[int, ...]] = {}
        for s, cs in span.items():
            cs = cs + (0,) * (len(generators) - len(cs))
            z = s
            for j in range(k):
                grown.setdefault(z, cs + (j,))
                z = ops.add(z, x)
        span = grown
        generators.append(x)
    if len(span) != target:
        raise InternalConsistencyError(f"Chain spans {len(span)} elements, expected {target}")
    return ChainPresentation(generators, rows, span)


def subquotient_invariants(
    sub: Iterable[Hashable], quotient_by: Iterable[Hashable], ops: GroupOps
) -> Tuple[List[int], int]:
    """
    Invariant factors and order of A/B, for finite element sets B within A.
    A is presented by its generator chain, B contributes the coordinates of
    its own chain generators, and the result is read off by Smith normal form.
    """
    A = set(sub)
    B = set(quotient_by)
    if not B <= A:
        raise InternalConsistencyError("Quotient subgroup is not contained in the group")
    pres = chain_presentation(A, ops)
    rows = [list(r) for r in pres.rows]
    for b in chain_presentation(B, ops).generators:
        rows.append(pres.coords(b))
    factors = smith_invariants(rows, len(pres.generators)) if pres.generators else []
    order = len(A) // len(B)
    if int(np.prod(factors, dtype=object)) != order or len(A) % len(B):
        raise InternalConsistencyError(f"Invariant factors {factors} disagree with |A|/|B| = {len(A)}/{len(B)}")
    return factors, order


def element_order(x: Hashable, ops: GroupOps, bound: int) -> int:
    k, y = 1, x
    while y != ops.zero:
        y = ops.add(y, x)
        k += 1
        if k > bound:
            raise InternalConsistencyError("Element order exceeds the group order")
    return k
