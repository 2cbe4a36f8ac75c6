"""
Union-find with path halving, used for equivalence closures of finite
relations (fraction classes and tensor relation cosets).
"""

from typing import Dict, Iterable, List, Tuple


class UnionFind:
    def __init__(self, size: int = 0) -> None:
        self.p: Dict[int, int] = {i: i for i in range(size)}
        self.r: Dict[int, int] = {i: 0 for i in range(size)}

    def find(self, x: int) -> int:
        p = self.p
        if x not in p:
            p[x] = x
            self.r[x] = 0
            return x
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> bool:
        pa, pb = self.find(a), self.find(b)
        if pa == pb:
            return False
        ra, rb = self.r[pa], self.r[pb]
        if ra < rb:
            self.p[pa] = pb
        elif rb < ra:
            self.p[pb] = pa
        else:
            self.p[pb] = pa
            self.r[pa] = ra + 1
        return True

    def classes(self, items: Iterable[int]) -> List[Tuple[int, ...]]:
        """Equivalence classes of items, each sorted, ordered by least member."""
        groups: Dict[int, List[int]] = {}
        for x in items:
            groups.setdefault(self.find(x), []).append(x)
        return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])
