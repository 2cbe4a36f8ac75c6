"""
Hasse diagram of the ideal-inclusion lattice in DOT form.
"""

from typing import List, Tuple

from graphviz import Digraph

from utils.ideals import GammaIdeal, SpectrumSpace


def covering_pairs(ideals: List[GammaIdeal]) -> List[Tuple[int, int]]:
    """(i, j) with ideal i strictly below ideal j and nothing in between."""
    sets = [frozenset(I.members) for I in ideals]
    below = [[i != j and sets[i] < sets[j] for j in range(len(sets))] for i in range(len(sets))]
    pairs = []
    for i in range(len(sets)):
        for j in range(len(sets)):
            if below[i][j] and not any(below[i][k] and below[k][j] for k in range(len(sets))):
                pairs.append((i, j))
    return pairs


def hasse_diagram(S: SpectrumSpace, include_whole: bool = False) -> Digraph:
    """
    Proper ideals bottom to top, primes drawn bold. The whole semiring is
    left out by default, so the primes are the maximal nodes.
    """
    ideals = [I for I in S.ideals if include_whole or I.is_proper]
    primes = {P.members for P in S.primes}
    G = Digraph(name="ideals", comment="Gamma-ideal inclusion lattice", strict=True)
    G.attr(rankdir="BT")
    for i, I in enumerate(ideals):
        if I.members in primes:
            G.node(f"I{i}", I.label(), shape="box", style="bold")
        else:
            G.node(f"I{i}", I.label())
    for i, j in covering_pairs(ideals):
        G.edge(f"I{i}", f"I{j}", arrowhead="none")
    return G
