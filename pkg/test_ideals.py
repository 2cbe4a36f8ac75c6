#!/usr/bin/env python3
"""
Tests for ideal enumeration, primality witnesses, the Zariski topology and
the ideal-lattice diagram, centred on Z/12 with Gamma = {1, 5}.
"""

import logging
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from utils import CapExceededError, ImproperPreimageError
from utils.dot import covering_pairs, hasse_diagram
from utils.ideals import (
    basic_open,
    enumerate_ideals,
    ideal_closure,
    ideal_intersection,
    ideal_sum,
    induced_spectrum_map,
    is_discrete,
    is_prime,
    is_t0,
    t0_violation,
    replay_prime_witness,
    spectrum,
    vanishing_set,
    verify_zariski_axioms,
)
from utils.semiring import build_modular, build_modular_hom

# Configure logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=logging.INFO
)
logger = logging.getLogger(__name__)

Z12_IDEALS = [(0,), (0, 6), (0, 4, 8), (0, 3, 6, 9), (0, 2, 4, 6, 8, 10), tuple(range(12))]
P3, P2 = (0, 3, 6, 9), (0, 2, 4, 6, 8, 10)


@pytest.fixture(scope="module")
def z12():
    return build_modular(12, [1, 5])


@pytest.fixture(scope="module")
def z12_spectrum(z12):
    return spectrum(z12)


def test_z12_ideals(z12):
    assert [I.members for I in enumerate_ideals(z12)] == Z12_IDEALS


def test_ideal_closure_and_labels(z12):
    I = ideal_closure(z12, (8,))
    assert I.members == (0, 4, 8)
    assert 4 in I and 6 not in I
    assert ideal_closure(z12, ()).members == (0,)
    assert not ideal_closure(z12, (5,)).is_proper


def test_sum_and_intersection(z12):
    I, J = ideal_closure(z12, (4,)), ideal_closure(z12, (6,))
    assert ideal_sum(z12, [I, J]).members == P2
    assert ideal_intersection(z12, [ideal_closure(z12, (2,)), ideal_closure(z12, (3,))]).members == (0, 6)


@pytest.mark.parametrize("seed, lex_least", [(0, (1, 2, 6, 0)), (6, (1, 2, 3, 0)), (4, (1, 2, 2, 0))])
def test_non_prime_witnesses(z12, seed, lex_least):
    I = ideal_closure(z12, (seed,))
    verdict = is_prime(z12, I)
    assert not verdict
    assert verdict.witness == lex_least
    assert replay_prime_witness(z12, I, verdict.witness)


@pytest.mark.parametrize("seed, witness", [(0, (2, 2, 3, 0)), (6, (2, 3, 1, 0)), (4, (2, 2, 1, 0))])
def test_worked_witnesses_replay(z12, seed, witness):
    assert replay_prime_witness(z12, ideal_closure(z12, (seed,)), witness)


def test_whole_semiring_is_not_prime(z12):
    verdict = is_prime(z12, ideal_closure(z12, (1,)))
    assert not verdict and verdict.reason == "not proper"


def test_z12_spectrum(z12_spectrum):
    S = z12_spectrum
    assert [P.members for P in S.primes] == [P3, P2]
    assert [P.generators for P in S.primes] == [(3,), (2,)]
    assert [sorted(C) for C in S.closed_sets] == [[], [0], [1], [0, 1]]
    assert is_t0(S) and is_discrete(S)
    assert t0_violation(S) is None


def test_z12_basic_opens(z12_spectrum):
    S = z12_spectrum
    assert basic_open(S, 3) == {1}
    assert basic_open(S, 2) == {0}
    assert basic_open(S, 1) == {0, 1}
    assert basic_open(S, 6) == frozenset()
    assert vanishing_set(S, ideal_closure(S.parent, (6,))) == {0, 1}


def test_z2_has_one_prime():
    S = spectrum(build_modular(2, [1]))
    assert [P.members for P in S.primes] == [(0,)]


def test_ideal_cap():
    with pytest.raises(CapExceededError):
        enumerate_ideals(build_modular(30, [1, 7]))


@st.composite
def small_presets(draw):
    n = draw(st.integers(2, 12))
    gamma = draw(st.lists(st.sampled_from([u for u in range(1, n) if gcd(u, n) == 1]), min_size=1, max_size=3, unique=True))
    return n, sorted(gamma)


@settings(max_examples=30, derandomize=True, deadline=None)
@given(small_presets())
def test_zariski_identities_hold(preset):
    S = spectrum(build_modular(*preset))
    report = verify_zariski_axioms(S)
    assert report.passed, report.violations
    # primes of Z/n are generated by the prime divisors of n
    n = preset[0]
    assert len(S.primes) == len({p for p in range(2, n + 1) if n % p == 0 and all(p % q for q in range(2, p))})


def test_zero_map_pulls_back_improperly():
    f = build_modular_hom(build_modular(4, [1]), build_modular(2, [1]), 0)
    with pytest.raises(ImproperPreimageError):
        induced_spectrum_map(f)


def test_projection_pulls_primes_back():
    Z12, Z4 = build_modular(12, [1]), build_modular(4, [1])
    f_star = induced_spectrum_map(build_modular_hom(Z12, Z4, 1))
    assert f_star.continuous
    assert f_star.source_spectrum.primes[f_star(0)].members == P2


def test_inclusion_lattice(z12_spectrum):
    proper = [I for I in z12_spectrum.ideals if I.is_proper]
    covers = {(proper[i].members, proper[j].members) for i, j in covering_pairs(proper)}
    assert covers == {
        ((0,), (0, 6)),
        ((0,), (0, 4, 8)),
        ((0, 4, 8), P2),
        ((0, 6), P2),
        ((0, 6), P3),
    }


def test_hasse_diagram_source(z12_spectrum):
    source = hasse_diagram(z12_spectrum).source
    assert source.startswith("// Gamma-ideal inclusion lattice")
    assert "rankdir=BT" in source
    assert source.count("style=bold") == 2
    assert source.count("->") == 5
    assert hasse_diagram(z12_spectrum, include_whole=True).source.count("->") == 7


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
