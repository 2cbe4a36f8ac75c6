#!/usr/bin/env python3
"""
Tests for multiplicative systems and fraction classes under both couplings
of the cubic-scaling relation, plus the universal property of S^-1 T.
"""

import logging
from math import gcd

import pytest
from hypothesis import given, settings, strategies as st

from utils import DegenerateSystemError, GammaSpecError, NotPrimeError
from utils.config import AdditionRule, Coupling, RunConfig
from utils.ideals import ideal_closure, spectrum
from utils.localization import (
    MultiplicativeSystem,
    check_complement_stability,
    check_universal_property,
    generated_mult_system,
    is_multiplicative_system,
    localize,
    localize_at_prime,
    replay_equivalence,
)
from utils.semiring import build_modular, build_modular_hom, find_isomorphism, identity_hom

# Configure logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=logging.INFO
)
logger = logging.getLogger(__name__)

FREE = RunConfig(coupling=Coupling.FREE)
MATCHED = RunConfig(coupling=Coupling.MATCHED)


@pytest.fixture(scope="module")
def z12():
    return build_modular(12, [1, 5])


@pytest.fixture(scope="module")
def z12_primes(z12):
    S = spectrum(z12)
    return S.primes


def test_multiplicative_systems(z12):
    assert is_multiplicative_system(z12, [1, 5])
    verdict = is_multiplicative_system(z12, [2])
    assert not verdict and verdict.witness == (2, 2, 2, 0)
    assert is_multiplicative_system(z12, [0, 1]).contains_zero


def test_generated_systems(z12):
    assert generated_mult_system(z12, [5]).members == (1, 5)
    assert generated_mult_system(z12, [2]).members == (2, 4, 8)
    with pytest.raises(DegenerateSystemError):
        generated_mult_system(z12, [6])
    with pytest.raises(DegenerateSystemError):
        generated_mult_system(z12, [0])


def test_units_localization_depends_on_coupling(z12):
    S = MultiplicativeSystem(z12, (1, 5))
    free = localize(z12, S, FREE)
    assert free.num_classes == 8
    assert not free.addition_supported
    matched = localize(z12, S, MATCHED)
    assert matched.num_classes == 12
    assert all(g is not None for g in matched.local_units.values())


@pytest.mark.parametrize("config", [FREE, MATCHED])
def test_localization_at_p2(z12, z12_primes, config):
    assert localize_at_prime(z12, z12_primes[1], config).num_classes == 4


def test_localization_at_p3(z12, z12_primes):
    assert localize_at_prime(z12, z12_primes[0], FREE).num_classes == 2
    assert localize_at_prime(z12, z12_primes[0], MATCHED).num_classes == 3


def test_refuses_non_prime(z12):
    with pytest.raises(NotPrimeError) as excinfo:
        localize_at_prime(z12, ideal_closure(z12, (6,)))
    assert excinfo.value.witness == (1, 2, 3, 0)


def test_refuses_non_system(z12):
    with pytest.raises(GammaSpecError):
        localize(z12, MultiplicativeSystem(z12, (2,)))


def test_report_records_rule_and_failure(z12):
    report = localize(z12, MultiplicativeSystem(z12, (1, 5)), FREE).to_dict()
    assert report["coupling"] == "free"
    assert report["addition_rule"] == "cubic"
    assert report["addition_failure"]["kind"] in {
        "denominator_outside_system", "representative_dependence", "commutativity", "associativity", "zero_identity",
    }
    assert sum(len(c) for c in report["classes"]) == 12 * 2


def test_squared_rule_is_checked_too(z12, z12_primes):
    config = MATCHED.override(addition=AdditionRule.SQUARED)
    L = localize_at_prime(z12, z12_primes[1], config)
    assert L.addition.rule == AdditionRule.SQUARED
    assert L.addition_supported == (L.addition.failure is None)


def test_direct_equivalence_witness(z12):
    S = MultiplicativeSystem(z12, (1, 5))
    assert replay_equivalence(z12, S, (1, 1), (5, 5), Coupling.MATCHED) == (1, 0, 0, 0)
    assert replay_equivalence(z12, S, (1, 1), (2, 1), Coupling.MATCHED) is None


@st.composite
def small_presets(draw):
    n = draw(st.integers(2, 12))
    gamma = draw(st.lists(st.sampled_from([u for u in range(1, n) if gcd(u, n) == 1]), min_size=1, max_size=3, unique=True))
    return n, sorted(gamma)


def fixes_every_class(L, T, s, partner, g):
    """Replays {s/s, partner, x/y}_g = x/y on representatives through the source tables."""
    a, t = partner
    ter = T.ternary_tables[g]
    return all(
        L.class_of(int(ter[s, a, x]), int(ter[s, t, y])) == L.class_of(x, y)
        for x in range(T.n)
        for y in L.system.members
    )


@settings(max_examples=20, derandomize=True, deadline=None)
@given(small_presets(), st.sampled_from([Coupling.FREE, Coupling.MATCHED]))
def test_prime_localizations_are_consistent(preset, coupling):
    T = build_modular(*preset)
    config = RunConfig(coupling=coupling)
    for P in spectrum(T, config).primes:
        assert check_complement_stability(T, P)
        # raises on a representative-dependent product
        L = localize_at_prime(T, P, config)
        assert isinstance(L.raw_relation_transitive, bool)
        assert L.fractions.closure_added_pairs >= 0
        assert len(L.canonical_map) == T.n
        for s in L.system.members:
            g = L.local_units[s]
            if g is None:
                assert not any(fixes_every_class(L, T, s, (s, s), h) for h in range(T.num_gamma))
            else:
                assert fixes_every_class(L, T, s, (s, s), g)
            # s/s always has a ternary inverse, even where it is not a two-sided unit
            e, h = L.local_inverses[s]
            assert fixes_every_class(L, T, s, L.classes[e][0], h)


def test_local_units_fail_in_z7():
    # class x/t carries the value x t^-3, so {s/s, s/s, x/y} multiplies by s^-4
    T = build_modular(7, [1])
    L = localize_at_prime(T, spectrum(T).primes[0])
    assert L.num_classes == 7 and L.addition_supported
    assert L.local_units == {1: 0, 2: None, 3: None, 4: None, 5: None, 6: 0}
    for s, (e, g) in L.local_inverses.items():
        x, t = L.classes[e][0]
        assert g == 0 and (x * pow(t, -3, 7)) % 7 == (s * s) % 7
    report = L.to_dict()
    assert report["local_units"]["2"] is None and report["local_inverses"]["2"] is not None


def test_no_local_unit_in_z5_with_gamma_2():
    T = build_modular(5, [2])
    L = localize_at_prime(T, spectrum(T).primes[0])
    assert all(g is None for g in L.local_units.values())
    assert all(w is not None for w in L.local_inverses.values())


@pytest.mark.parametrize("index", [0, 1])
def test_local_units_hold_at_z12_primes(z12, z12_primes, index):
    L = localize_at_prime(z12, z12_primes[index])
    assert set(L.local_units.values()) == {0}


def test_universal_property_for_units():
    T = build_modular(12, [1])
    report = check_universal_property(T, MultiplicativeSystem(T, (1, 5)), identity_hom(T), MATCHED)
    assert report.verdict == "unique"
    assert report.additive
    assert len(report.factorizations) == 1


def test_universal_property_precondition():
    T = build_modular(12, [1])
    report = check_universal_property(T, generated_mult_system(T, [2]), identity_hom(T))
    assert report.verdict == "precondition"
    assert report.non_invertible == [2, 4, 8]


def test_default_coupling_reproduces_units_localization(z12):
    assert RunConfig().coupling == Coupling.MATCHED
    S = MultiplicativeSystem(z12, (1, 5))
    L = localize(z12, S)
    assert L.num_classes == 12 and L.addition_supported
    assert find_isomorphism(z12.add_table, z12.ternary_tables, L.as_semiring()) is not None
    report = check_universal_property(z12, S, identity_hom(z12))
    assert report.verdict == "unique"
    assert report.additive
    assert len(report.factorizations) == 1


@pytest.mark.parametrize("config, additive", [(FREE, False), (MATCHED, True)])
def test_universal_property_into_z2(z12, config, additive):
    # 1 and 5 both reduce to gamma 1 in Z/2
    f = build_modular_hom(z12, build_modular(2, [1]), 1)
    assert f.gamma_map == (0, 0)
    report = check_universal_property(z12, MultiplicativeSystem(z12, (1, 5)), f, config)
    assert report.verdict == "unique"
    assert report.additive == additive


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
