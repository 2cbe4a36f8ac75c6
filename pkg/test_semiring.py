#!/usr/bin/env python3
"""
Tests for the ternary semiring engine: table construction, the exhaustive
axiom scan with replayable witnesses, invertibility and modular homomorphisms.
"""

import logging
from itertools import combinations
from math import gcd

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from utils import CapExceededError, GammaSpecError, TableError
from utils.ideals import induced_spectrum_map, spectrum
from utils.semiring import (
    build_from_tables,
    build_modular,
    build_modular_hom,
    find_gamma_inverse,
    find_isomorphism,
    identity_hom,
    is_gamma_inverse,
    is_strictly_gamma_invertible,
    random_modular_hom_pairs,
    replay_ternary,
    replay_violation,
    ternary_product,
    verify_axioms,
    verify_homomorphism,
)

# Configure logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=logging.INFO
)
logger = logging.getLogger(__name__)


def units(n):
    return [u for u in range(1, n) if gcd(u, n) == 1]


@st.composite
def modular_presets(draw, min_n=2, max_n=12):
    n = draw(st.integers(min_n, max_n))
    gamma = draw(st.lists(st.sampled_from(units(n)), min_size=1, max_size=3, unique=True))
    return n, sorted(gamma)


ALL_PRESETS = [
    (n, list(gamma))
    for n in range(2, 17)
    for size in (1, 2, 3)
    for gamma in combinations(units(n), size)
]


def test_z12_axioms_pass():
    T = build_modular(12, [1, 5])
    report = verify_axioms(T)
    assert report.passed, report.violations[:5]
    assert "associativity" in report.checked
    assert "commutativity_bac" in report.checked
    assert ternary_product(T, 2, 3, 5, 1) == (5 * 2 * 3 * 5) % 12


@pytest.mark.parametrize("n, gamma", ALL_PRESETS)
def test_modular_presets_satisfy_axioms(n, gamma):
    report = verify_axioms(build_modular(n, gamma))
    assert report.passed, report.violations[:5]


@settings(max_examples=1000, derandomize=True, deadline=None)
@given(modular_presets(min_n=3, max_n=16), st.data())
def test_single_entry_mutation_is_caught(preset, data):
    # Z/2 is left out: zeroing its one nonzero product gives another valid semiring
    n, gamma = preset
    T = build_modular(n, gamma)
    add = np.array(T.add_table)
    ter = np.array(T.ternary_tables)
    if data.draw(st.booleans(), label="mutate addition"):
        a, b = data.draw(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), label="cell")
        add[a, b] = data.draw(st.sampled_from([v for v in range(n) if v != add[a, b]]), label="value")
    else:
        g = data.draw(st.integers(0, len(gamma) - 1), label="gamma")
        a, b, c = data.draw(st.tuples(*[st.integers(0, n - 1)] * 3), label="cell")
        ter[g, a, b, c] = data.draw(st.sampled_from([v for v in range(n) if v != ter[g, a, b, c]]), label="value")

    mutated = build_from_tables(add, ter, T.gamma_names)
    report = verify_axioms(mutated, limit=20)
    assert not report.passed
    for axiom, witness in report.violations:
        assert replay_violation(mutated, axiom, witness), (axiom, witness)


def test_report_does_not_depend_on_threads():
    T = build_modular(6, [1, 5])
    ter = np.array(T.ternary_tables)
    ter[1, 2, 3, 4] = 1
    broken = build_from_tables(T.add_table, ter, T.gamma_names)
    single = verify_axioms(broken, limit=50, threads=1)
    pooled = verify_axioms(broken, limit=50, threads=4)
    assert single.to_dict() == pooled.to_dict()


def test_replay_rejects_unknown_axiom():
    with pytest.raises(GammaSpecError):
        replay_violation(build_modular(3, [1]), "no_such_axiom", (0,))


@pytest.mark.parametrize("n, gamma", [(0, [1]), (5, []), (5, [7])])
def test_build_modular_rejects_bad_arguments(n, gamma):
    with pytest.raises(TableError):
        build_modular(n, gamma)


def test_caps_are_enforced():
    with pytest.raises(CapExceededError) as excinfo:
        build_modular(40, [1])
    assert excinfo.value.cap_value == 32


def test_build_from_tables_checks_shapes():
    with pytest.raises(TableError):
        build_from_tables([[0, 1], [1, 0]], np.zeros((1, 3, 3, 3), dtype=int))
    with pytest.raises(TableError):
        build_from_tables([[0, 1], [1, 2]], np.zeros((1, 2, 2, 2), dtype=int))
    with pytest.raises(TableError):
        build_from_tables([[0, 1], [1, 0]], np.zeros((1, 2, 2, 2), dtype=int), gamma_names=["a", "b"])


def test_gamma_invertibility_in_z12():
    T = build_modular(12, [1, 5])
    # 5 * 1 * x * 5 = 25x = x
    assert find_gamma_inverse(T, 5) == (1, 1)
    assert is_gamma_inverse(T, 5, 5, 0)
    assert not is_gamma_inverse(T, 5, 1, 0)
    assert find_gamma_inverse(T, 2) is None
    # no single partner works for gamma 1 and gamma 5 together
    assert not is_strictly_gamma_invertible(T, 5)
    assert is_strictly_gamma_invertible(build_modular(12, [1]), 5)


def test_modular_homomorphisms():
    Z12, Z4 = build_modular(12, [1]), build_modular(4, [1])
    f = build_modular_hom(Z12, Z4, 1)
    assert verify_homomorphism(f).passed
    assert f(7) == 3
    assert verify_homomorphism(identity_hom(Z12)).passed
    with pytest.raises(GammaSpecError):
        build_modular_hom(Z4, Z12, 1)


def test_reduction_z12_to_z6():
    Z12, Z6 = build_modular(12, [1, 5]), build_modular(6, [1, 5])
    f = build_modular_hom(Z12, Z6, 1)
    assert verify_homomorphism(f).passed
    assert f(7) == 1 and f(11) == 5
    assert f.gamma_map == (0, 1)
    f_star = induced_spectrum_map(f)
    assert f_star.continuous
    pulled = {f_star.source_spectrum.primes[f_star(j)].members for j in range(2)}
    assert pulled == {(0, 2, 4, 6, 8, 10), (0, 3, 6, 9)}


def test_broken_map_is_reported():
    Z12, Z4 = build_modular(12, [1]), build_modular(4, [1])
    f = build_modular_hom(Z12, Z4, 1)
    broken = type(f)(Z12, Z4, f.gamma_map, (0,) + f.element_map[1:-1] + (0,))
    report = verify_homomorphism(broken)
    assert not report.passed
    assert {axiom for axiom, _ in report.violations} <= {"additivity", "ternary_compatibility"}


def relabeled(T, perm):
    perm = np.asarray(perm)
    add = np.empty_like(T.add_table)
    ternary = np.empty_like(T.ternary_tables)
    add[np.ix_(perm, perm)] = perm[T.add_table]
    for g in range(T.num_gamma):
        ternary[np.ix_([g], perm, perm, perm)] = perm[T.ternary_tables[g]][None]
    return build_from_tables(add, ternary, T.gamma_names)


def test_isomorphism_search():
    Z5 = build_modular(5, [1])
    B = relabeled(Z5, [0, 3, 1, 4, 2])
    f = find_isomorphism(Z5.add_table, Z5.ternary_tables, B)
    assert f is not None and sorted(f) == list(range(5))
    f = np.asarray(f)
    assert (B.add_table[np.ix_(f, f)] == f[Z5.add_table]).all()
    assert (B.ternary_tables[0][np.ix_(f, f, f)] == f[Z5.ternary_tables[0]]).all()

    Z4 = build_modular(4, [1])
    assert find_isomorphism(Z4.add_table, Z4.ternary_tables, build_modular(4, [3])) is None
    assert find_isomorphism(Z4.add_table, Z4.ternary_tables, Z5) is None


def test_replay_ternary():
    T = build_modular(12, [1, 5])
    assert replay_ternary(T, [(2, 3, 4, 0), (1, 1, 1, 1), (5, 5, 5, 1)]) == [0, 5, 1]


def test_spectrum_is_contravariant_on_random_pairs():
    spectra = {}

    def spec(T):
        if T.modulus not in spectra:
            spectra[T.modulus] = spectrum(T)
        return spectra[T.modulus]

    pairs = random_modular_hom_pairs(np.random.default_rng(0), 100)
    assert len(pairs) == 100
    for f, g in pairs:
        assert verify_homomorphism(f).passed and verify_homomorphism(g).passed
        gf = f.then(g)
        assert verify_homomorphism(gf).passed
        f_star = induced_spectrum_map(f, spec(f.source), spec(f.target))
        g_star = induced_spectrum_map(g, spec(g.source), spec(g.target))
        gf_star = induced_spectrum_map(gf, spec(gf.source), spec(gf.target))
        assert f_star.continuous and g_star.continuous
        for j in range(len(spec(gf.target).primes)):
            assert gf_star(j) == f_star(g_star(j))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
