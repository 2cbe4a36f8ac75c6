#!/usr/bin/env python3
"""
Tests for Gamma-modules, module localization and the structure and module
sheaves on Spec of Z/12 with Gamma = {1, 5}.
"""

import logging

import numpy as np
import pytest

from utils import DegenerateSystemError, GammaSpecError
from utils.config import Coupling, RunConfig
from utils.ideals import basic_open, spectrum
from utils.localization import MultiplicativeSystem
from utils.modules import (
    GammaModule,
    associated_sheaf_sections,
    build_modular_module,
    direct_sum,
    localize_module,
    module_from_semiring,
    stalk_identification,
    submodule,
    verify_module_axioms,
    zero_module,
)
from utils.semiring import build_modular
from utils.sheaf import (
    Sheaf,
    check_restriction_action,
    compare_basic_sections,
    open_set,
    restrict,
    sections,
    stalk,
    verify_sheaf_axioms,
    whole_space,
)

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
def z12_spectrum(z12):
    return spectrum(z12)


# ---------------------------------------------------------------------------
# Modules

@pytest.mark.parametrize("m", [1, 2, 3, 4, 6, 12])
def test_cyclic_modules_satisfy_axioms(z12, m):
    M = build_modular_module(z12, m)
    assert M.n == m and M.group_complete
    assert verify_module_axioms(M).passed


def test_derived_modules_satisfy_axioms(z12):
    T = module_from_semiring(z12)
    assert verify_module_axioms(T).passed
    assert verify_module_axioms(zero_module(z12)).passed
    both = direct_sum(build_modular_module(z12, 2), build_modular_module(z12, 3))
    assert both.n == 6
    assert verify_module_axioms(both).passed
    assert both.label(5) == "(1,2)"


def test_modulus_must_divide(z12):
    with pytest.raises(GammaSpecError):
        build_modular_module(z12, 5)


def test_submodule_must_be_closed(z12):
    F = module_from_semiring(z12)
    K, inclusion = submodule(F, [4, 8])
    assert inclusion == (0, 4, 8)
    assert K.n == 3 and verify_module_axioms(K).passed
    with pytest.raises(GammaSpecError):
        submodule(F, [1])


def test_broken_action_is_reported(z12):
    M = build_modular_module(z12, 4)
    action = np.array(M.action_tables)
    action[0, 1, 2, 3] = (action[0, 1, 2, 3] + 1) % 4
    report = verify_module_axioms(GammaModule(z12, M.add_table, action))
    assert not report.passed
    assert "action_symmetry" in {axiom for axiom, _ in report.violations}


def test_negation(z12):
    assert list(build_modular_module(z12, 4).negation()) == [0, 3, 2, 1]


def test_module_localization_matches_semiring(z12):
    S = MultiplicativeSystem(z12, (1, 5))
    local = localize_module(module_from_semiring(z12), S, MATCHED)
    assert local.num_classes == 12
    assert local.to_dict()["coupling"] == "matched"


def test_stalk_identification(z12, z12_spectrum):
    result = stalk_identification(module_from_semiring(z12), z12_spectrum, 1, MATCHED)
    assert result.neighbourhood == 3
    assert result.sections_classes == result.stalk_classes == 4
    assert result.isomorphic


# ---------------------------------------------------------------------------
# Structure sheaf

def test_stalks(z12_spectrum):
    assert stalk(z12_spectrum, 1, FREE).num_classes == 4
    assert stalk(z12_spectrum, z12_spectrum.primes[0], MATCHED).num_classes == 3
    with pytest.raises(GammaSpecError):
        stalk(z12_spectrum, 5)


@pytest.mark.parametrize("config, expected", [(FREE, 8), (MATCHED, 12)])
def test_global_sections(z12_spectrum, config, expected):
    over = sections(z12_spectrum, whole_space(z12_spectrum), config)
    assert len(over) == expected
    F = Sheaf(z12_spectrum, None, config)
    assert all(F.replay(s) for s in F.sections(whole_space(z12_spectrum)))


def test_empty_open_has_one_section(z12_spectrum):
    assert len(sections(z12_spectrum, open_set(z12_spectrum, []))) == 1


def test_open_set_checks(z12_spectrum):
    with pytest.raises(GammaSpecError):
        open_set(z12_spectrum, [2])
    U = open_set(z12_spectrum, basic_open(z12_spectrum, 3))
    assert U.ordered == (1,)


def test_restriction(z12_spectrum):
    S = z12_spectrum
    whole, V = whole_space(S), open_set(S, [0])
    for s in sections(S, whole, MATCHED):
        assert restrict(s, whole).values == s.values
        small = restrict(s, V)
        assert small.values == (s.value_at(0),)
        assert all(c.neighbourhood <= V.primes for c in small.certificates)
    with pytest.raises(GammaSpecError):
        restrict(sections(S, V, MATCHED)[0], whole)


@pytest.mark.parametrize("config", [FREE, MATCHED])
def test_sheaf_axioms_on_basic_cover(z12_spectrum, config):
    cover = [open_set(z12_spectrum, basic_open(z12_spectrum, a)) for a in (3, 2)]
    assert verify_sheaf_axioms(z12_spectrum, cover, config).passed


@pytest.mark.parametrize("a", [1, 2, 3, 5])
def test_basic_sections_match_localization(z12_spectrum, a):
    report = compare_basic_sections(z12_spectrum, a, MATCHED)
    assert not report.degenerate
    assert report.isomorphic
    assert report.num_sections == report.num_fractions


@pytest.mark.parametrize("a", [0, 6])
def test_degenerate_basic_opens(z12_spectrum, a):
    report = compare_basic_sections(z12_spectrum, a)
    assert report.degenerate and report.open == ()
    assert report.num_sections == 1
    assert report.to_dict()["basic_iso"]["injective"] is None


@pytest.mark.parametrize("a", [2, 3])
def test_associated_sheaf_matches_structure_sheaf(z12, z12_spectrum, a):
    local = associated_sheaf_sections(module_from_semiring(z12), a, MATCHED)
    assert local.num_classes == compare_basic_sections(z12_spectrum, a, MATCHED).num_fractions
    with pytest.raises(DegenerateSystemError):
        associated_sheaf_sections(module_from_semiring(z12), 6, MATCHED)


def test_module_sheaf_restriction_commutes_with_action(z12, z12_spectrum):
    F = Sheaf(z12_spectrum, build_modular_module(z12, 6), MATCHED)
    U, V = whole_space(z12_spectrum), open_set(z12_spectrum, [1])
    report = check_restriction_action(F, U, V)
    assert report.passed, report.violations[:5]


def test_action_needs_a_module_sheaf(z12_spectrum):
    F = Sheaf(z12_spectrum, None, MATCHED)
    s = F.sections(whole_space(z12_spectrum))[0]
    with pytest.raises(GammaSpecError):
        F.act(0, 1, s, 1)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
