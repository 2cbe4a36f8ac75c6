#!/usr/bin/env python3
"""
Tests for Cech complexes of basic covers: cochain sizes, d o d = 0 and
vanishing of higher cohomology on Z/12 and Z/30.
"""

import logging

import pytest

from utils import CoverError, NotGroupCompleteError
from utils.cohomology import cech_complex, cohomology, is_acyclic, verify_d_squared
from utils.config import Coupling, RunConfig
from utils.ideals import spectrum
from utils.modules import build_modular_module, module_from_semiring
from utils.semiring import build_modular

# Configure logging
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=logging.INFO
)
logger = logging.getLogger(__name__)

FREE = RunConfig(coupling=Coupling.FREE)
MATCHED = RunConfig(coupling=Coupling.MATCHED)
Z30_GAMMAS = [(1,), (7,), (1, 7), (11, 13), (1, 7, 11, 13)]
# D(2) = {P3, P5}, D(6) = {P5}, D(1) = everything
Z30_COVERS = [(2, 3, 5), (6, 10, 15), (2, 15), (3, 10), (5, 6), (2, 3), (1,), (1, 6)]


@pytest.fixture(scope="module")
def z12():
    return build_modular(12, [1, 5])


@pytest.fixture(scope="module")
def z30_config():
    return MATCHED.override(cap_ideals=30)


@pytest.fixture(scope="module")
def z30_spectra(z30_config):
    cache = {}

    def get(gamma):
        if gamma not in cache:
            T = build_modular(30, list(gamma))
            cache[gamma] = (T, spectrum(T, z30_config))
        return cache[gamma]

    return get


def test_z12_structure_sheaf_is_acyclic(z12):
    C = cech_complex(z12, [2, 3], None, MATCHED)
    assert C.group_complete
    assert [g.order for g in C.groups] == [12, 1]
    H = cohomology(C)
    assert H[0] == {"degree": 0, "invariant_factors": [12], "order": 12}
    assert is_acyclic(H)
    assert verify_d_squared(C) == []


def test_z12_module_coefficients(z12):
    C = cech_complex(z12, [3, 2], build_modular_module(z12, 6), MATCHED)
    H = cohomology(C)
    assert H[0]["order"] == 6
    assert is_acyclic(H)


def test_cover_must_cover(z12):
    with pytest.raises(CoverError):
        cech_complex(z12, [2])
    with pytest.raises(CoverError):
        cech_complex(z12, [6, 0])


def test_free_coupling_falls_back_to_equalizer(z12):
    C = cech_complex(z12, [3, 2], None, FREE)
    H = cohomology(C)
    assert H[0]["order"] == 8
    if not C.group_complete:
        assert H == [{"degree": 0, "invariant_factors": None, "order": 8}]
        with pytest.raises(NotGroupCompleteError):
            C.coboundary(0, next(C.groups[0].elements()))


def test_equalizer_only_complex(z12):
    C = cech_complex(z12, [1, 2, 3], None, MATCHED, equalizer_only=True)
    assert len(C.groups) == 1
    assert cohomology(C) == [{"degree": 0, "invariant_factors": None, "order": 12}]


def test_overlapping_cover(z12):
    C = cech_complex(z12, [1, 5], module_from_semiring(z12), MATCHED)
    assert [g.order for g in C.groups] == [144, 12]
    H = cohomology(C)
    assert [h["order"] for h in H] == [12, 1]
    assert verify_d_squared(C) == []


def test_z30_three_set_cover(z30_config):
    T = build_modular(30, [1, 7])
    S = spectrum(T, z30_config)
    assert len(S.primes) == 3
    C = cech_complex(T, [2, 3, 5], module_from_semiring(T), z30_config, S)
    assert C.group_complete
    assert C.groups[0].order == 15 * 10 * 6
    assert C.groups[1].order == 30
    assert verify_d_squared(C) == []
    H = cohomology(C)
    assert H[0]["order"] == 30
    assert is_acyclic(H)
    assert C.to_dict()["cochain_orders"] == [900, 30, 1]


@pytest.mark.parametrize("cover", Z30_COVERS)
@pytest.mark.parametrize("gamma", Z30_GAMMAS)
def test_z30_covers_are_acyclic(z30_config, z30_spectra, gamma, cover):
    T, S = z30_spectra(gamma)
    C = cech_complex(T, cover, module_from_semiring(T), z30_config, S)
    assert C.group_complete
    assert verify_d_squared(C) == []
    H = cohomology(C)
    assert H[0]["order"] == 30
    assert is_acyclic(H), C.dump()


def test_default_coupling_is_group_complete(z12):
    C = cech_complex(z12, [2, 3])
    assert C.group_complete
    H = cohomology(C)
    assert [h["order"] for h in H] == [12, 1]
    assert H[0]["invariant_factors"] == [12]
    assert is_acyclic(H)


def test_complex_dump(z12):
    dump = cech_complex(z12, [2, 3], None, MATCHED).dump()
    degree0, degree1 = dump["degrees"]
    assert [s["prime"] for s in degree0["slots"]] == [0, 1]
    # D(2) and D(3) are disjoint, so every coboundary is the empty cochain
    assert len(degree0["coboundary"]) == 12
    assert all(image == [] for _, image in degree0["coboundary"])
    assert degree1["slots"] == [] and "coboundary" not in degree1


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
