"""
Localization at a multiplicative system or at a prime.
"""

import logging
from typing import Optional, Sequence

from handlers import CommandResult, guarded
from utils import EXIT_OK, GammaSpecError
from utils.config import RunConfig
from utils.ideals import spectrum
from utils.localization import MultiplicativeSystem, generated_mult_system, localize, localize_at_prime
from utils.reports import render_report
from utils.semiring import TernarySemiring, find_isomorphism

logger = logging.getLogger(__name__)


@guarded
def cmd_localize(
    config: RunConfig,
    T: TernarySemiring,
    system: Optional[Sequence[int]] = None,
    prime: Optional[int] = None,
    generate: bool = False,
) -> CommandResult:
    """Localize at --prime (a spectrum index) or at --system, optionally closing it first."""
    if prime is not None:
        S = spectrum(T, config)
        if not 0 <= prime < len(S.primes):
            raise GammaSpecError(f"No prime with index {prime}; the spectrum has {len(S.primes)}")
        L = localize_at_prime(T, S.primes[prime], config)
    elif system:
        members = generated_mult_system(T, system) if generate else MultiplicativeSystem(T, tuple(sorted(set(system))))
        L = localize(T, members, config)
    else:
        raise GammaSpecError("Give either a prime index or a multiplicative system")

    # S^-1 T ≅ T is only decidable here when classes form a semiring of the same size
    isomorphic = None
    if L.addition_supported and L.num_classes == T.n:
        local = L.as_semiring()
        isomorphic = find_isomorphism(local.add_table, local.ternary_tables, T) is not None
        logger.info(f"Localization isomorphic to source: {isomorphic}")

    document = {
        "semiring": T.describe(),
        **L.to_dict(),
        "canonical_map_violations": len(L.canonical_map_violations()),
        "isomorphic_to_source": isomorphic,
    }
    return CommandResult(EXIT_OK, render_report("localize", document))
