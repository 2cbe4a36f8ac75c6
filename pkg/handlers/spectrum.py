"""
Ideal enumeration, primes and the Zariski topology.
"""

import logging

from handlers import CommandResult, guarded, verdict_code
from utils import EXIT_OK
from utils.config import RunConfig
from utils.dot import hasse_diagram
from utils.ideals import basic_open, is_prime, spectrum, verify_zariski_axioms
from utils.localization import check_complement_stability
from utils.reports import render_report
from utils.semiring import TernarySemiring

logger = logging.getLogger(__name__)


@guarded
def cmd_spectrum(config: RunConfig, T: TernarySemiring) -> CommandResult:
    S = spectrum(T, config)
    if config.output_format == "dot":
        return CommandResult(EXIT_OK, hasse_diagram(S).source)

    ideals = []
    for I in S.ideals:
        verdict = is_prime(T, I) if I.is_proper else None
        ideals.append({
            **I.to_dict(),
            "proper": I.is_proper,
            "prime": bool(verdict),
            "witness": list(verdict.witness) if verdict is not None and verdict.witness is not None else None,
        })
    zariski = verify_zariski_axioms(S, config)
    unstable = [i for i, P in enumerate(S.primes) if not check_complement_stability(T, P)]
    document = {
        "semiring": T.describe(),
        **S.to_dict(),
        "ideals": ideals,
        "basic_opens": {str(a): sorted(basic_open(S, a)) for a in range(T.n)},
        "zariski": zariski.to_dict(),
        "unstable_complements": unstable,
    }
    return CommandResult(verdict_code(zariski.passed and not unstable), render_report("spectrum", document))
