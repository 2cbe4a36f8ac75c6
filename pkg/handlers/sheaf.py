"""
Sections of the structure sheaf over basic opens.
"""

import logging
from typing import Optional, Sequence

from handlers import CommandResult, guarded, verdict_code
from utils.config import RunConfig
from utils.ideals import basic_open, spectrum
from utils.reports import render_report
from utils.semiring import TernarySemiring
from utils.sheaf import compare_basic_sections, open_set, verify_sheaf_axioms, whole_space

logger = logging.getLogger(__name__)


@guarded
def cmd_sections(config: RunConfig, T: TernarySemiring, elements: Optional[Sequence[int]] = None) -> CommandResult:
    S = spectrum(T, config)
    elements = list(range(T.n)) if not elements else list(elements)
    opens = [compare_basic_sections(S, a, config) for a in elements]

    whole = whole_space(S)
    proper = sorted({basic_open(S, a) for a in range(T.n)} - {frozenset(), whole.primes}, key=sorted)
    if frozenset().union(*proper) == whole.primes:
        cover = [open_set(S, D) for D in proper]
    else:
        cover = [whole]
    axioms = verify_sheaf_axioms(S, cover, config)
    passed = axioms.passed and all(r.degenerate or r.isomorphic for r in opens)
    document = {
        "semiring": T.describe(),
        "coupling": config.coupling.value,
        "opens": [r.to_dict() for r in opens],
        "sheaf_axioms": axioms.to_dict(),
    }
    return CommandResult(verdict_code(passed), render_report("sections", document))
