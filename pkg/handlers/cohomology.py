"""
Cech cohomology of basic covers.
"""

import json
import logging
from typing import Optional, Sequence

from handlers import CommandResult, guarded, verdict_code
from utils.cohomology import cech_complex, cohomology, is_acyclic, verify_d_squared
from utils.config import RunConfig
from utils.modules import build_modular_module, module_from_semiring
from utils.reports import render_report
from utils.semiring import TernarySemiring

logger = logging.getLogger(__name__)


@guarded
def cmd_cech(config: RunConfig, T: TernarySemiring, cover: Sequence[int], module: Optional[int] = None) -> CommandResult:
    """Cover by D(a) for a in `cover`; coefficients in the sheaf of Z/module, or of T itself."""
    M = build_modular_module(T, module) if module else module_from_semiring(T)
    C = cech_complex(T, cover, M, config)
    H = cohomology(C)
    failures = verify_d_squared(C) if C.group_complete else []
    acyclic = is_acyclic(H) if C.group_complete else None
    document = {
        "semiring": T.describe(),
        "coupling": config.coupling.value,
        "module": module or T.n,
        **C.to_dict(),
        "h": H,
        "acyclic": acyclic,
        "d_squared_failures": len(failures),
    }
    if acyclic is False:
        logger.warning(f"Nonzero higher cohomology on cover {list(cover)}: {H}")
        document["complex"] = C.dump()
        logger.warning(f"Cech complex: {json.dumps(document['complex'], sort_keys=True)}")
    return CommandResult(verdict_code(not failures and acyclic is not False), render_report("cech", document))
