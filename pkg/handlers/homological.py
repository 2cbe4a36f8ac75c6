"""
Tensor products and Tor_1 of cyclic modules.
"""

import logging

from handlers import CommandResult, guarded, verdict_code
from utils import EXIT_OK, CapExceededError
from utils.config import RunConfig
from utils.homological import tensor_oracle, tensor_product, tor1_cyclic
from utils.modules import build_modular_module
from utils.reports import render_report
from utils.semiring import TernarySemiring

logger = logging.getLogger(__name__)


@guarded
def cmd_tensor(config: RunConfig, T: TernarySemiring, m1: int, m2: int) -> CommandResult:
    """Z/m1 (x) Z/m2, cross-checked against the congruence-closure oracle when small enough."""
    M, N = build_modular_module(T, m1), build_modular_module(T, m2)
    tensor = tensor_product(M, N, config)
    try:
        oracle = tensor_oracle(M, N)
    except CapExceededError as e:
        logger.info(f"Skipping oracle: {e}")
        oracle = None
    agree = oracle is None or oracle == tensor.invariant_factors
    if not agree:
        logger.error(f"Oracle disagrees: {oracle} != {tensor.invariant_factors}")
    document = {"semiring": T.describe(), "left": m1, "right": m2, **tensor.to_dict(), "oracle": oracle}
    return CommandResult(verdict_code(agree), render_report("tensor", document))


@guarded
def cmd_tor(config: RunConfig, T: TernarySemiring, m1: int, m2: int) -> CommandResult:
    """Tor_1(Z/m1, Z/m2) from the canonical cyclic presentation."""
    N = build_modular_module(T, m2)
    tor = tor1_cyclic(T, m1, N, config)
    document = {"semiring": T.describe(), "left": m1, "right": m2, **tor.to_dict()}
    return CommandResult(EXIT_OK, render_report("tor", document))
