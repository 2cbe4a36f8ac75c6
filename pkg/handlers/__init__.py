"""
Command handlers for the gammaspec command line.
Each handler wraps library calls, renders a report and maps refusals to exit codes.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Callable

from utils import EXIT_OK, EXIT_VIOLATIONS, GammaSpecError
from utils.config import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    exit_code: int
    output: str = ""


def verdict_code(passed: bool) -> int:
    return EXIT_OK if passed else EXIT_VIOLATIONS


def guarded(handler: Callable[..., CommandResult]) -> Callable[..., CommandResult]:
    """Turn engine refusals into logged exit codes instead of tracebacks."""

    @functools.wraps(handler)
    def wrapper(config: RunConfig, *args, **kwargs) -> CommandResult:
        try:
            return handler(config, *args, **kwargs)
        except GammaSpecError as e:
            logger.error(f"{handler.__name__} refused: {type(e).__name__}: {e}")
            witness = getattr(e, "witness", None)
            if witness is not None:
                logger.error(f"Witness: {witness}")
            return CommandResult(e.exit_code)

    return wrapper
