"""
Shared helpers and the error hierarchy for the gammaspec engine.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

logger = logging.getLogger(__name__)

# Exit codes used by the command handlers
EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_BAD_INPUT = 2
EXIT_CAP_EXCEEDED = 3
EXIT_REFUSED = 4


class GammaSpecError(Exception):
    """Base class for every refusal raised by the engine."""

    exit_code = EXIT_REFUSED


class TableError(GammaSpecError):
    """Operation tables have the wrong shape or hold out-of-range entries."""

    exit_code = EXIT_BAD_INPUT


class InputFormatError(GammaSpecError):
    """Malformed JSON input or a document that fails its schema."""

    exit_code = EXIT_BAD_INPUT


class CapExceededError(GammaSpecError):
    """An enumeration would exceed a configured cap."""

    exit_code = EXIT_CAP_EXCEEDED

    def __init__(self, cap_name: str, cap_value: int, requested: int):
        super().__init__(f"{cap_name} cap of {cap_value} exceeded (requested {requested})")
        self.cap_name = cap_name
        self.cap_value = cap_value
        self.requested = requested


class NotPrimeError(GammaSpecError):
    """An ideal that had to be prime is not; carries the violating (a, b, c, gamma)."""

    def __init__(self, message: str, witness: Optional[Tuple[int, ...]] = None):
        super().__init__(message)
        self.witness = witness


class DegenerateSystemError(GammaSpecError):
    """The multiplicative closure of a seed reaches the zero element."""


class RepresentativeDependenceError(GammaSpecError):
    """An operation on classes depends on the chosen representatives."""

    def __init__(self, message: str, witness: Optional[Tuple[Any, ...]] = None):
        super().__init__(message)
        self.witness = witness


class NotGroupCompleteError(GammaSpecError):
    """Subtraction was needed but some element has no additive inverse."""


class InfiniteGroupError(GammaSpecError):
    """A relation matrix does not have full column rank."""


class ImproperPreimageError(GammaSpecError):
    """Pulling back a prime produced the whole semiring (non-unital morphism)."""


class CoverError(GammaSpecError):
    """A family of basic opens does not cover the spectrum."""


class InternalConsistencyError(GammaSpecError):
    """A result contradicts a proven structural fact; indicates a bug."""


def safe_load_json(path: Union[str, Path]) -> Optional[Dict[str, Any]]:
    """
    Load a JSON document, logging instead of raising on failure.

    Returns:
        The parsed document or None if it could not be read
    """
    try:
        with open(path, "r") as f:
            return json.load(f)
    except FileNotFoundError:
        logger.error(f"Input file not found: {path}")
    except json.JSONDecodeError as e:
        logger.error(f"Malformed JSON in {path}: {e}")
    return None


def safe_int(value: Optional[str], default: int) -> int:
    """Parse an integer setting, falling back to the default on bad input."""
    if value is None or value == "":
        return default
    try:
        return int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer setting {value!r}, using {default}")
        return default


def dump_json(document: Dict[str, Any]) -> str:
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
