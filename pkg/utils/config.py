"""
Run configuration for gammaspec.
Settings come from the environment (a .env file is honoured) and can be
overridden by command-line flags.
"""

import logging
import os
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Any

from dotenv import load_dotenv

from utils import GammaSpecError, safe_int

logger = logging.getLogger(__name__)


class Coupling(str, Enum):
    """How the two cube modes of the cubic-scaling identity relate."""

    FREE = "free"  # gamma and eta chosen independently
    MATCHED = "matched"  # gamma == eta


class AdditionRule(str, Enum):
    """Candidate sums of fractions; each is verified per instance."""

    CUBIC = "cubic"
    SQUARED = "squared"


class ConfigError(GammaSpecError):
    """Unknown field or invalid value in a run configuration."""


@dataclass(frozen=True)
class RunConfig:
    command: str = ""
    input_path: str = ""
    output_format: str = "json"
    cap_carrier: int = 32
    cap_gamma: int = 8
    cap_ideals: int = 16
    cap_stalk: int = 4096
    cap_sections: int = 200000
    cap_homs: int = 100000
    violation_limit: int = 100
    family_sample: int = 1000
    threads: int = 1
    seed: int = 0
    coupling: Coupling = Coupling.MATCHED
    addition: AdditionRule = AdditionRule.CUBIC

    def __post_init__(self):
        for f in fields(self):
            if f.name.startswith("cap_") or f.name in ("violation_limit", "family_sample", "threads"):
                value = getattr(self, f.name)
                if not isinstance(value, int) or value <= 0:
                    raise ConfigError(f"{f.name} must be a positive integer, got {value!r}")
        if self.output_format not in ("json", "dot", "text"):
            raise ConfigError(f"Unknown output format {self.output_format!r}")
        # Enum coercion for values that arrive as plain strings
        object.__setattr__(self, "coupling", Coupling(self.coupling))
        object.__setattr__(self, "addition", AdditionRule(self.addition))

    @classmethod
    def from_env(cls) -> "RunConfig":
        """Build a configuration from GAMMASPEC_* environment variables."""
        load_dotenv()
        defaults = cls()
        try:
            config = cls(
                cap_carrier=safe_int(os.getenv("GAMMASPEC_CAP_CARRIER"), defaults.cap_carrier),
                cap_ideals=safe_int(os.getenv("GAMMASPEC_CAP_IDEALS"), defaults.cap_ideals),
                cap_stalk=safe_int(os.getenv("GAMMASPEC_CAP_STALK"), defaults.cap_stalk),
                violation_limit=safe_int(os.getenv("GAMMASPEC_VIOLATION_LIMIT"), defaults.violation_limit),
                threads=safe_int(os.getenv("GAMMASPEC_THREADS"), defaults.threads),
                seed=safe_int(os.getenv("GAMMASPEC_SEED"), defaults.seed),
                coupling=os.getenv("GAMMASPEC_COUPLING", defaults.coupling.value),
                addition=os.getenv("GAMMASPEC_ADDITION", defaults.addition.value),
            )
        except ValueError as e:
            raise ConfigError(f"Invalid environment setting: {e}") from e
        logger.debug(f"Loaded configuration from environment: {config}")
        return config

    def override(self, **changes: Any) -> "RunConfig":
        """Return a copy with the given fields replaced; None values are ignored."""
        known = {f.name for f in fields(self)}
        unknown = sorted(set(changes) - known)
        if unknown:
            raise ConfigError(f"Unknown configuration fields: {', '.join(unknown)}")
        try:
            return replace(self, **{k: v for k, v in changes.items() if v is not None})
        except ValueError as e:
            raise ConfigError(str(e)) from e


DEFAULT_CONFIG = RunConfig()
