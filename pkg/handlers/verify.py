"""
Axiom verification and slice tables.
"""

import logging
from typing import Optional, Sequence

from handlers import CommandResult, guarded, verdict_code
from utils import EXIT_OK, TableError
from utils.config import RunConfig
from utils.reports import render_report
from utils.semiring import TernarySemiring, verify_axioms

logger = logging.getLogger(__name__)


@guarded
def cmd_verify(config: RunConfig, T: TernarySemiring) -> CommandResult:
    report = verify_axioms(T, config.violation_limit, config.threads)
    document = {"semiring": T.describe(), **report.to_dict()}
    return CommandResult(verdict_code(report.passed), render_report("verify", document))


def gamma_index(T: TernarySemiring, gamma: str) -> int:
    """Index of a gamma given by name, falling back to a plain index."""
    if gamma in T.gamma_names:
        return T.gamma_names.index(gamma)
    try:
        g = int(gamma)
    except ValueError:
        raise TableError(f"Unknown gamma {gamma!r}") from None
    if not 0 <= g < T.num_gamma:
        raise TableError(f"Unknown gamma {gamma!r}")
    return g


def slice_rows(T: TernarySemiring, g: int, c: int, rows: Optional[Sequence[int]] = None):
    rows = list(range(T.n)) if rows is None else list(rows)
    if not 0 <= c < T.n or any(not 0 <= a < T.n for a in rows):
        raise TableError(f"Slice index outside the carrier of size {T.n}")
    return [(a, [int(T.ternary_tables[g, a, b, c]) for b in range(T.n)]) for a in rows]


def format_slice(T: TernarySemiring, g: int, c: int, rows: Optional[Sequence[int]] = None) -> str:
    """Plain-text table of b -> {a b c}_g, one line per row a."""
    body = slice_rows(T, g, c, rows)
    header = [f"{{·}}_{T.gamma_names[g]}"] + [T.name(b) for b in range(T.n)]
    lines = [header] + [[T.name(a)] + [T.name(v) for v in values] for a, values in body]
    width = max(len(cell) for line in lines for cell in line)
    return "\n".join(" ".join(cell.rjust(width) for cell in line) for line in lines) + "\n"


@guarded
def cmd_table(config: RunConfig, T: TernarySemiring, gamma: str, c: int, rows: Optional[Sequence[int]] = None) -> CommandResult:
    g = gamma_index(T, gamma)
    if config.output_format == "text":
        return CommandResult(EXIT_OK, format_slice(T, g, c, rows))
    document = {
        "semiring": T.describe(),
        "gamma": T.gamma_names[g],
        "c": c,
        "rows": [{"a": a, "values": values} for a, values in slice_rows(T, g, c, rows)],
    }
    return CommandResult(EXIT_OK, render_report("table", document))
