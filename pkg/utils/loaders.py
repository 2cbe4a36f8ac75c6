"""
Reading semiring descriptions from JSON documents and preset files.

Two shapes are accepted:
    {"kind": "modular", "n": 12, "gamma": [1, 5]}
    {"kind": "tables", "n": N, "gamma_names": [...], "add": [[...]],
     "ternary": {"<gamma name>": [[[...]]]}}
with add[a][b] and ternary[g][a][b][c] row-major.
"""

import logging
from pathlib import Path
from typing import Any, Dict, Union

from jsonschema import Draft7Validator

from utils import InputFormatError, safe_load_json
from utils.config import DEFAULT_CONFIG, RunConfig
from utils.reports import load_schema
from utils.semiring import TernarySemiring, build_from_tables, build_modular

logger = logging.getLogger(__name__)

PRESET_DIR = Path(__file__).resolve().parent.parent / "presets"


def semiring_from_document(doc: Dict[str, Any], config: RunConfig = DEFAULT_CONFIG) -> TernarySemiring:
    errors = sorted(Draft7Validator(load_schema("semiring")).iter_errors(doc), key=lambda e: list(e.path))
    if errors:
        raise InputFormatError(f"Semiring document rejected: {errors[0].message}")

    if doc["kind"] == "modular":
        return build_modular(doc["n"], doc["gamma"], config)

    n = doc["n"]
    names = doc.get("gamma_names")
    ternary = doc["ternary"]
    if isinstance(ternary, dict):
        names = names or sorted(ternary)
        missing = [g for g in names if g not in ternary]
        if missing:
            raise InputFormatError(f"No ternary table for gamma {missing[0]!r}")
        ternary = [ternary[g] for g in names]
    T = build_from_tables(doc["add"], ternary, names, doc.get("element_names"), config)
    if T.n != n:
        raise InputFormatError(f"Declared n={n} but tables have carrier {T.n}")
    return T


def load_semiring(source: Union[str, Path, Dict[str, Any]], config: RunConfig = DEFAULT_CONFIG) -> TernarySemiring:
    """
    Load from a path, a preset name (e.g. "z12") or an already parsed document.
    """
    if isinstance(source, dict):
        return semiring_from_document(source, config)
    path = Path(source)
    if not path.exists() and (PRESET_DIR / f"{source}.json").exists():
        path = PRESET_DIR / f"{source}.json"
    doc = safe_load_json(path)
    if doc is None:
        raise InputFormatError(f"Could not read a JSON document from {source}")
    logger.info(f"Loaded semiring description from {path}")
    return semiring_from_document(doc, config)
