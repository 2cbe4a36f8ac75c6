"""
JSON reports: every document is checked against its schema in docs/ and
serialized canonically.
"""

import json
import logging
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict

import jsonschema

from utils import InternalConsistencyError, dump_json

logger = logging.getLogger(__name__)

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "docs"


@lru_cache(maxsize=None)
def load_schema(kind: str) -> Dict[str, Any]:
    with open(SCHEMA_DIR / f"{kind}.schema.json", "r") as f:
        return json.load(f)


def validate_report(kind: str, document: Dict[str, Any]) -> None:
    try:
        jsonschema.validate(instance=document, schema=load_schema(kind))
    except jsonschema.ValidationError as e:
        logger.error(f"{kind} report does not match its schema: {e.message}")
        raise InternalConsistencyError(f"{kind} report failed schema validation: {e.message}") from e


def render_report(kind: str, document: Dict[str, Any]) -> str:
    validate_report(kind, document)
    return dump_json(document)
