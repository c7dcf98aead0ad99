"""Validate config files, datasets and run manifests against the JSON Schemas."""

from __future__ import annotations

import functools
import json
import logging
import os
from typing import Any

from jsonschema import Draft202012Validator

logger = logging.getLogger(__name__)

SCHEMA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, os.pardir, "schema")

CONFIG_SCHEMA = "config.schema.json"
EXPERIMENT_SCHEMA = "experiment.schema.json"
MANIFEST_SCHEMA = "manifest.schema.json"


@functools.lru_cache(maxsize=None)
def load_schema(name: str) -> dict:
    with open(os.path.join(SCHEMA_DIR, name)) as f:
        return json.load(f)


def validate_document(document: Any, schema_name: str) -> list[str]:
    """Return a list of ``"path: message"`` strings; empty means valid."""
    validator = Draft202012Validator(load_schema(schema_name))
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    messages = [
        f"{'.'.join(str(p) for p in e.absolute_path) or '(root)'}: {e.message}"
        for e in errors
    ]
    if messages:
        logger.warning("Schema validation (%s): %d errors", schema_name, len(messages))
        for msg in messages[:10]:
            logger.warning("  - %s", msg)
    else:
        logger.debug("Schema validation (%s): passed", schema_name)
    return messages
