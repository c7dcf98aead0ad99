#!/usr/bin/env python3
"""Post-run validation of an output directory.

Checks that the manifest is present and schema-valid, that every table it
lists exists with a header row, and that the experiment counts reconcile.
Exits 0 on success, 1 on failure.
"""

from __future__ import annotations

import json
import logging
import os
import sys

from src.build.static import DROPS_NAME, MANIFEST_NAME
from src.validate.schema import MANIFEST_SCHEMA, validate_document

logger = logging.getLogger(__name__)


def validate_run(output_dir: str) -> list[str]:
    """Return a list of error strings. Empty list means the run output is valid."""
    errors: list[str] = []

    manifest_path = os.path.join(output_dir, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        return [f"{MANIFEST_NAME} not found"]
    try:
        with open(manifest_path, encoding="utf-8") as f:
            manifest = json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        return [f"{MANIFEST_NAME} unreadable: {e}"]

    errors.extend(validate_document(manifest, MANIFEST_SCHEMA))
    if errors:
        return errors

    for table in manifest["tables"]:
        path = os.path.join(output_dir, table)
        if not os.path.isfile(path):
            errors.append(f"listed table missing: {table}")
            continue
        with open(path, encoding="utf-8") as f:
            if not f.readline().strip():
                errors.append(f"table has no header row: {table}")

    counts = manifest["counts"]
    if counts["used"] + counts["dropped"] != counts["total"]:
        errors.append(
            f"counts do not reconcile: used {counts['used']} + dropped "
            f"{counts['dropped']} != total {counts['total']}"
        )
    if counts["dropped"]:
        drops_path = os.path.join(output_dir, DROPS_NAME)
        if not os.path.isfile(drops_path):
            errors.append(f"{DROPS_NAME} missing although {counts['dropped']} were dropped")
        else:
            with open(drops_path, encoding="utf-8") as f:
                listed = sum(1 for line in f if line.strip()) - 1
            if listed != counts["dropped"]:
                errors.append(f"{DROPS_NAME} lists {listed} experiments, manifest says {counts['dropped']}")

    return errors


def main() -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    if len(sys.argv) < 2:
        print(f"Usage: {sys.argv[0]} <output_dir>")
        sys.exit(1)

    output_dir = sys.argv[1]
    if not os.path.isdir(output_dir):
        logger.error("Output directory does not exist: %s", output_dir)
        sys.exit(1)

    errors = validate_run(output_dir)
    if errors:
        logger.error("Run validation FAILED (%d errors):", len(errors))
        for e in errors:
            logger.error("  - %s", e)
        sys.exit(1)
    logger.info("Run validation PASSED")
    sys.exit(0)


if __name__ == "__main__":
    main()
