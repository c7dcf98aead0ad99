"""Reconcile used and dropped experiments for a run and log the breakdown."""

from __future__ import annotations

import logging
from collections import Counter

from src.errors import DataError
from src.panel.assemble import Drop

logger = logging.getLogger(__name__)


def report_drops(total: int, used: int, drops: list[Drop]) -> dict[str, int]:
    """Log a per-reason breakdown and return ``{"total", "used", "dropped"}``.

    Every experiment must be either used or dropped exactly once.
    """
    ids = [d.experiment_id for d in drops]
    repeated = sorted(i for i, c in Counter(ids).items() if c > 1)
    if repeated:
        raise DataError(f"experiments dropped more than once: {repeated[:5]}")
    if used + len(drops) != total:
        raise DataError(
            f"counts do not reconcile: used {used} + dropped {len(drops)} != total {total}"
        )

    logger.info("=== Experiment Accounting ===")
    logger.info("  %-24s %6d", "total", total)
    logger.info("  %-24s %6d", "used", used)
    by_reason = Counter(d.reason for d in drops)
    for reason in sorted(by_reason):
        pct = by_reason[reason] / total * 100 if total else 0.0
        logger.info("  %-24s %6d (%5.1f%%)", f"dropped: {reason}", by_reason[reason], pct)
    logger.info("=== End Accounting ===")

    return {"total": total, "used": used, "dropped": len(drops)}
