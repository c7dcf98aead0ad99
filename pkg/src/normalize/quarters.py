"""Quarter labels of the form ``YYYYQn`` and horizon names."""

from __future__ import annotations

import re

_QUARTER_RE = re.compile(r"^(\d{4})[Qq]([1-4])$")

# Named forecast ranges; any other non-negative horizon is kept as-is.
HORIZON_NAMES: dict[int, str] = {
    0: "short",
    2: "medium",
    4: "long",
}

_NAME_TO_HORIZON = {name: h for h, name in HORIZON_NAMES.items()}


def parse_quarter(label: str) -> tuple[int, int]:
    """Return ``(year, quarter)`` for a label such as ``"2019Q3"``."""
    match = _QUARTER_RE.match(label.strip())
    if not match:
        raise ValueError(f"not a quarter label: {label!r}")
    return int(match.group(1)), int(match.group(2))


def normalize_quarter(label: str) -> str:
    year, quarter = parse_quarter(label)
    return f"{year:04d}Q{quarter}"


def advance_quarter(label: str, quarters: int) -> str:
    """Move ``label`` forward by ``quarters`` (modulo 4, carrying into the year)."""
    if quarters < 0:
        raise ValueError(f"horizon must be >= 0, got {quarters}")
    year, quarter = parse_quarter(label)
    index = year * 4 + (quarter - 1) + quarters
    return f"{index // 4:04d}Q{index % 4 + 1}"


def normalize_horizon(raw: str | int) -> int:
    """Accept an integer number of quarters or one of the range names."""
    if isinstance(raw, int):
        value = raw
    else:
        cleaned = raw.strip().lower()
        if cleaned in _NAME_TO_HORIZON:
            return _NAME_TO_HORIZON[cleaned]
        value = int(cleaned)
    if value < 0:
        raise ValueError(f"horizon must be >= 0, got {value}")
    return value


def horizon_label(horizon: int) -> str:
    return HORIZON_NAMES.get(horizon, f"h{horizon}")
