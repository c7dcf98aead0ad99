from src.normalize.quarters import advance_quarter, horizon_label, normalize_horizon, normalize_quarter
from src.normalize.slugify import slugify

__all__ = [
    "slugify",
    "advance_quarter",
    "horizon_label",
    "normalize_horizon",
    "normalize_quarter",
]
