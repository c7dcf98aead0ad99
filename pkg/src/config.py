"""Run configuration: defaults, ``key=value`` config files and flag overrides."""

from __future__ import annotations

import logging
import os
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from src.errors import ConfigError
from src.inference.permutation import DEFAULT_N_PERM
from src.normalize.quarters import normalize_horizon
from src.panel.assemble import DEFAULT_MIN_N
from src.parse.forecasts import DEFAULT_MISSING
from src.simulate import quincunx, unbiased
from src.validate.schema import CONFIG_SCHEMA, load_schema, validate_document

logger = logging.getLogger(__name__)

DEFAULT_SEED = 0
DEFAULT_BINS = 20
DEFAULT_OUT = "out"

# Settings applied by ``profile=frbp`` unless given explicitly.
PROFILES: dict[str, dict[str, Any]] = {
    "default": {},
    "frbp": {"min_n": 9, "horizon": [0, 2, 4]},
}


@dataclass
class ReportConfig:
    inputs: list[str] = field(default_factory=list)
    truths: str | None = None
    horizon: list[int] | None = None
    min_n: int = DEFAULT_MIN_N
    seed: int = DEFAULT_SEED
    n_perm: int = DEFAULT_N_PERM
    bins: int = DEFAULT_BINS
    out: str = DEFAULT_OUT
    missing: str = DEFAULT_MISSING
    method: str = "spearman"
    workers: int = 1
    by_horizon: bool = False
    profile: str = "default"
    # simulation
    replicates: int = 1
    n_experiments: int | None = None
    n_min: int = unbiased.DEFAULT_N_MIN
    n_max: int = unbiased.DEFAULT_N_MAX
    truth: float = unbiased.DEFAULT_TRUTH
    delta: float = unbiased.DEFAULT_DELTA
    g_hat: float = quincunx.DEFAULT_G_HAT
    n_cues: int = quincunx.DEFAULT_N_CUES
    cue_low: float = quincunx.DEFAULT_CUE_LOW
    cue_high: float = quincunx.DEFAULT_CUE_HIGH
    p_cue: float = quincunx.DEFAULT_P_CUE
    n_per: int = quincunx.DEFAULT_N_PER
    zero_sum_cues: bool = False

    def __post_init__(self) -> None:
        if self.bins < 2:
            raise ConfigError(f"bins must be >= 2, got {self.bins}")
        paths = [os.path.abspath(p) for p in self.inputs]
        if self.truths:
            paths.append(os.path.abspath(self.truths))
        if len(set(paths)) != len(paths):
            raise ConfigError("input paths must be distinct")
        if self.out and any(os.path.abspath(self.out) == p for p in paths):
            raise ConfigError("output directory must differ from the inputs")

    def as_dict(self) -> dict[str, Any]:
        return asdict(self)


def _coerce(key: str, raw: str, spec: dict) -> Any:
    kind = spec.get("type")
    try:
        if kind == "integer":
            return int(raw)
        if kind == "number":
            return float(raw)
        if kind == "boolean":
            lowered = raw.lower()
            if lowered in ("1", "true", "yes", "on"):
                return True
            if lowered in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "array":
            return [normalize_horizon(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"config key {key!r}: cannot read {raw!r} as {kind}") from None
    return raw


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse ``key=value`` lines; blank lines and lines starting with ``#`` are ignored.

    Values are coerced to the types declared in ``schema/config.schema.json``.
    """
    properties = load_schema(CONFIG_SCHEMA)["properties"]
    values: dict[str, Any] = {}
    for line_no, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{line_no}: expected key=value, got {line.strip()!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        key = key.replace("-", "_")
        values[key] = _coerce(key, raw, properties.get(key, {}))

    errors = validate_document(values, CONFIG_SCHEMA)
    if errors:
        raise ConfigError(f"{source}: invalid config: " + "; ".join(errors))
    return values


def load_config_file(path: str) -> dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    values = parse_config_text(text, path)
    logger.info("Loaded %d settings from %s", len(values), path)
    return values


def resolve_config(
    file_values: dict[str, Any] | None = None,
    cli_values: dict[str, Any] | None = None,
) -> ReportConfig:
    """Merge profile defaults, then config-file values, then CLI flags."""
    merged: dict[str, Any] = {}
    file_values = file_values or {}
    cli_values = {k: v for k, v in (cli_values or {}).items() if v is not None}

    profile = cli_values.get("profile", file_values.get("profile", "default"))
    if profile not in PROFILES:
        raise ConfigError(f"unknown profile {profile!r}")
    merged.update(PROFILES[profile])
    merged.update(file_values)
    merged.update(cli_values)

    known = {f.name for f in fields(ReportConfig)}
    unknown = sorted(set(merged) - known)
    if unknown:
        raise ConfigError(f"unknown settings: {', '.join(unknown)}")
    errors = validate_document(
        {k: v for k, v in merged.items() if k != "inputs"}, CONFIG_SCHEMA,
    )
    if errors:
        raise ConfigError("invalid settings: " + "; ".join(errors))
    return ReportConfig(**merged)
