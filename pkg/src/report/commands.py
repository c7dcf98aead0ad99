"""Command implementations behind ``run_report.py``.

Each ``cmd_*`` function loads its inputs, computes, writes its CSV tables
plus ``manifest.json`` (and ``drops.csv`` when anything was dropped) into
``config.out``, and returns the manifest it wrote.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from src.build.static import (
    build_manifest,
    write_drops,
    write_manifest,
    write_table,
)
from src.config import ReportConfig
from src.errors import ConfigError, DataError, ScaledFieldError, UndefinedCorrelationError
from src.inference.bias import bias_p_value
from src.inference.permutation import CorrelationResult, correlation_p
from src.inference.ranks import pearson_r, spearman_rho
from src.normalize.quarters import horizon_label
from src.panel.assemble import TOO_FEW, ZERO_DIVERSITY, Drop, assemble_experiments, dataset_records, log_drops
from src.panel.models import Dataset, Experiment, ForecastRecord, indicator_label, tagged_indicators
from src.panel.reference import REFERENCE_PANELS
from src.panel.store import DATASET_NAME, read_dataset, write_dataset
from src.parse.forecasts import parse_forecast_csv, parse_truth_csv, serialize_forecasts, serialize_truths
from src.parse.guessing import parse_guessing_csv
from src.report.histogram import (
    HISTOGRAM_COLUMNS,
    HistogramTable,
    empirical_cdf,
    histogram_table,
    integer_edges,
    lattice_edges,
    span_edges,
    uniform_edges,
)
from src.simulate import quincunx, unbiased
from src.simulate.seeds import sub_seed
from src.stats.crowd import (
    SummaryStats,
    crowd_mean,
    diversity_decomposition,
    fraction_beating_crowd,
    summarize_dataset,
)
from src.validate.drops import report_drops

logger = logging.getLogger(__name__)

FORECASTS_NAME = "forecasts.csv"
TRUTHS_NAME = "truths.csv"
ALL_GROUP = "all"
UNDEFINED_SKEW = "undefined-skew"
SIGNIFICANCE = 0.05

SUMMARY_COLUMNS = [
    "experiment_id", "horizon", "n", "truth", "mean", "gamma", "eps", "delta",
    "skew", "xi", "scaled_error_signed", "scaled_error_abs", "scaled_rmse",
    "scaled_diversity", "dpt_residual",
]
# Per-experiment fields a scatter can plot.
SCATTER_FIELDS = SUMMARY_COLUMNS[2:-1]


@dataclass
class LoadedInputs:
    dataset: Dataset
    drops: list[Drop] = field(default_factory=list)
    total: int = 0


# ---------------------------------------------------------------------------
# Input loading
# ---------------------------------------------------------------------------

def _is_guessing_file(path: str) -> bool:
    # Undecodable bytes are reported by the parser that ends up reading the file.
    with open(path, encoding="utf-8-sig", errors="replace") as f:
        first = f.readline().strip()
    return first.startswith("#") and "truth" in first.lower()


def load_inputs(config: ReportConfig) -> LoadedInputs:
    """Read every input into one Dataset, applying the horizon and min_n filters.

    ``.json`` inputs are normalized datasets, files whose first line is a
    ``# truth=...`` header are guessing experiments, anything else is a
    forecast CSV joined against ``config.truths``.
    """
    if not config.inputs:
        raise ConfigError("no input files given")

    records: list[ForecastRecord] = []
    ready: list[Experiment] = []
    guesses: list[Experiment] = []
    for path in config.inputs:
        if not os.path.isfile(path):
            raise ConfigError(f"input not found: {path}")
        if path.endswith(".json"):
            ready.extend(read_dataset(path))
        elif _is_guessing_file(path):
            guesses.append(parse_guessing_csv(path))
        else:
            records.extend(parse_forecast_csv(path, missing=config.missing).records)

    tagged = tagged_indicators(g.indicator for g in guesses)
    ready.extend(
        replace(g, id=indicator_label(g.indicator, tagged=True)) if g.indicator in tagged else g
        for g in guesses
    )

    provenance = ", ".join(config.inputs)
    drops: list[Drop] = []
    total = 0
    kept: list[Experiment] = []

    if records:
        if not config.truths:
            raise ConfigError("forecast CSV inputs need --truths")
        if not os.path.isfile(config.truths):
            raise ConfigError(f"truths file not found: {config.truths}")
        assembly = assemble_experiments(
            records, parse_truth_csv(config.truths), config.min_n, config.horizon,
        )
        kept.extend(assembly.dataset)
        drops.extend(assembly.drops)
        total += assembly.groups

    ready_drops: list[Drop] = []
    for exp in Dataset(tuple(ready)).filter_horizons(config.horizon):
        total += 1
        if exp.n < config.min_n:
            ready_drops.append(Drop(exp.id, TOO_FEW, f"N={exp.n} < {config.min_n}"))
        else:
            kept.append(exp)
    log_drops(ready_drops)
    drops.extend(ready_drops)

    dataset = Dataset(tuple(kept), provenance=provenance)
    logger.info("Loaded %d experiments (%d dropped) from %d inputs", len(dataset), len(drops), len(config.inputs))
    return LoadedInputs(dataset=dataset, drops=drops, total=total)


def _require_experiments(count: int, what: str = "experiments") -> None:
    if count == 0:
        raise DataError(f"no usable {what} after filtering")


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _config_record(config: ReportConfig) -> dict[str, Any]:
    record = config.as_dict()
    # The output location does not change results.
    record.pop("out")
    return record


def _finish(
    config: ReportConfig,
    command: str,
    total: int,
    used: int,
    drops: list[Drop],
    tables: list[str],
    **extra: Any,
) -> dict[str, Any]:
    counts = report_drops(total, used, drops)
    if drops:
        tables.append(write_drops(config.out, drops))
    manifest = build_manifest(command, _config_record(config), counts, tables, **extra)
    path = write_manifest(config.out, manifest)
    logger.info("%s: wrote %d tables and %s", command, len(tables), path)
    return manifest


def _write_text(output_dir: str, name: str, text: str) -> str:
    os.makedirs(output_dir, exist_ok=True)
    with open(os.path.join(output_dir, name), "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return name


def _write_dataset_files(output_dir: str, dataset: Dataset) -> list[str]:
    records, truths = dataset_records(dataset)
    write_dataset(os.path.join(output_dir, DATASET_NAME), dataset)
    return [
        DATASET_NAME,
        _write_text(output_dir, FORECASTS_NAME, serialize_forecasts(records)),
        _write_text(output_dir, TRUTHS_NAME, serialize_truths(truths)),
    ]


def _histogram_rows(group: str, table: HistogramTable) -> list[list]:
    return [[group, *row] for row in table.rows()]


def _grouped(items: list, horizon_of, by_horizon: bool) -> list[tuple[str, list]]:
    """The pooled group, then one group per horizon when requested."""
    groups = [(ALL_GROUP, items)]
    if by_horizon:
        for h in sorted({horizon_of(item) for item in items}):
            groups.append((horizon_label(h), [i for i in items if horizon_of(i) == h]))
    return groups


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_ingest(config: ReportConfig) -> dict[str, Any]:
    loaded = load_inputs(config)
    _require_experiments(len(loaded.dataset))
    tables = _write_dataset_files(config.out, loaded.dataset)
    return _finish(config, "ingest", loaded.total, len(loaded.dataset), loaded.drops, tables)


def cmd_summarize(config: ReportConfig) -> dict[str, Any]:
    """Per-experiment statistics plus the distribution of panel sizes N."""
    loaded = load_inputs(config)
    stats, skipped = summarize_dataset(loaded.dataset, workers=config.workers)
    _require_experiments(len(stats))
    log_drops(skipped, "experiments with undefined scaled fields")
    rows = []
    for s in stats:
        row = s.as_row()
        rows.append([row[c] for c in SUMMARY_COLUMNS])

    sizes = [s.n for s in stats]
    edges = integer_edges(min(sizes), max(sizes))
    n_rows = []
    for group, members in _grouped(stats, lambda s: s.horizon, config.by_horizon):
        n_rows.extend(_histogram_rows(group, histogram_table([s.n for s in members], edges)))

    tables = [
        write_table(config.out, "summary.csv", SUMMARY_COLUMNS, rows),
        write_table(config.out, "n_hist.csv", ["group", *HISTOGRAM_COLUMNS], n_rows),
    ]
    return _finish(
        config, "summarize", loaded.total, len(stats), loaded.drops + skipped, tables,
        markers={"n_min": min(sizes), "n_max": max(sizes)},
    )


def _field_name(raw: str) -> str:
    name = raw.strip().replace("-", "_")
    if name not in SCATTER_FIELDS:
        raise ConfigError(f"unknown field {raw!r}; choose from {', '.join(SCATTER_FIELDS)}")
    return name


def _correlate(
    xs: list[float], ys: list[float], config: ReportConfig, seed: int,
) -> tuple[CorrelationResult, float]:
    result = correlation_p(
        xs, ys, n_perm=config.n_perm, seed=seed, statistic=config.method, workers=config.workers,
    )
    other = pearson_r(xs, ys) if config.method == "spearman" else spearman_rho(xs, ys)
    return result, other


def cmd_scatter(config: ReportConfig, x_stat: str, y_stat: str) -> dict[str, Any]:
    """Per-experiment (x, y) pairs, their means and SDs, and a permutation-tested correlation."""
    x_stat, y_stat = _field_name(x_stat), _field_name(y_stat)
    if x_stat == y_stat:
        raise ConfigError("x and y must be different fields")

    loaded = load_inputs(config)
    stats, skipped = summarize_dataset(loaded.dataset, workers=config.workers)
    usable: list[SummaryStats] = []
    for s in stats:
        if "skew" in (x_stat, y_stat) and not s.skew_defined:
            skipped.append(Drop(s.experiment_id, UNDEFINED_SKEW, "delta = 0"))
        else:
            usable.append(s)
    log_drops(skipped, "experiments from the scatter")
    if len(usable) < 3:
        raise DataError(f"scatter needs at least 3 usable experiments, got {len(usable)}")

    other_name = "pearson" if config.method == "spearman" else "spearman"
    pair_rows = []
    stat_rows = []
    pooled: CorrelationResult | None = None
    for group, members in _grouped(usable, lambda s: s.horizon, config.by_horizon):
        xs = [float(getattr(s, x_stat)) for s in members]
        ys = [float(getattr(s, y_stat)) for s in members]
        if group != ALL_GROUP and len(members) < 3:
            logger.warning("Skipping %s group: %d experiments", group, len(members))
            continue
        seed = config.seed if group == ALL_GROUP else sub_seed(config.seed, f"scatter:{group}")
        try:
            result, other = _correlate(xs, ys, config, seed)
        except UndefinedCorrelationError:
            if group == ALL_GROUP:
                raise
            logger.warning("Skipping %s group: a field is constant", group)
            continue
        if group == ALL_GROUP:
            pooled = result
            pair_rows = [[s.experiment_id, s.horizon, x, y] for s, x, y in zip(members, xs, ys)]
        stat_rows.append([
            group, result.n_pairs,
            float(np.mean(xs)), float(np.std(xs, ddof=1)),
            float(np.mean(ys)), float(np.std(ys, ddof=1)),
            result.statistic, result.rho, result.p_value, result.method,
            other_name, other,
        ])
        logger.info(
            "%s: %s(%s, %s) = %.4f, p = %.3g over %d experiments",
            group, result.statistic, x_stat, y_stat, result.rho, result.p_value, result.n_pairs,
        )

    tables = [
        write_table(config.out, "scatter.csv", ["experiment_id", "horizon", x_stat, y_stat], pair_rows),
        write_table(
            config.out,
            "scatter_stats.csv",
            ["group", "n_pairs", "x_mean", "x_sd", "y_mean", "y_sd",
             "statistic", "rho", "p_value", "method", "other_statistic", "other_rho"],
            stat_rows,
        ),
    ]
    assert pooled is not None
    return _finish(
        config, "scatter", loaded.total, len(usable), loaded.drops + skipped, tables,
        correlation={
            "rho": pooled.rho,
            "p_value": pooled.p_value,
            "n_pairs": pooled.n_pairs,
            "method": pooled.method,
            "statistic": pooled.statistic,
        },
        fields={"x": x_stat, "y": y_stat},
    )


def xi_histogram(xis: list[float], ns: list[int], bins: int) -> HistogramTable:
    """Histogram of beat-the-crowd fractions with majority and beats-all markers.

    With a single panel size every attainable k/N gets its own bin;
    otherwise ``bins`` uniform bins cover [0, 1].
    """
    sizes = set(ns)
    edges = lattice_edges(ns[0]) if len(sizes) == 1 else uniform_edges(bins)
    table = histogram_table(xis, edges)
    xi = np.asarray(xis, dtype=float)
    table.markers = {
        "n_experiments": len(xis),
        "cdf_at_half": empirical_cdf(xis, 0.5),
        "beats_majority": int(np.count_nonzero(xi <= 0.5)),
        "prop_zero": int(np.count_nonzero(xi == 0)) / xi.size,
        "beats_all": int(np.count_nonzero(xi == 0)),
    }
    return table


def cmd_xi_hist(config: ReportConfig) -> dict[str, Any]:
    loaded = load_inputs(config)
    experiments = list(loaded.dataset)
    _require_experiments(len(experiments))

    hist_rows = []
    marker_rows = []
    pooled: dict[str, Any] = {}
    for group, members in _grouped(experiments, lambda e: e.horizon, config.by_horizon):
        table = xi_histogram(
            [fraction_beating_crowd(e) for e in members], [e.n for e in members], config.bins,
        )
        hist_rows.extend(_histogram_rows(group, table))
        marker_rows.append([group, *table.markers.values()])
        if group == ALL_GROUP:
            pooled = table.markers
        logger.info(
            "%s: crowd beats the majority in %d/%d experiments, everyone in %d",
            group, table.markers["beats_majority"], table.markers["n_experiments"],
            table.markers["beats_all"],
        )

    tables = [
        write_table(config.out, "xi_hist.csv", ["group", *HISTOGRAM_COLUMNS], hist_rows),
        write_table(config.out, "xi_markers.csv", ["group", *pooled.keys()], marker_rows),
    ]
    return _finish(
        config, "xi-hist", loaded.total, len(experiments), loaded.drops, tables, markers=pooled,
    )


def p_histogram(p_values: list[float], bins: int) -> HistogramTable:
    table = histogram_table(p_values, uniform_edges(bins))
    p = np.asarray(p_values, dtype=float)
    table.markers = {
        "n_experiments": len(p_values),
        "cdf_at_0.05": empirical_cdf(p_values, SIGNIFICANCE),
        "below_0.05": int(np.count_nonzero(p < SIGNIFICANCE)),
    }
    return table


def _bias_rows_from_dataset(dataset: Dataset) -> tuple[list[list], list[Drop]]:
    rows = []
    drops = []
    for exp in dataset:
        _, _, delta = diversity_decomposition(exp)
        if delta == 0:
            drops.append(Drop(exp.id, ZERO_DIVERSITY, "delta = 0, bias test undefined"))
            continue
        mean = crowd_mean(exp)
        result = bias_p_value(mean, exp.truth, delta, exp.n)
        rows.append([exp.id, exp.horizon, exp.n, mean, exp.truth, delta, result.z_arg, result.p])
    return rows, drops


def _bias_rows_from_reference() -> list[list]:
    rows = []
    for panel in REFERENCE_PANELS:
        result = bias_p_value(panel.mean, panel.truth, panel.delta, panel.n)
        rows.append([panel.id, 0, panel.n, panel.mean, panel.truth, panel.delta, result.z_arg, result.p])
    return rows


BIAS_COLUMNS = ["experiment_id", "horizon", "n", "mean", "truth", "delta", "z_arg", "p"]


def cmd_bias_hist(config: ReportConfig, reference: bool = False) -> dict[str, Any]:
    """Bias-test p-value per experiment, their histogram and CDF(0.05).

    With ``reference`` the published summaries of the four guessing
    experiments are tested instead of the configured inputs.
    """
    if reference:
        rows, drops, total = _bias_rows_from_reference(), [], len(REFERENCE_PANELS)
    else:
        loaded = load_inputs(config)
        rows, skipped = _bias_rows_from_dataset(loaded.dataset)
        log_drops(skipped, "experiments without diversity")
        drops, total = loaded.drops + skipped, loaded.total
    _require_experiments(len(rows), "experiments with delta > 0")

    hist_rows = []
    marker_rows = []
    pooled: dict[str, Any] = {}
    for group, members in _grouped(rows, lambda r: r[1], config.by_horizon):
        table = p_histogram([r[-1] for r in members], config.bins)
        hist_rows.extend(_histogram_rows(group, table))
        marker_rows.append([group, *table.markers.values()])
        if group == ALL_GROUP:
            pooled = table.markers
        logger.info(
            "%s: %d/%d experiments with p < %.2g",
            group, table.markers["below_0.05"], table.markers["n_experiments"], SIGNIFICANCE,
        )

    tables = [
        write_table(config.out, "bias_p.csv", BIAS_COLUMNS, rows),
        write_table(config.out, "bias_hist.csv", ["group", *HISTOGRAM_COLUMNS], hist_rows),
        write_table(config.out, "bias_markers.csv", ["group", *pooled.keys()], marker_rows),
    ]
    return _finish(config, "bias-hist", total, len(rows), drops, tables, markers=pooled)


def estimates_histogram(experiment: Experiment, bins: int) -> tuple[HistogramTable, np.ndarray, np.ndarray]:
    """Histogram of g_i / <g> with the crowd, truth and beats-crowd band markers.

    An estimate beats the crowd when its ratio lies strictly inside the band
    between 1 and 2 G/<g> - 1.
    """
    mean = crowd_mean(experiment)
    if mean == 0:
        raise ScaledFieldError("crowd mean <g>")
    values = np.asarray(experiment.values, dtype=float)
    relative = values / mean
    truth_ratio = experiment.truth / mean
    mirror = 2.0 * truth_ratio - 1.0
    winners = np.abs(values - experiment.truth) < abs(mean - experiment.truth)

    table = histogram_table(relative, span_edges(relative, bins))
    table.markers = {
        "crowd": 1.0,
        "truth_ratio": truth_ratio,
        "band_low": min(1.0, mirror),
        "band_high": max(1.0, mirror),
        "winners": int(np.count_nonzero(winners)),
        "n": experiment.n,
    }
    return table, relative, winners


def cmd_estimates_hist(config: ReportConfig, experiment_id: str) -> dict[str, Any]:
    loaded = load_inputs(config)
    experiment = loaded.dataset.get(experiment_id)
    table, relative, winners = estimates_histogram(experiment, config.bins)
    logger.info(
        "%s: G/<g> = %.4f, %d of %d estimates beat the crowd",
        experiment.id, table.markers["truth_ratio"], table.markers["winners"], experiment.n,
    )

    value_rows = [
        [est.forecaster_id, est.value, float(r), bool(w)]
        for est, r, w in zip(experiment.estimates, relative, winners)
    ]
    tables = [
        write_table(config.out, "est_hist.csv", HISTOGRAM_COLUMNS, table.rows()),
        write_table(config.out, "est_values.csv", ["forecaster_id", "value", "relative", "beats_crowd"], value_rows),
    ]
    return _finish(
        config, "est-hist", 1, 1, [], tables,
        markers=table.markers, experiment_id=experiment.id,
    )


def cmd_simulate_unbiased(config: ReportConfig) -> dict[str, Any]:
    """Replace every input panel by unbiased forecasters, or draw a stand-alone ensemble."""
    if config.inputs:
        loaded = load_inputs(config)
        dataset, skipped = unbiased.replicate_many(loaded.dataset, config.seed, config.replicates)
        _require_experiments(len(dataset))
        drops, total = loaded.drops + skipped, loaded.total
        used = len(loaded.dataset) - len(skipped)
    else:
        n_experiments = config.n_experiments or unbiased.DEFAULT_N_EXPERIMENTS
        dataset = unbiased.unbiased_ensemble(
            n_experiments, config.seed,
            n_min=config.n_min, n_max=config.n_max, truth=config.truth, delta=config.delta,
        )
        drops, total, used = [], n_experiments, n_experiments

    tables = _write_dataset_files(config.out, dataset)
    return _finish(
        config, "simulate-unbiased", total, used, drops, tables,
        markers={"synthetic_experiments": len(dataset), "replicates": config.replicates},
    )


def cmd_simulate_quincunx(config: ReportConfig) -> dict[str, Any]:
    n_experiments = config.n_experiments or quincunx.DEFAULT_N_EXPERIMENTS
    ensemble = quincunx.QuincunxEnsembleConfig(
        g_hat=config.g_hat,
        n_cues=config.n_cues,
        cue_low=config.cue_low,
        cue_high=config.cue_high,
        p_cue=config.p_cue,
        zero_sum_cues=config.zero_sum_cues,
    )
    dataset = quincunx.quincunx_ensemble(ensemble, n_experiments, config.n_per, config.seed)
    tables = _write_dataset_files(config.out, dataset)
    return _finish(
        config, "simulate-quincunx", n_experiments, n_experiments, [], tables,
        markers={"synthetic_experiments": len(dataset)},
    )
