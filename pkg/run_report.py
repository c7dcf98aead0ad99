#!/usr/bin/env python3
"""Main entry point: crowd-forecast diagnostics over forecast panels.

Every subcommand reads its inputs, writes CSV tables and a manifest into
``--out`` and exits 0 on success, 1 on usage or configuration errors and 2
on data errors. Failures also print one JSON line to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

from src.config import ReportConfig, load_config_file, resolve_config
from src.errors import EXIT_CONFIG, EXIT_DATA, CrowdError
from src.normalize.quarters import normalize_horizon
from src.report import commands

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s %(levelname)s %(message)s",
)
logger = logging.getLogger(__name__)

# Settings shared by every subcommand, in addition to --config.
COMMON_SETTINGS = (
    "truths", "horizon", "min_n", "seed", "n_perm", "bins", "out",
    "missing", "workers", "profile", "by_horizon",
)
SIMULATION_SETTINGS = (
    "replicates", "n_experiments", "n_min", "n_max", "truth", "delta",
    "g_hat", "n_cues", "cue_low", "cue_high", "p_cue", "n_per", "zero_sum_cues",
)


def _error_line(kind: str, message: str, exit_code: int) -> None:
    print(
        json.dumps({"error": kind, "message": message, "exit_code": exit_code}),
        file=sys.stderr,
    )


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors reported as exit code 1."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        _error_line("usage", message, EXIT_CONFIG)
        sys.exit(EXIT_CONFIG)


def _horizons(raw: str) -> list[int]:
    try:
        return [normalize_horizon(part) for part in raw.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("inputs", nargs="*", help="Forecast CSVs, guessing files or experiments.json")
    common.add_argument("--config", help="key=value config file; flags override it")
    common.add_argument("--truths", help="Truth CSV (indicator,target_period,value)")
    common.add_argument(
        "--horizon", type=_horizons,
        help="Comma-separated horizons in quarters or names (short, medium, long)",
    )
    common.add_argument("--min-n", dest="min_n", type=int, help="Minimum forecasters per experiment (default: 2)")
    common.add_argument("--seed", type=int, help="Master random seed (default: 0)")
    common.add_argument("--n-perm", dest="n_perm", type=int, help="Permutations for correlation p-values (default: 100000)")
    common.add_argument("--bins", type=int, help="Histogram bins (default: 20)")
    common.add_argument("--out", help="Output directory (default: out)")
    common.add_argument("--missing", help="Missing-estimate sentinel (default: #N/A)")
    common.add_argument("--workers", type=int, help="Parallel workers (results do not depend on it)")
    common.add_argument("--profile", help="Settings profile: default or frbp")
    common.add_argument(
        "--by-horizon", dest="by_horizon", action="store_const", const=True,
        help="Add per-horizon rows next to the pooled ones",
    )
    common.add_argument("-v", "--verbose", action="store_true", help="Log at DEBUG level")
    common.add_argument("-q", "--quiet", action="store_true", help="Log warnings and errors only")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(description="Wisdom-of-crowds diagnostics for forecast panels")
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("ingest", parents=[common], help="Normalize inputs into experiments.json")
    sub.add_parser("summarize", parents=[common], help="Per-experiment statistics table")

    scatter = sub.add_parser("scatter", parents=[common], help="Correlate two per-experiment fields")
    scatter.add_argument("--x", dest="x_stat", default="scaled_diversity", help="x field (default: scaled_diversity)")
    scatter.add_argument("--y", dest="y_stat", default="scaled_error_abs", help="y field (default: scaled_error_abs)")
    scatter.add_argument("--method", choices=["spearman", "pearson"], help="Primary statistic (default: spearman)")

    sub.add_parser("xi-hist", parents=[common], help="Histogram of beat-the-crowd fractions")

    bias = sub.add_parser("bias-hist", parents=[common], help="Bias-test p-values and their histogram")
    bias.add_argument(
        "--reference", action="store_true",
        help="Test the published summaries of the four guessing experiments",
    )

    est = sub.add_parser("est-hist", parents=[common], help="Histogram of one experiment's relative estimates")
    est.add_argument("--experiment", required=True, help="Experiment id")

    unbiased = sub.add_parser("simulate-unbiased", parents=[common], help="Unbiased-forecaster null datasets")
    unbiased.add_argument("--replicates", type=int, help="Replicas per input experiment (default: 1)")
    unbiased.add_argument("--n-experiments", dest="n_experiments", type=int, help="Ensemble size without inputs (default: 10000)")
    unbiased.add_argument("--n-min", dest="n_min", type=int, help="Smallest panel size (default: 9)")
    unbiased.add_argument("--n-max", dest="n_max", type=int, help="Largest panel size (default: 87)")
    unbiased.add_argument("--truth", type=float, help="Truth G of the ensemble (default: 100)")
    unbiased.add_argument("--delta", type=float, help="Diversity of the ensemble (default: 25)")

    quin = sub.add_parser("simulate-quincunx", parents=[common], help="Augmented quincunx ensembles")
    quin.add_argument("--n-experiments", dest="n_experiments", type=int, help="Experiments (default: 500)")
    quin.add_argument("--g-hat", dest="g_hat", type=float, help="Prototype value (default: 1000)")
    quin.add_argument("--n-cues", dest="n_cues", type=int, help="Cues per experiment (default: 10)")
    quin.add_argument("--cue-low", dest="cue_low", type=float, help="Lowest cue weight (default: -50)")
    quin.add_argument("--cue-high", dest="cue_high", type=float, help="Highest cue weight (default: 50)")
    quin.add_argument("--p-cue", dest="p_cue", type=float, help="Probability a cue is read correctly (default: 0.7)")
    quin.add_argument("--n-per", dest="n_per", type=int, help="Forecasters per experiment (default: 40)")
    quin.add_argument(
        "--zero-sum-cues", dest="zero_sum_cues", action="store_const", const=True,
        help="Centre each draw of cue weights so the prototype equals the truth",
    )
    return parser


def _cli_values(args: argparse.Namespace) -> dict[str, Any]:
    names = COMMON_SETTINGS + SIMULATION_SETTINGS + ("method",)
    values = {name: getattr(args, name, None) for name in names}
    values["inputs"] = list(args.inputs) or None
    return values


def _dispatch(args: argparse.Namespace, config: ReportConfig) -> dict[str, Any]:
    if args.command == "ingest":
        return commands.cmd_ingest(config)
    if args.command == "summarize":
        return commands.cmd_summarize(config)
    if args.command == "scatter":
        return commands.cmd_scatter(config, args.x_stat, args.y_stat)
    if args.command == "xi-hist":
        return commands.cmd_xi_hist(config)
    if args.command == "bias-hist":
        return commands.cmd_bias_hist(config, reference=args.reference)
    if args.command == "est-hist":
        return commands.cmd_estimates_hist(config, args.experiment)
    if args.command == "simulate-unbiased":
        return commands.cmd_simulate_unbiased(config)
    return commands.cmd_simulate_quincunx(config)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    root = logging.getLogger()
    if args.verbose:
        root.setLevel(logging.DEBUG)
    elif args.quiet:
        root.setLevel(logging.WARNING)

    try:
        file_values = load_config_file(args.config) if args.config else {}
        config = resolve_config(file_values, _cli_values(args))
        manifest = _dispatch(args, config)
    except CrowdError as exc:
        logger.error("%s failed: %s", args.command, exc)
        _error_line(exc.kind, str(exc), exc.exit_code)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s failed: %s", args.command, exc)
        _error_line("io", str(exc), EXIT_DATA)
        return EXIT_DATA

    counts = manifest["counts"]
    logger.info(
        "%s done: %d used, %d dropped of %d",
        args.command, counts["used"], counts["dropped"], counts["total"],
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
