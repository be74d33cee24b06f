"""
Command-line surface: argument parsing, subcommand dispatch and exit codes.

Exit codes: 0 success, 1 analysis failure, 2 usage error. Machine output is
written to stdout; logging goes to stderr.
"""
import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from rich.console import Console
from rich.table import Table

from controllers.corpus_controller import CorpusController, ingest_corpus
from entity.Corpus import Corpus, CorpusEntry, ScoreRecord
from entity.Measures import MeasureVector
from entity.Profile import CalibrationProfile, CalibrationSummary, RadiiVector
from entity.Score import Label
from model.calibration import DEFAULT_THRESHOLD, calibrate_vector, compute_profile, default_profile, load_profile, save_profile
from model.config import Settings, get_settings
from model.errors import ConfigError, IrsError
from model.harness import (
    PUBLISHED_MODEL_IRS, PUBLISHED_ORDERING_FREQUENCY, benchmark_table, detection_metrics, ordering_frequency,
    summarize_calibration,
)
from model.selfcheck import run_selfcheck
from utils.logging_setup import configure_logging, level_for
from view.pentagon_plot import write_pentagon_svg
from view.reports import format_csv, read_report, write_report
from view.tables import benchmark_rich_table, calibration_table, evaluation_table, ordering_table, rotation_table

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"]


class UsageError(Exception):
    """Bad arguments detected after parsing, such as a missing input path"""


# ===== Argument parsing =====

def positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not np.isfinite(value) or value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def tagged_directory(text: str) -> Tuple[str, Path]:
    tag, sep, directory = text.partition("=")
    if not sep or not tag or not directory:
        raise argparse.ArgumentTypeError(f"expected TAG=DIR, got {text!r}")
    return tag, Path(directory)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--profile", type=Path, help="calibration profile JSON (default: IRS_PROFILE or the shipped profile)")
    common.add_argument("--threshold", type=positive_float, help="override the profile's decision threshold")
    common.add_argument("--workers", type=positive_int, help="worker threads for corpus scoring")
    common.add_argument("--config", type=Path, help="YAML settings file (default: IRS_CONFIG or ./irs.yaml)")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")

    parser = argparse.ArgumentParser(prog="irs", description="Image Realism Score toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    score = sub.add_parser("score", parents=[common], help="score images and directories")
    score.add_argument("paths", nargs="+", type=Path)
    fmt = score.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="fmt", action="store_const", const="json", help="JSON lines on stdout (default)")
    fmt.add_argument("--csv", dest="fmt", action="store_const", const="csv", help="CSV report on stdout")
    score.add_argument("-o", "--output", type=Path, help="also write a report file (.csv or .json)")
    score.set_defaults(fmt="json", handler=cmd_score)

    calibrate = sub.add_parser("calibrate", parents=[common], help="build a calibration profile")
    calibrate.add_argument("--real", type=Path, required=True)
    calibrate.add_argument("--fake", type=Path, required=True)
    calibrate.add_argument("-o", "--output", type=Path, required=True, help="profile file to write")
    calibrate.add_argument("--figure", type=Path, help="write the before/after pentagons as SVG")
    calibrate.add_argument("--json", action="store_true", help="print the summary as JSON instead of a table")
    calibrate.set_defaults(handler=cmd_calibrate)

    evaluate = sub.add_parser("evaluate", parents=[common], help="detection metrics on labelled corpora")
    evaluate.add_argument("--real", type=Path, required=True)
    evaluate.add_argument("--fake", type=Path, required=True)
    evaluate.add_argument("--table", action="store_true", help="print a table instead of JSON")
    evaluate.add_argument("-o", "--output", type=Path, help="write the scored records as a report")
    evaluate.set_defaults(handler=cmd_evaluate)

    benchmark = sub.add_parser("benchmark", parents=[common], help="mean IRS per source")
    benchmark.add_argument("--corpus", type=tagged_directory, action="append", required=True, metavar="TAG=DIR")
    benchmark.add_argument("--json", action="store_true", help="print JSON instead of a table")
    benchmark.add_argument("--orderings", action="store_true", help="also report the largest-area ordering frequency")
    benchmark.add_argument("-o", "--output", type=Path, help="write the scored records as a report")
    benchmark.set_defaults(handler=cmd_benchmark)

    plot = sub.add_parser("plot", parents=[common], help="pentagon figure of report means")
    plot.add_argument("--input", type=Path, nargs="+", required=True, metavar="REPORT")
    plot.add_argument("-o", "--output", type=Path, required=True, metavar="FIG.svg")
    plot.add_argument("--compare", type=Path, metavar="PROFILE", help="overlay the same reports calibrated by another profile")
    plot.set_defaults(handler=cmd_plot)

    rotcheck = sub.add_parser("rotcheck", parents=[common], help="IRS deviation under rotation")
    rotcheck.add_argument("directory", type=Path)
    rotcheck.add_argument("--angle", type=float, action="append", default=[], help="extra free rotation angle in degrees")
    rotcheck.add_argument("--table", action="store_true", help="print a table instead of JSON")
    rotcheck.set_defaults(handler=cmd_rotcheck)

    selfcheck = sub.add_parser("selfcheck", parents=[common], help="run the embedded analytic fixtures")
    selfcheck.add_argument("--json", action="store_true")
    selfcheck.set_defaults(handler=cmd_selfcheck)
    return parser


# ===== Shared helpers =====

def _require_exists(*paths: Path) -> None:
    for path in paths:
        if not path.exists():
            raise UsageError(f"No such file or directory: {path}")


def _resolve_settings(args: argparse.Namespace) -> Settings:
    settings = get_settings(args.config)
    if args.workers is not None:
        settings = replace(settings, workers=args.workers)
    return settings


def _resolve_profile(args: argparse.Namespace, settings: Settings) -> CalibrationProfile:
    path = args.profile or settings.profile_path
    if path is not None:
        _require_exists(path)
        profile = load_profile(path)
    else:
        profile = default_profile()
    threshold = args.threshold or settings.threshold
    return profile.with_threshold(threshold) if threshold else profile


def _stdout() -> Console:
    return Console(file=sys.stdout, soft_wrap=True)


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


def _score_line(record: ScoreRecord, profile: CalibrationProfile) -> Dict:
    if not record.ok:
        return {"path": record.path, "error": record.error}
    return {
        "path": record.path,
        "irs": record.irs,
        "verdict": record.verdict.value,
        "radii": {m.value: r for m, r in zip(profile.ordering.slots, record.radii)},
        "measures": record.measure_vector.to_dict(),
    }


def _measured(controller: CorpusController, corpus: Corpus) -> List[MeasureVector]:
    return [v for v in controller.measure_corpus(corpus) if v is not None]


def _mean_radii(vectors: Sequence[MeasureVector], profile: CalibrationProfile) -> RadiiVector:
    radii = np.array([calibrate_vector(v, profile).as_array() for v in vectors])
    return RadiiVector(tuple(radii.mean(axis=0)), profile.ordering)


def _summary_series(summary: CalibrationSummary, profile: CalibrationProfile):
    colors = {("before", "real"): "#9ecae1", ("before", "fake"): "#fc9272",
              ("after", "real"): "#1f77b4", ("after", "fake"): "#d62728"}
    series = []
    for row in summary.rows:
        radii = RadiiVector(tuple(row[m.value] for m in profile.ordering.slots), profile.ordering)
        label = f"{row['corpus'].capitalize()} {row['stage']} re-scaling"
        series.append((label, radii, colors[(row["stage"], row["corpus"])]))
    return series


# ===== Subcommands =====

def cmd_score(args: argparse.Namespace, settings: Settings) -> int:
    _require_exists(*args.paths)
    profile = _resolve_profile(args, settings)

    entries: Dict[str, CorpusEntry] = {}
    for path in args.paths:
        if path.is_dir():
            for entry in ingest_corpus(path).entries:
                entries[str(entry.path)] = entry
        else:
            entries[str(path)] = CorpusEntry(path)
    records = CorpusController(settings.workers).score_corpus(Corpus(tuple(entries.values())), profile)

    if args.output:
        write_report(records, args.output)
    if args.fmt == "csv":
        sys.stdout.write(format_csv(records))
    else:
        for record in records:
            print(json.dumps(_score_line(record, profile)))
    return EXIT_OK if any(r.ok for r in records) else EXIT_FAILURE


def cmd_calibrate(args: argparse.Namespace, settings: Settings) -> int:
    _require_exists(args.real, args.fake)
    controller = CorpusController(settings.workers)
    real = _measured(controller, ingest_corpus(args.real, Label.REAL))
    fake = _measured(controller, ingest_corpus(args.fake, Label.FAKE))

    profile = compute_profile(
        real, fake,
        threshold=args.threshold or settings.threshold or DEFAULT_THRESHOLD,
        provenance={
            "real_corpus": str(args.real), "fake_corpus": str(args.fake),
            "real_images": str(len(real)), "fake_images": str(len(fake)),
        },
    )
    save_profile(profile, args.output)
    logger.info("Wrote profile to %s", args.output)

    summary = summarize_calibration(real, fake, profile)
    if args.figure:
        write_pentagon_svg(_summary_series(summary, profile), args.figure, title="Calibration")
    if args.json:
        _print_json({"profile": str(args.output), "ordering": profile.ordering.label(),
                     "rows": list(summary.rows), "gap_before": summary.gap_before, "gap_after": summary.gap_after})
    else:
        _stdout().print(calibration_table(summary))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace, settings: Settings) -> int:
    _require_exists(args.real, args.fake)
    profile = _resolve_profile(args, settings)
    controller = CorpusController(settings.workers)
    records = (controller.score_corpus(ingest_corpus(args.real, Label.REAL), profile)
               + controller.score_corpus(ingest_corpus(args.fake, Label.FAKE), profile))

    summary = detection_metrics(records)
    if args.output:
        write_report(records, args.output, summary=summary)
    if summary.total == 0:
        logger.error("No image could be scored")
        return EXIT_FAILURE
    if args.table:
        _stdout().print(evaluation_table(summary))
    else:
        _print_json(summary.to_dict())
    return EXIT_OK


def cmd_benchmark(args: argparse.Namespace, settings: Settings) -> int:
    _require_exists(*(directory for _, directory in args.corpus))
    profile = _resolve_profile(args, settings)
    controller = CorpusController(settings.workers)
    records = [r for tag, directory in args.corpus
               for r in controller.score_corpus(ingest_corpus(directory, source_tag=tag), profile)]

    table = benchmark_table(records)
    if args.output:
        write_report(records, args.output)
    if table.is_empty():
        logger.error("No image could be scored")
        return EXIT_FAILURE

    frequencies = None
    if args.orderings:
        frequencies = ordering_frequency([r.measure_vector for r in records if r.ok], profile)

    if args.json:
        payload = {"sources": table.to_dicts(), "published": PUBLISHED_MODEL_IRS}
        if frequencies is not None:
            payload["ordering_frequency"] = frequencies.to_dicts()
            payload["published_ordering_frequency"] = PUBLISHED_ORDERING_FREQUENCY
        _print_json(payload)
    else:
        console = _stdout()
        console.print(benchmark_rich_table(table))
        if frequencies is not None:
            console.print(ordering_table(frequencies))
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, settings: Settings) -> int:
    _require_exists(*args.input)
    if args.compare:
        _require_exists(args.compare)
    profile = _resolve_profile(args, settings)
    profiles = [("", profile)]
    if args.compare:
        profiles.append((f" ({args.compare.stem})", load_profile(args.compare)))

    series = []
    for report in args.input:
        vectors = [r.measure_vector for r in read_report(report) if r.ok]
        if not vectors:
            logger.warning("Report %s has no scored records", report)
            continue
        for suffix, p in profiles:
            color = SERIES_COLORS[len(series) % len(SERIES_COLORS)]
            series.append((f"{report.stem}{suffix}", _mean_radii(vectors, p), color))

    if not series:
        logger.error("Nothing to plot")
        return EXIT_FAILURE
    write_pentagon_svg(series, args.output)
    logger.info("Wrote %s", args.output)
    return EXIT_OK


def cmd_rotcheck(args: argparse.Namespace, settings: Settings) -> int:
    _require_exists(args.directory)
    profile = _resolve_profile(args, settings)
    controller = CorpusController(settings.workers)
    report = controller.rotation_check(ingest_corpus(args.directory), profile, angles=args.angle)

    if args.table:
        _stdout().print(rotation_table(report))
    else:
        _print_json(report.to_dict())
    if report.failures:
        logger.error("%d images deviate by more than 1e-3 under quarter-turns", len(report.failures))
        return EXIT_FAILURE
    return EXIT_OK


def cmd_selfcheck(args: argparse.Namespace, settings: Settings) -> int:
    results = run_selfcheck()
    if args.json:
        _print_json([{"name": r.name, "passed": r.passed, "expected": r.expected, "actual": r.actual}
                     for r in results])
    else:
        table = Table(title="Self-check")
        for name in ("Fixture", "Expected", "Actual", "Result"):
            table.add_column(name)
        for r in results:
            table.add_row(r.name, r.expected, r.actual, "pass" if r.passed else "FAIL")
        _stdout().print(table)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


# ===== Entry point =====

def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the subcommand and return the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse has already printed usage or help to the right stream
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    try:
        settings = _resolve_settings(args)
    except ConfigError as e:
        configure_logging(logging.WARNING)
        logger.error("%s", e)
        return EXIT_USAGE
    configure_logging(level_for(args.verbose, settings.log_level))

    try:
        return args.handler(args, settings)
    except UsageError as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except IrsError as e:
        logger.error("%s", e)
        return EXIT_FAILURE
    except Exception as e:
        logger.exception("Unexpected error: %s", e)
        return EXIT_FAILURE
