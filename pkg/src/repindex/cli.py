"""Command-line pipeline: ingest -> index -> trend -> bias -> reports.

Each stage reads files and writes files, and ``pipeline`` chains the
stages through the very same intermediate files, so running the stages
individually reproduces the pipeline's reports byte for byte.  All
outputs are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import re
import sys
import tempfile
from dataclasses import asdict
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from . import bias as bias_mod
from . import trend as trend_mod
from .indexer import average_entities, build_series
from .ingest import (
    IngestError,
    NativeRange,
    parse_opinions_jsonl,
    parse_scores_csv,
    write_opinions_jsonl,
)
from .model import IndexPoint, ReputationSeries
from .synth import SynthSpec, generate

REJECTIONS_FILE = "opinions.rejections.jsonl"
VALID_OPINIONS_FILE = "opinions.valid.jsonl"
GROUND_TRUTH_FILE = "synth_ground_truth.json"
SYNTH_FULL_FILE = "synth_full.csv"
SYNTH_SUPPRESSED_FILE = "synth_suppressed.csv"


class StageError(RuntimeError):
    """A hard error, annotated with the stage it came from."""


# ---------------------------------------------------------------------------
# file helpers
# ---------------------------------------------------------------------------

def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _slug(entity: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", entity)


def _write_index_csv(path: Path, series: ReputationSeries) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", "entity", "score", "count"])
    for point in series.points:
        writer.writerow(
            [point.period.isoformat(), series.target, repr(point.score), point.count]
        )
    _atomic_write(path, buf.getvalue())


def load_series_csv(
    path: Path, native: NativeRange | None = None
) -> dict[str, ReputationSeries]:
    """Read a score CSV into per-entity series.

    Accepts both the 3-column ingest schema (``date,entity,score``) and
    the 4-column index schema (``date,entity,score,count``).  Linear
    range scaling applies to the 3-column form only.
    """
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")
        handle.seek(0)
        if header == ["date", "entity", "score"]:
            by_entity = parse_scores_csv(handle, native)
            return {
                entity: ReputationSeries(
                    target=entity,
                    points=tuple(
                        IndexPoint(period=r.date, score=r.score, count=1)
                        for r in rows
                    ),
                )
                for entity, rows in by_entity.items()
            }
        if header == ["date", "entity", "score", "count"]:
            reader = csv.reader(handle)
            next(reader)
            grouped: dict[str, list[IndexPoint]] = {}
            for row in reader:
                if not row:
                    continue
                day, entity, score, count = row
                grouped.setdefault(entity, []).append(
                    IndexPoint(
                        period=date.fromisoformat(day),
                        score=float(score),
                        count=int(count),
                    )
                )
            return {
                entity: ReputationSeries(
                    target=entity,
                    points=tuple(sorted(points, key=lambda p: p.period)),
                )
                for entity, points in grouped.items()
            }
        raise IngestError(f"{path}: unrecognized header {header!r}")


def _load_all_series(
    paths: Sequence[Path], native: NativeRange | None
) -> dict[str, ReputationSeries]:
    series: dict[str, ReputationSeries] = {}
    for path in paths:
        for entity, one in load_series_csv(path, native).items():
            if entity in series:
                raise IngestError(f"entity {entity!r} appears in multiple inputs")
            series[entity] = one
    return series


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def run_ingest(input_path: Path, out_dir: Path) -> tuple[int, int]:
    """Validate an opinion feed; emit the clean feed and the rejections.

    Returns (accepted, rejected) counts.  Rejections never fail the run.
    """
    with open(input_path, encoding="utf-8") as handle:
        opinions, rejections = parse_opinions_jsonl(handle)

    buf = io.StringIO()
    write_opinions_jsonl(buf, opinions)
    _atomic_write(out_dir / VALID_OPINIONS_FILE, buf.getvalue())

    lines = "".join(
        json.dumps({"line": r.line, "reason": r.reason}) + "\n" for r in rejections
    )
    _atomic_write(out_dir / REJECTIONS_FILE, lines)
    return len(opinions), len(rejections)


def run_index(
    input_path: Path, out_dir: Path, composite_label: str
) -> list[Path]:
    """Build per-target daily series plus the cross-entity composite and
    write one ``index_<entity>.csv`` per series."""
    with open(input_path, encoding="utf-8") as handle:
        opinions, rejections = parse_opinions_jsonl(handle)
    if not opinions:
        raise StageError("index: no valid opinions in input")
    if rejections:
        print(f"index: skipped {len(rejections)} invalid lines", file=sys.stderr)

    targets = sorted({o.target for o in opinions})
    series_set = [build_series(opinions, target) for target in targets]
    composite = average_entities(series_set, label=composite_label)

    written = []
    for series in [*series_set, composite]:
        path = out_dir / f"index_{_slug(series.target)}.csv"
        _write_index_csv(path, series)
        written.append(path)
    return written


def run_trend(
    input_paths: Sequence[Path],
    out_dir: Path,
    slope_epsilon: float,
    native: NativeRange | None = None,
    plots: bool = True,
) -> dict[str, str]:
    """Write ``cumulative_<entity>.csv`` (and a rendered figure) per
    entity; returns the trend label per entity."""
    labels: dict[str, str] = {}
    for entity, series in sorted(_load_all_series(input_paths, native).items()):
        profile = trend_mod.with_trend(trend_mod.cumulate(series), slope_epsilon)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["date", "cumulative"])
        for day, value in profile.prefix:
            writer.writerow([day.isoformat(), repr(value)])
        _atomic_write(out_dir / f"cumulative_{_slug(entity)}.csv", buf.getvalue())
        if plots:
            from .plots import render_cumulative

            render_cumulative(profile, out_dir / f"cumulative_{_slug(entity)}.png")
        labels[entity] = profile.trend
    return labels


def run_bias(
    input_paths: Sequence[Path],
    out_dir: Path,
    sweep: Sequence[float],
    slope_epsilon: float,
    native: NativeRange | None = None,
) -> list[bias_mod.BiasReport]:
    """Analyze every entity and write table1.csv, table2.csv, per_w.csv
    and report.json."""
    reports = [
        bias_mod.analyze(series, sweep, slope_epsilon)
        for _, series in sorted(_load_all_series(input_paths, native).items())
    ]
    write_reports(reports, out_dir)
    return reports


def write_reports(reports: Sequence[bias_mod.BiasReport], out_dir: Path) -> None:
    def fmt(value: float | None) -> str:
        return "" if value is None else f"{value:.6f}"

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["entity", "skew_w", "skew_all", "trend"])
    for report in reports:
        writer.writerow(
            [report.entity, fmt(report.skew_window), fmt(report.skew_all), report.trend]
        )
    _atomic_write(out_dir / "table1.csv", buf.getvalue())

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["entity", "m"])
    for report in reports:
        if report.m_statistic is not None:
            writer.writerow([report.entity, fmt(report.m_statistic)])
    _atomic_write(out_dir / "table2.csv", buf.getvalue())

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["entity", "w_pct", "alpha", "m"])
    for report in reports:
        for band in report.per_w:
            writer.writerow(
                [
                    report.entity,
                    repr(band.w_pct),
                    "" if band.alpha is None else repr(band.alpha),
                    "" if band.m is None else repr(band.m),
                ]
            )
    _atomic_write(out_dir / "per_w.csv", buf.getvalue())

    payload = {"reports": [_report_dict(r) for r in reports]}
    _atomic_write(out_dir / "report.json", json.dumps(payload, indent=2) + "\n")


def _report_dict(report: bias_mod.BiasReport) -> dict:
    return {
        "entity": report.entity,
        "trend": report.trend,
        "sign_flipped": report.sign_flipped,
        "skew_window": report.skew_window,
        "skew_all": report.skew_all,
        "alpha": report.alpha,
        "beta": report.beta,
        "m_statistic": report.m_statistic,
        "warning": report.warning,
        "per_w": [
            {
                "w_pct": band.w_pct,
                "w_abs": band.w_abs,
                "alpha": band.alpha,
                "m": band.m,
                "counts": asdict(band.counts),
            }
            for band in report.per_w
        ],
    }


def run_synth(spec: SynthSpec, out_dir: Path) -> None:
    """Generate full + suppressed score CSVs and the ground-truth JSON."""
    result = generate(spec)
    for name, series in (
        (SYNTH_FULL_FILE, result.full),
        (SYNTH_SUPPRESSED_FILE, result.suppressed),
    ):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["date", "entity", "score"])
        for point in series.points:
            writer.writerow(
                [point.period.isoformat(), series.target, repr(point.score)]
            )
        _atomic_write(out_dir / name, buf.getvalue())

    gt = result.ground_truth
    payload = {
        "spec": asdict(gt.spec),
        "m_full": gt.m_full,
        "range_full": gt.range_full,
        "w_abs": gt.w_abs,
        "band": {
            "lo_exclusive": gt.band_lo_exclusive,
            "hi_inclusive": gt.band_hi_inclusive,
        },
        "deleted_count": gt.deleted_count,
        "deleted_indices": list(gt.deleted_indices),
        "rng": "numpy default_rng (PCG64)",
    }
    _atomic_write(out_dir / GROUND_TRUTH_FILE, json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def parse_sweep(text: str) -> list[float]:
    """Parse ``lo:hi:step`` into an inclusive grid of semi-widths."""
    try:
        lo, hi, step = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad sweep {text!r}, expected lo:hi:step")
    if step <= 0 or lo <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad sweep bounds in {text!r}")
    values = []
    k = 0
    while (value := lo + k * step) <= hi + 1e-9:
        values.append(value)
        k += 1
    return values


def _native(args: argparse.Namespace) -> NativeRange | None:
    lo, hi = getattr(args, "native_min", None), getattr(args, "native_max", None)
    if lo is None and hi is None:
        return None
    if lo is None or hi is None:
        raise StageError("--native-min and --native-max must be given together")
    return NativeRange(lo, hi)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repindex",
        description="Reputation index construction, trend classification and "
        "missing-positive-sentiment measurement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, inputs=1):
        if inputs:
            p.add_argument(
                "--input", required=True, nargs="+" if inputs > 1 else None,
                type=Path, help="input file(s)",
            )
        p.add_argument("--out-dir", required=True, type=Path, help="output directory")

    p = sub.add_parser("ingest", help="validate an opinion JSONL feed")
    add_common(p)

    p = sub.add_parser("index", help="build daily reputation series from opinions")
    add_common(p)
    p.add_argument("--composite-label", default="composite")

    p = sub.add_parser("trend", help="cumulative profiles and trend labels")
    add_common(p, inputs=2)
    p.add_argument("--slope-epsilon", type=float, default=0.0)
    p.add_argument("--native-min", type=float)
    p.add_argument("--native-max", type=float)
    p.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    p = sub.add_parser("bias", help="missing-positive-sentiment analysis")
    add_common(p, inputs=2)
    p.add_argument("--sweep", type=parse_sweep, default=list(bias_mod.DEFAULT_SWEEP))
    p.add_argument("--slope-epsilon", type=float, default=0.0)
    p.add_argument("--native-min", type=float)
    p.add_argument("--native-max", type=float)

    p = sub.add_parser("synth", help="generate a synthetic suppressed series")
    add_common(p, inputs=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--mean", type=float, default=0.1)
    p.add_argument("--sd", type=float, default=0.3)
    p.add_argument("--suppress-fraction", type=float, default=0.0)
    p.add_argument("--suppress-band", type=float, default=16.5)

    p = sub.add_parser("pipeline", help="ingest -> index -> trend -> bias")
    add_common(p)
    p.add_argument("--composite-label", default="composite")
    p.add_argument("--sweep", type=parse_sweep, default=list(bias_mod.DEFAULT_SWEEP))
    p.add_argument("--slope-epsilon", type=float, default=0.0)
    p.add_argument("--no-plots", action="store_true")

    return parser


def _run(args: argparse.Namespace) -> int:
    out_dir: Path = args.out_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    if args.command == "ingest":
        accepted, rejected = run_ingest(args.input, out_dir)
        print(f"ingest: {accepted} accepted, {rejected} rejected")
        return 0

    if args.command == "index":
        written = run_index(args.input, out_dir, args.composite_label)
        print(f"index: wrote {len(written)} series")
        return 0

    if args.command == "trend":
        labels = run_trend(
            args.input, out_dir, args.slope_epsilon,
            native=_native(args), plots=not args.no_plots,
        )
        for entity, label in labels.items():
            print(f"{entity}: {label}")
        return 0

    if args.command == "bias":
        reports = run_bias(
            args.input, out_dir, args.sweep, args.slope_epsilon, native=_native(args)
        )
        print(f"bias: analyzed {len(reports)} entities")
        return 0

    if args.command == "synth":
        spec = SynthSpec(
            n=args.n, mean=args.mean, sd=args.sd, seed=args.seed,
            suppress_fraction=args.suppress_fraction,
            suppress_band_pct=args.suppress_band,
        )
        run_synth(spec, out_dir)
        print(f"synth: wrote {SYNTH_FULL_FILE}, {SYNTH_SUPPRESSED_FILE}, "
              f"{GROUND_TRUTH_FILE}")
        return 0

    if args.command == "pipeline":
        accepted, rejected = run_ingest(args.input, out_dir)
        print(f"ingest: {accepted} accepted, {rejected} rejected")
        index_files = run_index(
            out_dir / VALID_OPINIONS_FILE, out_dir, args.composite_label
        )
        print(f"index: wrote {len(index_files)} series")
        labels = run_trend(
            index_files, out_dir, args.slope_epsilon, plots=not args.no_plots
        )
        for entity, label in labels.items():
            print(f"{entity}: {label}")
        reports = run_bias(index_files, out_dir, args.sweep, args.slope_epsilon)
        print(f"bias: analyzed {len(reports)} entities")
        return 0

    raise StageError(f"unknown command {args.command!r}")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except FileNotFoundError as exc:
        print(f"{args.command}: missing input: {exc}", file=sys.stderr)
        return 1
    except (StageError, IngestError, ValueError) as exc:
        print(f"{args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
