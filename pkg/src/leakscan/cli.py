"""Command-line front-end.

Subcommands: ``scan`` runs the two-stage corpus scan and writes a match
database; ``report``, ``decontaminate``, ``gap``, ``subsets``, ``sweep``,
and ``scatter`` derive the analytics tables from a database (one CSV per
command); ``sim`` prints the three similarity scores for a pair of files.

Progress and summaries go to stderr, data goes to files; the exit code is
nonzero only on fatal errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import analytics
from .config import RunConfig
from .errors import LeakscanError
from .ingest import load_benchmark, load_predictions
from .matchstore import load as load_db
from .pipeline import run_scan
from .semantic import fingerprint_text, semantic_similarity
from .surface import surface_similarity

__all__ = ["main"]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="run configuration file")
    parser.add_argument("--benchmark", help="benchmark record file")
    parser.add_argument("--corpus", help="corpus root directory or record file")
    parser.add_argument("--corpus-mode", choices=("directory", "stream"))
    parser.add_argument("--glob", help="filename filter in directory mode")
    parser.add_argument("--topk", type=int, help="candidates kept per problem")
    parser.add_argument("--stride", type=int, help="window stride in characters")
    parser.add_argument("--distance", choices=("indel", "levenshtein"))
    parser.add_argument("--no-prune", action="store_true",
                        help="disable scan pruning (slow; results identical)")
    parser.add_argument("--k", type=int, help="fingerprint gram length, in tokens")
    parser.add_argument("--w", type=int, help="fingerprint winnow window, in grams")
    parser.add_argument("--workers", type=int, help="scan worker processes")
    parser.add_argument("--out", help="output directory")


def _build_config(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {
        "benchmark": args.benchmark,
        "corpus": args.corpus,
        "corpus_mode": args.corpus_mode,
        "corpus_glob": args.glob,
        "capacity": args.topk,
        "stride": args.stride,
        "distance": args.distance,
        "semantic_k": args.k,
        "semantic_w": args.w,
        "workers": args.workers,
        "out_dir": args.out,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    if args.no_prune:
        config.prune = False
    config.validate()
    return config


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out or "leakscan-out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_inputs(args: argparse.Namespace):
    benchmark = load_benchmark(args.benchmark)
    predictions = load_predictions(args.predictions, benchmark)
    return benchmark, predictions


def _cmd_scan(args: argparse.Namespace) -> int:
    config = _build_config(args)
    db_path = run_scan(config, progress=not args.quiet)
    print(f"[scan] match database written to {db_path}", file=sys.stderr)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    benchmark = load_benchmark(args.benchmark)
    db = load_db(args.db)
    report = analytics.contamination_report(db, benchmark)
    out = _out_dir(args) / "contamination.csv"
    analytics.write_contamination_csv(report, out)
    print(f"[report] {report.seen_count}/{report.total} problems seen "
          f"({report.seen_fraction}%); table in {out}", file=sys.stderr)
    print(f"[report] top1 histogram (0-100 by tens, then exactly 100): "
          f"{list(report.top1_hist)}", file=sys.stderr)
    return 0


def _cmd_decontaminate(args: argparse.Namespace) -> int:
    benchmark, predictions = _load_inputs(args)
    db = load_db(args.db)
    row, survivors = analytics.decontaminate(
        db, benchmark, predictions, mode=args.mode, tau=args.threshold)
    out = _out_dir(args) / "decontamination.csv"
    analytics.write_decontamination_csv(row, out)
    if args.survivors_out:
        Path(args.survivors_out).write_text(
            "\n".join(survivors) + "\n", encoding="utf-8")
    print(f"[decontaminate] removed {row.n_removed}/{row.n_total} "
          f"({row.pct_removed}%): accuracy {row.acc_original}% -> "
          f"{row.acc_decontaminated}% ({row.relative_change}%); table in {out}",
          file=sys.stderr)
    return 0


def _cmd_gap(args: argparse.Namespace) -> int:
    benchmark, predictions = _load_inputs(args)
    db = load_db(args.db)
    row = analytics.performance_gap(db, benchmark, predictions)
    out = _out_dir(args) / "gap.csv"
    analytics.write_gap_csv(row, out)
    print(f"[gap] top decile {row.top_decile_acc}% vs bottom "
          f"{row.bottom_decile_acc}% (gap {row.gap}, decile size "
          f"{row.decile_size}); table in {out}", file=sys.stderr)
    return 0


def _cmd_subsets(args: argparse.Namespace) -> int:
    benchmark, predictions = _load_inputs(args)
    db_a = load_db(args.db_a)
    db_b = load_db(args.db_b)
    report = analytics.subset_decouple(db_a, db_b, benchmark, predictions)
    out = _out_dir(args) / "subsets.csv"
    analytics.write_subsets_csv(report, out)
    print(f"[subsets] seen sizes {report.seen_a.size}/{report.seen_b.size} "
          f"(both: {report.n_seen_both}); table in {out}", file=sys.stderr)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    benchmark, predictions = _load_inputs(args)
    db = load_db(args.db)
    thresholds = [float(t) for t in args.thresholds.split(",") if t.strip()]
    rows = analytics.threshold_sweep(db, benchmark, predictions, thresholds)
    out = _out_dir(args) / "sweep.csv"
    analytics.write_sweep_csv(rows, out)
    print(f"[sweep] {len(rows)} thresholds; table in {out}", file=sys.stderr)
    return 0


def _cmd_scatter(args: argparse.Namespace) -> int:
    benchmark, predictions = _load_inputs(args)
    db = load_db(args.db)
    rows = analytics.length_scatter(db, benchmark, predictions)
    out = _out_dir(args) / "scatter.csv"
    analytics.write_scatter_csv(rows, out)
    print(f"[scatter] {len(rows)} rows; table in {out}", file=sys.stderr)
    return 0


def _cmd_sim(args: argparse.Namespace) -> int:
    try:
        text_a = Path(args.file_a).read_text(encoding="utf-8", errors="replace")
        text_b = Path(args.file_b).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        raise LeakscanError(f"cannot read input: {exc}") from exc
    surface = surface_similarity(text_a, text_b, args.distance or "indel")
    k = args.k or RunConfig().semantic_k
    w = args.w or RunConfig().semantic_w
    semantic = semantic_similarity(fingerprint_text(text_a, k, w),
                                   fingerprint_text(text_b, k, w))
    print(f"surface    {surface:.2f}")
    print(f"semantic   {semantic:.2f}")
    print(f"aggregated {max(surface, semantic):.2f}")
    return 0


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakscan",
        description="Find benchmark gold solutions leaked into a training "
                    "corpus and quantify the contamination.")
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", help="scan a corpus and write a match database")
    _add_config_flags(scan)
    scan.add_argument("--quiet", action="store_true", help="suppress progress")
    scan.set_defaults(func=_cmd_scan)

    def table_cmd(name: str, func, help_text: str, needs_predictions=True,
                  two_dbs=False):
        cmd = sub.add_parser(name, help=help_text)
        if two_dbs:
            cmd.add_argument("--db-a", required=True,
                             help="match database for the first corpus")
            cmd.add_argument("--db-b", required=True,
                             help="match database for the second corpus")
        else:
            cmd.add_argument("--db", required=True, help="match database file")
        cmd.add_argument("--benchmark", required=True)
        if needs_predictions:
            cmd.add_argument("--predictions", required=True)
        cmd.add_argument("--out", help="output directory")
        cmd.set_defaults(func=func)
        return cmd

    table_cmd("report", _cmd_report,
              "per-problem scores, seen fraction, score histograms",
              needs_predictions=False)

    decon = table_cmd("decontaminate", _cmd_decontaminate,
                      "accuracy after removing contaminated problems")
    decon.add_argument("--mode",
                       choices=(analytics.MODE_EQUAL_100,
                                analytics.MODE_GREATER_THAN),
                       default=analytics.MODE_EQUAL_100)
    decon.add_argument("--threshold", type=float,
                       help="top-1 cutoff for greater-than mode")
    decon.add_argument("--survivors-out",
                       help="also write surviving task_ids to this file")

    table_cmd("gap", _cmd_gap, "accuracy gap between top/bottom deciles")
    table_cmd("subsets", _cmd_subsets,
              "accuracy on seen/unseen subsets of two corpora", two_dbs=True)

    sweep = table_cmd("sweep", _cmd_sweep, "accuracy above score thresholds")
    sweep.add_argument("--thresholds", default="0,10,20,30,40,50,60,70,80,90,100",
                       help="comma-separated score thresholds")

    table_cmd("scatter", _cmd_scatter,
              "gold length vs top-10 score vs correctness")

    sim = sub.add_parser("sim", help="print similarity scores for two files")
    sim.add_argument("file_a")
    sim.add_argument("file_b")
    sim.add_argument("--distance", choices=("indel", "levenshtein"))
    sim.add_argument("--k", type=int)
    sim.add_argument("--w", type=int)
    sim.set_defaults(func=_cmd_sim)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    args = _parser().parse_args(argv)
    try:
        return args.func(args)
    except LeakscanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
