"""Contamination statistics over a match database.

Every statistic is computed from integer counts; percentages are rendered
at one decimal (round half to even) only at the edge, via exact Decimal
arithmetic.  The one deliberate exception: a decontamination row's relative
accuracy change is derived from the two *rendered* accuracies, which is the
arithmetic identity the reported tables satisfy.

A problem is "seen" when its best aggregated score is exactly 100, i.e. a
perfect surface- or token-level match of its gold solution exists in the
scanned corpus.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from decimal import Decimal, ROUND_HALF_EVEN
from pathlib import Path

from .errors import EmptySurvivorSet, TooFewProblems
from .ingest import BenchmarkProblem
from .matchstore import MatchDatabase

__all__ = [
    "UNDEFINED",
    "render_pct",
    "render_score",
    "ProblemStat",
    "ContaminationReport",
    "DecontaminationRow",
    "GapRow",
    "SubsetReport",
    "SweepRow",
    "ScatterRow",
    "contamination_report",
    "decontaminate",
    "performance_gap",
    "subset_decouple",
    "threshold_sweep",
    "length_scatter",
    "MODE_EQUAL_100",
    "MODE_GREATER_THAN",
]

logger = logging.getLogger(__name__)

# Rendered in place of an accuracy over an empty subset; never silently 0.
UNDEFINED = "—"

MODE_EQUAL_100 = "equal-100"
MODE_GREATER_THAN = "greater-than"

_ONE_DP = Decimal("0.1")


def render_pct(numer: int, denom: int) -> str:
    """Percentage of two integer counts at one decimal, half-even."""
    if denom == 0:
        return UNDEFINED
    value = (Decimal(100 * numer) / Decimal(denom)).quantize(
        _ONE_DP, rounding=ROUND_HALF_EVEN)
    return str(value)


def render_score(value: float) -> str:
    return f"{value:.2f}"


def _relative_change(acc_original: str, acc_decontaminated: str) -> str:
    if UNDEFINED in (acc_original, acc_decontaminated):
        return UNDEFINED
    base = Decimal(acc_original)
    if base == 0:
        return UNDEFINED
    rel = (Decimal(acc_decontaminated) - base) / base * 100
    return str(rel.quantize(_ONE_DP, rounding=ROUND_HALF_EVEN))


@dataclass(frozen=True)
class ProblemStat:
    task_id: str
    top1: float
    top10: float

    @property
    def seen(self) -> bool:
        return self.top1 == 100.0


def _problem_stats(db: MatchDatabase,
                   benchmark: list[BenchmarkProblem]) -> list[ProblemStat]:
    stats = []
    missing = 0
    for problem in benchmark:
        mset = db.problems.get(problem.task_id)
        if mset is None:
            missing += 1
            stats.append(ProblemStat(problem.task_id, 0.0, 0.0))
        else:
            stats.append(ProblemStat(problem.task_id, mset.top1, mset.top10))
    if missing:
        logger.warning(
            "match database is missing %d of %d benchmark problems; "
            "treating their scores as 0", missing, len(benchmark))
    return stats


def _histogram(scores: list[float]) -> list[int]:
    """Eleven bins: [0,10), [10,20), ..., [90,100), and exactly 100."""
    bins = [0] * 11
    for score in scores:
        bins[10 if score == 100.0 else min(int(score // 10), 9)] += 1
    return bins


@dataclass(frozen=True)
class ContaminationReport:
    rows: tuple[ProblemStat, ...]
    seen_count: int
    total: int
    top1_hist: tuple[int, ...]
    top10_hist: tuple[int, ...]

    @property
    def seen_fraction(self) -> str:
        return render_pct(self.seen_count, self.total)


def contamination_report(db: MatchDatabase,
                         benchmark: list[BenchmarkProblem]) -> ContaminationReport:
    stats = _problem_stats(db, benchmark)
    return ContaminationReport(
        rows=tuple(stats),
        seen_count=sum(1 for s in stats if s.seen),
        total=len(stats),
        top1_hist=tuple(_histogram([s.top1 for s in stats])),
        top10_hist=tuple(_histogram([s.top10 for s in stats])),
    )


@dataclass(frozen=True)
class DecontaminationRow:
    threshold_mode: str
    tau: float | None
    n_total: int
    n_removed: int
    n_correct_total: int
    n_correct_survivors: int

    @property
    def pct_removed(self) -> str:
        return render_pct(self.n_removed, self.n_total)

    @property
    def acc_original(self) -> str:
        return render_pct(self.n_correct_total, self.n_total)

    @property
    def acc_decontaminated(self) -> str:
        return render_pct(self.n_correct_survivors, self.n_total - self.n_removed)

    @property
    def relative_change(self) -> str:
        return _relative_change(self.acc_original, self.acc_decontaminated)


def decontaminate(db: MatchDatabase, benchmark: list[BenchmarkProblem],
                  predictions: dict[str, bool], mode: str = MODE_EQUAL_100,
                  tau: float | None = None) -> tuple[DecontaminationRow, list[str]]:
    """Remove contaminated problems and report accuracy on the survivors.

    ``equal-100`` removes problems whose top-1 score is exactly 100;
    ``greater-than`` removes those with top-1 strictly above ``tau``.
    Returns the summary row and the surviving task_ids in benchmark order.
    """
    if mode not in (MODE_EQUAL_100, MODE_GREATER_THAN):
        raise ValueError(f"unknown decontamination mode {mode!r}")
    if mode == MODE_GREATER_THAN and tau is None:
        raise ValueError("greater-than mode needs a threshold")
    stats = _problem_stats(db, benchmark)
    if mode == MODE_EQUAL_100:
        removed = {s.task_id for s in stats if s.top1 == 100.0}
    else:
        removed = {s.task_id for s in stats if s.top1 > tau}
    survivors = [s.task_id for s in stats if s.task_id not in removed]
    if not survivors:
        raise EmptySurvivorSet(
            f"decontamination at mode={mode} tau={tau} removed all "
            f"{len(stats)} problems")
    row = DecontaminationRow(
        threshold_mode=mode,
        tau=tau,
        n_total=len(stats),
        n_removed=len(removed),
        n_correct_total=sum(1 for s in stats if predictions[s.task_id]),
        n_correct_survivors=sum(1 for t in survivors if predictions[t]),
    )
    return row, survivors


@dataclass(frozen=True)
class GapRow:
    decile_size: int
    n_correct_top: int
    n_correct_bottom: int

    @property
    def top_decile_acc(self) -> str:
        return render_pct(self.n_correct_top, self.decile_size)

    @property
    def bottom_decile_acc(self) -> str:
        return render_pct(self.n_correct_bottom, self.decile_size)

    @property
    def gap(self) -> str:
        diff = Decimal(self.top_decile_acc) - Decimal(self.bottom_decile_acc)
        return str(diff.quantize(_ONE_DP, rounding=ROUND_HALF_EVEN))


def performance_gap(db: MatchDatabase, benchmark: list[BenchmarkProblem],
                    predictions: dict[str, bool]) -> GapRow:
    """Accuracy gap between the most- and least-contaminated deciles.

    Problems rank by top-10 average score, descending (ties: task_id
    ascending); each decile holds floor(N/10) problems.
    """
    stats = _problem_stats(db, benchmark)
    if len(stats) < 10:
        raise TooFewProblems(f"{len(stats)} problems; need at least 10")
    ranked = sorted(stats, key=lambda s: (-s.top10, s.task_id))
    decile = len(stats) // 10
    top = ranked[:decile]
    bottom = ranked[-decile:]
    return GapRow(
        decile_size=decile,
        n_correct_top=sum(1 for s in top if predictions[s.task_id]),
        n_correct_bottom=sum(1 for s in bottom if predictions[s.task_id]),
    )


@dataclass(frozen=True)
class SubsetAccuracy:
    size: int
    n_correct: int

    @property
    def accuracy(self) -> str:
        return render_pct(self.n_correct, self.size) if self.size else UNDEFINED


@dataclass(frozen=True)
class SubsetReport:
    """Accuracy on problems seen/unseen in each of two scanned corpora."""

    n_total: int
    seen_a: SubsetAccuracy
    unseen_a: SubsetAccuracy
    seen_b: SubsetAccuracy
    unseen_b: SubsetAccuracy
    n_seen_both: int


def subset_decouple(db_a: MatchDatabase, db_b: MatchDatabase,
                    benchmark: list[BenchmarkProblem],
                    predictions: dict[str, bool]) -> SubsetReport:
    stats_a = _problem_stats(db_a, benchmark)
    stats_b = _problem_stats(db_b, benchmark)
    seen_a = {s.task_id for s in stats_a if s.seen}
    seen_b = {s.task_id for s in stats_b if s.seen}
    all_ids = [problem.task_id for problem in benchmark]

    def subset(ids) -> SubsetAccuracy:
        members = [t for t in all_ids if t in ids]
        return SubsetAccuracy(len(members),
                              sum(1 for t in members if predictions[t]))

    return SubsetReport(
        n_total=len(all_ids),
        seen_a=subset(seen_a),
        unseen_a=subset(set(all_ids) - seen_a),
        seen_b=subset(seen_b),
        unseen_b=subset(set(all_ids) - seen_b),
        n_seen_both=len(seen_a & seen_b),
    )


@dataclass(frozen=True)
class SweepRow:
    threshold: float
    size: int
    n_correct: int

    @property
    def accuracy(self) -> str:
        return render_pct(self.n_correct, self.size) if self.size else UNDEFINED


def threshold_sweep(db: MatchDatabase, benchmark: list[BenchmarkProblem],
                    predictions: dict[str, bool],
                    thresholds: list[float]) -> list[SweepRow]:
    """Accuracy over problems whose top-10 score is at least each threshold."""
    for t in thresholds:
        if not 0 <= t <= 100:
            raise ValueError(f"threshold {t} outside [0, 100]")
    stats = _problem_stats(db, benchmark)
    rows = []
    for t in thresholds:
        members = [s for s in stats if s.top10 >= t]
        rows.append(SweepRow(
            threshold=t,
            size=len(members),
            n_correct=sum(1 for s in members if predictions[s.task_id]),
        ))
    return rows


@dataclass(frozen=True)
class ScatterRow:
    task_id: str
    gold_char_length: int
    top10: float
    correct: bool


def length_scatter(db: MatchDatabase, benchmark: list[BenchmarkProblem],
                   predictions: dict[str, bool]) -> list[ScatterRow]:
    """Plot-ready rows: gold length vs top-10 score vs correctness."""
    stats = {s.task_id: s for s in _problem_stats(db, benchmark)}
    return [
        ScatterRow(
            task_id=problem.task_id,
            gold_char_length=len(problem.gold_solution),
            top10=stats[problem.task_id].top10,
            correct=predictions[problem.task_id],
        )
        for problem in benchmark
    ]


# ---------------------------------------------------------------------------
# CSV rendering, one file per operation
# ---------------------------------------------------------------------------


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_contamination_csv(report: ContaminationReport, path: str | Path) -> None:
    _write_csv(Path(path), ["task_id", "top1", "top10", "seen"],
               [[s.task_id, render_score(s.top1), render_score(s.top10),
                 str(s.seen).lower()] for s in report.rows])


def write_decontamination_csv(row: DecontaminationRow, path: str | Path) -> None:
    _write_csv(
        Path(path),
        ["mode", "threshold", "n_total", "n_removed", "pct_removed",
         "acc_original", "acc_decontaminated", "relative_change"],
        [[row.threshold_mode,
          "" if row.tau is None else f"{row.tau:g}",
          row.n_total, row.n_removed, row.pct_removed,
          row.acc_original, row.acc_decontaminated, row.relative_change]])


def write_gap_csv(row: GapRow, path: str | Path) -> None:
    _write_csv(Path(path),
               ["decile_size", "top_decile_acc", "bottom_decile_acc", "gap"],
               [[row.decile_size, row.top_decile_acc, row.bottom_decile_acc,
                 row.gap]])


def write_subsets_csv(report: SubsetReport, path: str | Path) -> None:
    _write_csv(
        Path(path),
        ["n_total", "size_seen_a", "acc_seen_a", "acc_unseen_a",
         "size_seen_b", "acc_seen_b", "acc_unseen_b", "n_seen_both"],
        [[report.n_total,
          report.seen_a.size, report.seen_a.accuracy, report.unseen_a.accuracy,
          report.seen_b.size, report.seen_b.accuracy, report.unseen_b.accuracy,
          report.n_seen_both]])


def write_sweep_csv(rows: list[SweepRow], path: str | Path) -> None:
    _write_csv(Path(path), ["threshold", "subset_size", "accuracy"],
               [[f"{r.threshold:g}", r.size, r.accuracy] for r in rows])


def write_scatter_csv(rows: list[ScatterRow], path: str | Path) -> None:
    _write_csv(Path(path),
               ["task_id", "gold_char_length", "top10", "correct"],
               [[r.task_id, r.gold_char_length, render_score(r.top10),
                 str(r.correct).lower()] for r in rows])
