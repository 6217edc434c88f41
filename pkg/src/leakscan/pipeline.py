"""Scan orchestration: corpus documents -> per-problem match databases.

The main process streams the corpus, groups documents into batches, and
dispatches them to a worker pool.  Each worker keeps its own top-K set per
problem while scanning its batch and returns only those survivors; the main
process folds worker results into the global sets.  Because a top-K set
under the total candidate order is insensitive to insertion order, and a
candidate pruned against any current K-th-best score can never reach the
final top K, the resulting database is byte-identical for any worker count,
batch size, or completion order.

Worker floors: a batch is dispatched with a snapshot of each problem's
current global K-th-best score; workers tighten it further with their own
local K-th best.  Stale floors only cost extra work, never results.
"""

from __future__ import annotations

import logging
import multiprocessing
import sys
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .config import ConfigError, RunConfig
from .ingest import BenchmarkProblem, CorpusDocument, load_benchmark, stream_corpus
from .matchstore import (
    MatchCandidate,
    MatchDatabase,
    ProblemMatchSet,
    ScanMeta,
    dedup_overlaps,
    persist,
    rescore_semantic,
)
from .surface import (
    GoldQuery,
    WindowSpec,
    scan_full_windows,
    scan_tail_windows,
    warm_kernels,
)

__all__ = ["run_scan", "scan_corpus"]

logger = logging.getLogger(__name__)

_BATCH_CHARS = 2 << 20
_BATCH_DOCS = 64

# Worker state, installed in the parent before forking the pool (or set
# directly for in-process scanning).
_STATE: "_ScanState | None" = None


@dataclass
class _GoldPack:
    task_id: str
    query: GoldQuery
    spec: WindowSpec


@dataclass
class _ScanState:
    packs: list[_GoldPack]
    capacity: int
    prune: bool


# Candidate rows cross the process boundary as plain tuples:
# (task_id, doc_id, offset, snippet, surface).
_Row = tuple[str, str, int, str, float]


def _scan_batch(docs: list[tuple[str, str]],
                floors: dict[str, float]) -> list[_Row]:
    state = _STATE
    local_sets = {
        pack.task_id: ProblemMatchSet(pack.task_id, state.capacity)
        for pack in state.packs
    }
    for doc_id, content in docs:
        for pack in state.packs:
            lset = local_sets[pack.task_id]
            dispatch_floor = floors[pack.task_id]
            w_len = pack.spec.length

            def floor_fn() -> float:
                return max(dispatch_floor, lset.floor)

            def emit(offset: int, score: float) -> None:
                lset.offer(MatchCandidate(
                    task_id=pack.task_id,
                    doc_id=doc_id,
                    offset=offset,
                    snippet=content[offset:offset + w_len],
                    surface=score,
                ))

            scan_full_windows(pack.query, content, pack.spec, floor_fn, emit,
                              prune=state.prune)
            scan_tail_windows(pack.query, content, pack.spec, floor_fn, emit)
    return [
        (c.task_id, c.doc_id, c.offset, c.snippet, c.surface)
        for lset in local_sets.values()
        for c in lset.candidates
    ]


def _batches(stream) -> Iterator[list[tuple[str, str]]]:
    batch: list[tuple[str, str]] = []
    size = 0
    for doc in stream:
        batch.append((doc.doc_id, doc.content))
        size += len(doc.content)
        if size >= _BATCH_CHARS or len(batch) >= _BATCH_DOCS:
            yield batch
            batch, size = [], 0
    if batch:
        yield batch


class _Progress:
    """Periodic scan progress on stderr."""

    def __init__(self, enabled: bool, sets: dict[str, ProblemMatchSet]):
        self.enabled = enabled
        self.sets = sets
        self.docs = 0
        self.chars = 0
        self.started = time.monotonic()
        self.last = self.started

    def update(self, batch: list[tuple[str, str]]) -> None:
        self.docs += len(batch)
        self.chars += sum(len(content) for _, content in batch)
        now = time.monotonic()
        if not self.enabled or now - self.last < 2.0:
            return
        self.last = now
        elapsed = now - self.started
        floors = sorted(mset.floor for mset in self.sets.values())
        mid = floors[len(floors) // 2] if floors else 0.0
        print(
            f"[scan] docs={self.docs} chars={self.chars / 1e6:.1f}M "
            f"rate={self.docs / elapsed:.1f} docs/s floor(p50)={mid:.2f}",
            file=sys.stderr,
        )


def scan_corpus(benchmark: list[BenchmarkProblem], corpus,
                config: RunConfig, progress: bool = False) -> MatchDatabase:
    """Run the full two-stage scan and return the match database.

    ``corpus`` is any iterable of CorpusDocument (typically a CorpusStream).
    Stage one keeps the top-K windows per problem by surface score; stage
    two removes near-duplicate overlapping windows and adds semantic and
    aggregated scores.
    """
    global _STATE
    packs = [
        _GoldPack(
            task_id=problem.task_id,
            query=GoldQuery(problem.gold_solution, config.distance),
            spec=WindowSpec(length=max(1, len(problem.gold_solution)),
                            stride=config.stride),
        )
        for problem in benchmark
    ]
    sets = {
        pack.task_id: ProblemMatchSet(pack.task_id, config.capacity)
        for pack in packs
    }
    _STATE = _ScanState(packs=packs, capacity=config.capacity,
                        prune=config.prune)
    tracker = _Progress(progress, sets)

    def fold(rows: list[_Row]) -> None:
        for task_id, doc_id, offset, snippet, surface in rows:
            sets[task_id].offer(MatchCandidate(
                task_id=task_id, doc_id=doc_id, offset=offset,
                snippet=snippet, surface=surface))

    def floors() -> dict[str, float]:
        return {task_id: mset.floor for task_id, mset in sets.items()}

    if config.workers <= 1:
        for batch in _batches(corpus):
            fold(_scan_batch(batch, floors()))
            tracker.update(batch)
    else:
        warm_kernels()  # compile before forking so workers inherit the code
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=config.workers) as pool:
            pending: deque = deque()
            for batch in _batches(corpus):
                while len(pending) >= config.workers * 2:
                    done, done_batch = pending.popleft()
                    fold(done.get())
                    tracker.update(done_batch)
                pending.append((pool.apply_async(_scan_batch, (batch, floors())),
                                batch))
            while pending:
                done, done_batch = pending.popleft()
                fold(done.get())
                tracker.update(done_batch)
    _STATE = None

    golds = {problem.task_id: problem.gold_solution for problem in benchmark}
    problems = {}
    for task_id, mset in sets.items():
        deduped = dedup_overlaps(mset)
        problems[task_id] = rescore_semantic(deduped, golds[task_id],
                                             config.semantic_k,
                                             config.semantic_w)
    meta = ScanMeta(capacity=config.capacity, k=config.semantic_k,
                    w=config.semantic_w, distance=config.distance,
                    corpus=str(config.corpus or ""))
    return MatchDatabase(meta=meta, problems=problems)


def run_scan(config: RunConfig, progress: bool = True) -> Path:
    """Scan per ``config`` and persist the database under the out dir."""
    config.validate()
    if not config.benchmark:
        raise ConfigError("benchmark.path is required")
    if not config.corpus:
        raise ConfigError("corpus.root is required")
    benchmark = load_benchmark(config.benchmark)
    corpus = stream_corpus(config.corpus, config.corpus_mode, config.corpus_glob)
    db = scan_corpus(benchmark, corpus, config, progress=progress)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    db_path = out_dir / "matches.jsonl"
    persist(db, db_path)
    config.to_file(out_dir / "scan-config.cfg")
    if corpus.skipped_count or corpus.replaced_count:
        logger.warning("scan finished with %d skipped files and %d replaced "
                       "byte sequences", corpus.skipped_count,
                       corpus.replaced_count)
    return db_path
