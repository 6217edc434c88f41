"""Per-problem top-K match candidates and the persisted match database.

During a scan each problem keeps its K best-scoring corpus windows, ordered
by a total key (score desc, doc_id asc, offset asc) so the retained set is
exactly what sorting every window ever offered and truncating to K would
give — independent of offer order, worker count, or shard boundaries.
Before the semantic pass the ranking score is the surface score; rescoring
fills in semantic and aggregated = max(surface, semantic) and reorders.

The database serializes as newline-delimited JSON: a header record carrying
format version and scan parameters, then one record per candidate with
scores rendered at two decimals.  ``load(persist(db))`` reproduces the
database field for field.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass, replace
from pathlib import Path

from .errors import IoError, SchemaError, TaskMismatch, VersionMismatch
from .semantic import DEFAULT_K, DEFAULT_W, fingerprint_text, semantic_similarity

__all__ = [
    "MatchCandidate",
    "ProblemMatchSet",
    "ScanMeta",
    "MatchDatabase",
    "dedup_overlaps",
    "rescore_semantic",
    "merge",
    "persist",
    "load",
    "FORMAT_VERSION",
    "DEFAULT_CAPACITY",
]

FORMAT_VERSION = 1
DEFAULT_CAPACITY = 500


@dataclass(frozen=True)
class MatchCandidate:
    """One corpus window scored against one gold solution."""

    task_id: str
    doc_id: str
    offset: int
    snippet: str
    surface: float
    semantic: float | None = None
    aggregated: float | None = None

    @property
    def score(self) -> float:
        """Ranking score: aggregated once rescored, surface before."""
        return self.aggregated if self.aggregated is not None else self.surface

    @property
    def sort_key(self) -> tuple:
        return (-self.score, self.doc_id, self.offset)

    @property
    def span(self) -> tuple[int, int]:
        return (self.offset, self.offset + len(self.snippet))


class ProblemMatchSet:
    """Mutable top-K candidate set for one benchmark problem."""

    __slots__ = ("task_id", "capacity", "_keys", "_candidates")

    def __init__(self, task_id: str, capacity: int = DEFAULT_CAPACITY,
                 candidates: list[MatchCandidate] | None = None):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.task_id = task_id
        self.capacity = capacity
        self._candidates: list[MatchCandidate] = []
        self._keys: list[tuple] = []
        for cand in candidates or ():
            self.offer(cand)

    def __len__(self) -> int:
        return len(self._candidates)

    def __eq__(self, other) -> bool:
        return (isinstance(other, ProblemMatchSet)
                and self.task_id == other.task_id
                and self.capacity == other.capacity
                and self._candidates == other._candidates)

    def __repr__(self) -> str:
        return (f"ProblemMatchSet({self.task_id!r}, capacity={self.capacity}, "
                f"n={len(self._candidates)})")

    @property
    def candidates(self) -> tuple[MatchCandidate, ...]:
        return tuple(self._candidates)

    @property
    def floor(self) -> float:
        """Score of the K-th best candidate, or 0 while not yet full."""
        if len(self._candidates) < self.capacity:
            return 0.0
        return self._candidates[-1].score

    @property
    def top1(self) -> float:
        return self._candidates[0].score if self._candidates else 0.0

    @property
    def top10(self) -> float:
        """Mean of the ten highest scores (all of them, if fewer)."""
        if not self._candidates:
            return 0.0
        top = self._candidates[:10]
        return sum(c.score for c in top) / len(top)

    def offer(self, cand: MatchCandidate) -> bool:
        """Insert if it beats the worst retained candidate or there is room."""
        if cand.task_id != self.task_id:
            raise TaskMismatch(
                f"candidate for {cand.task_id!r} offered to set {self.task_id!r}")
        key = cand.sort_key
        if len(self._candidates) >= self.capacity and key >= self._keys[-1]:
            return False
        pos = bisect.bisect_left(self._keys, key)
        self._keys.insert(pos, key)
        self._candidates.insert(pos, cand)
        if len(self._candidates) > self.capacity:
            self._keys.pop()
            self._candidates.pop()
        return True

    def replaced(self, candidates: list[MatchCandidate]) -> "ProblemMatchSet":
        """New set with the same identity but a different candidate list."""
        return ProblemMatchSet(self.task_id, self.capacity, candidates)


def _overlap_exceeds_half(a: MatchCandidate, b: MatchCandidate) -> bool:
    start_a, end_a = a.span
    start_b, end_b = b.span
    inter = min(end_a, end_b) - max(start_a, start_b)
    if inter <= 0:
        return False
    shorter = min(end_a - start_a, end_b - start_b)
    return inter * 2 > shorter


def dedup_overlaps(mset: ProblemMatchSet) -> ProblemMatchSet:
    """Suppress same-document windows overlapping a better one by > 50%.

    Candidates are visited best-first (ties: lower offset); a candidate
    survives unless an already-accepted candidate from the same document
    overlaps it by more than half of the shorter span.
    """
    order = sorted(mset.candidates, key=lambda c: (-c.score, c.offset, c.doc_id))
    kept_by_doc: dict[str, list[MatchCandidate]] = {}
    for cand in order:
        kept = kept_by_doc.setdefault(cand.doc_id, [])
        if any(_overlap_exceeds_half(cand, other) for other in kept):
            continue
        kept.append(cand)
    survivors = [c for kept in kept_by_doc.values() for c in kept]
    return mset.replaced(survivors)


def rescore_semantic(mset: ProblemMatchSet, gold: str,
                     k: int = DEFAULT_K, w: int = DEFAULT_W) -> ProblemMatchSet:
    """Fill in semantic and aggregated scores and reorder by aggregated."""
    gold_prints = fingerprint_text(gold, k, w)
    rescored = []
    for cand in mset.candidates:
        sem = semantic_similarity(gold_prints, fingerprint_text(cand.snippet, k, w))
        rescored.append(replace(cand, semantic=sem,
                                aggregated=max(cand.surface, sem)))
    return mset.replaced(rescored)


def merge(a: ProblemMatchSet, b: ProblemMatchSet) -> ProblemMatchSet:
    """Top-K union of two sets for the same problem.

    Windows that appear in both (overlapping shards scan the seam twice)
    are deduplicated by (doc_id, offset) identity.
    """
    if a.task_id != b.task_id or a.capacity != b.capacity:
        raise TaskMismatch(
            f"cannot merge {a.task_id!r}/K={a.capacity} with "
            f"{b.task_id!r}/K={b.capacity}")
    seen: set[tuple[str, int]] = set()
    combined = []
    for cand in list(a.candidates) + list(b.candidates):
        identity = (cand.doc_id, cand.offset)
        if identity in seen:
            continue
        seen.add(identity)
        combined.append(cand)
    return a.replaced(combined)


@dataclass(frozen=True)
class ScanMeta:
    """Header of a match database: format version plus scan parameters."""

    capacity: int
    k: int
    w: int
    distance: str
    corpus: str
    version: int = FORMAT_VERSION


@dataclass
class MatchDatabase:
    meta: ScanMeta
    problems: dict[str, ProblemMatchSet]

    def __eq__(self, other) -> bool:
        return (isinstance(other, MatchDatabase)
                and self.meta == other.meta
                and self.problems == other.problems)


def _render_score(value: float | None) -> str | None:
    return None if value is None else f"{value:.2f}"


def _parse_score(value: str | None) -> float | None:
    return None if value is None else float(value)


def persist(db: MatchDatabase, path: str | Path) -> None:
    """Write the database as deterministic newline-delimited JSON."""
    path = Path(path)
    meta = db.meta
    header = {
        "version": meta.version,
        "capacity": meta.capacity,
        "k": meta.k,
        "w": meta.w,
        "distance": meta.distance,
        "corpus": meta.corpus,
        "task_ids": sorted(db.problems),
    }
    try:
        with path.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps(header, sort_keys=True) + "\n")
            for task_id in sorted(db.problems):
                for cand in db.problems[task_id].candidates:
                    record = {
                        "task_id": cand.task_id,
                        "doc_id": cand.doc_id,
                        "offset": cand.offset,
                        "snippet": cand.snippet,
                        "surface": _render_score(cand.surface),
                        "semantic": _render_score(cand.semantic),
                        "aggregated": _render_score(cand.aggregated),
                    }
                    handle.write(json.dumps(record, sort_keys=True) + "\n")
    except OSError as exc:
        raise IoError(str(path), str(exc)) from exc


def load(path: str | Path) -> MatchDatabase:
    """Read a database written by :func:`persist`."""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as handle:
            lines = handle.read().splitlines()
    except OSError as exc:
        raise IoError(str(path), str(exc)) from exc
    if not lines:
        raise SchemaError(1, "version", "empty database file")
    header = json.loads(lines[0])
    version = header.get("version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(version, FORMAT_VERSION)
    meta = ScanMeta(capacity=header["capacity"], k=header["k"], w=header["w"],
                    distance=header["distance"], corpus=header["corpus"])
    problems = {task_id: ProblemMatchSet(task_id, meta.capacity)
                for task_id in header.get("task_ids", ())}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        record = json.loads(line)
        try:
            cand = MatchCandidate(
                task_id=record["task_id"],
                doc_id=record["doc_id"],
                offset=record["offset"],
                snippet=record["snippet"],
                surface=_parse_score(record["surface"]),
                semantic=_parse_score(record["semantic"]),
                aggregated=_parse_score(record["aggregated"]),
            )
        except KeyError as exc:
            raise SchemaError(lineno, exc.args[0]) from exc
        mset = problems.get(cand.task_id)
        if mset is None:
            mset = problems[cand.task_id] = ProblemMatchSet(cand.task_id,
                                                            meta.capacity)
        mset.offer(cand)
    return MatchDatabase(meta=meta, problems=problems)
