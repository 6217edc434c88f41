"""Contamination scanner for code benchmarks.

Searches a training corpus for character-level and token-level matches of
benchmark gold solutions, keeps the strongest candidates per problem, and
derives contamination statistics (seen rates, de-contaminated accuracy,
performance gaps) from the resulting match database.
"""

from .config import RunConfig
from .ingest import (
    BenchmarkProblem,
    CorpusDocument,
    PredictionRecord,
    load_benchmark,
    load_predictions,
    stream_corpus,
    write_benchmark,
)
from .matchstore import (
    MatchCandidate,
    MatchDatabase,
    ProblemMatchSet,
    ScanMeta,
    dedup_overlaps,
    load,
    merge,
    persist,
    rescore_semantic,
)
from .pipeline import run_scan, scan_corpus
from .semantic import FingerprintSet, fingerprint, fingerprint_text, semantic_similarity
from .surface import (
    GoldQuery,
    WindowSpec,
    prune_bound,
    scan_document,
    surface_similarity,
)
from .lexer import canonicalize

__version__ = "0.1.0"

__all__ = [
    "BenchmarkProblem",
    "CorpusDocument",
    "FingerprintSet",
    "GoldQuery",
    "MatchCandidate",
    "MatchDatabase",
    "PredictionRecord",
    "ProblemMatchSet",
    "RunConfig",
    "ScanMeta",
    "WindowSpec",
    "canonicalize",
    "dedup_overlaps",
    "fingerprint",
    "fingerprint_text",
    "load",
    "load_benchmark",
    "load_predictions",
    "merge",
    "persist",
    "prune_bound",
    "rescore_semantic",
    "run_scan",
    "scan_corpus",
    "scan_document",
    "semantic_similarity",
    "stream_corpus",
    "surface_similarity",
    "write_benchmark",
]
