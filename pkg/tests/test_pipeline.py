"""Scan orchestration: corpus modes, variants, shard-style determinism."""

import json
import random

from conftest import plant, random_text, write_benchmark_file
from leakscan.config import RunConfig
from leakscan.ingest import load_benchmark, stream_corpus
from leakscan.matchstore import load
from leakscan.pipeline import run_scan, scan_corpus

GOLD = "def locate(items, key):\n    for i, x in enumerate(items):\n        if x == key:\n            return i\n    return -1\n"


def test_record_stream_corpus_scan(tmp_path):
    rng = random.Random(3)
    stream_path = tmp_path / "corpus.jsonl"
    noise = random_text(rng, 40_000)
    with stream_path.open("w") as handle:
        handle.write(json.dumps({"doc_id": "rec/1", "content": noise}) + "\n")
        handle.write(json.dumps(
            {"doc_id": "rec/2",
             "content": plant(random_text(rng, 40_000), GOLD, 12_345)}) + "\n")
    bench = write_benchmark_file(tmp_path / "b.jsonl", [("t/0", GOLD)])
    config = RunConfig(benchmark=str(bench), corpus=str(stream_path),
                       corpus_mode="stream", capacity=20,
                       out_dir=str(tmp_path / "out"))
    db = load(run_scan(config, progress=False))
    best = db.problems["t/0"].candidates[0]
    assert best.doc_id == "rec/2"
    assert best.offset == 12_345
    assert best.aggregated == 100.0


def test_stride_controls_window_alignment(tmp_path):
    rng = random.Random(9)
    corpus = tmp_path / "c"
    corpus.mkdir()
    # plant at an odd offset: a stride-2 scan cannot land exactly on it
    (corpus / "f.py").write_text(plant(random_text(rng, 20_000), GOLD, 5_001))
    bench = write_benchmark_file(tmp_path / "b.jsonl", [("t/0", GOLD)])
    aligned = RunConfig(benchmark=str(bench), corpus=str(corpus), capacity=5,
                        stride=1, out_dir=str(tmp_path / "s1"))
    skewed = RunConfig(benchmark=str(bench), corpus=str(corpus), capacity=5,
                       stride=2, out_dir=str(tmp_path / "s2"))
    db1 = load(run_scan(aligned, progress=False))
    db2 = load(run_scan(skewed, progress=False))
    assert db1.problems["t/0"].top1 == 100.0
    assert db2.problems["t/0"].top1 < 100.0
    assert all(c.offset % 2 == 0 for c in db2.problems["t/0"].candidates)


def test_levenshtein_variant_scan(tmp_path):
    rng = random.Random(11)
    corpus = tmp_path / "c"
    corpus.mkdir()
    (corpus / "f.py").write_text(plant(random_text(rng, 15_000), GOLD, 4_000))
    bench = write_benchmark_file(tmp_path / "b.jsonl", [("t/0", GOLD)])
    config = RunConfig(benchmark=str(bench), corpus=str(corpus), capacity=5,
                       distance="levenshtein", out_dir=str(tmp_path / "out"))
    db = load(run_scan(config, progress=False))
    assert db.meta.distance == "levenshtein"
    assert db.problems["t/0"].top1 == 100.0


def test_scan_writes_effective_config(tmp_path):
    rng = random.Random(13)
    corpus = tmp_path / "c"
    corpus.mkdir()
    (corpus / "f.py").write_text(random_text(rng, 2_000))
    bench = write_benchmark_file(tmp_path / "b.jsonl", [("t/0", GOLD)])
    out = tmp_path / "out"
    config = RunConfig(benchmark=str(bench), corpus=str(corpus), capacity=7,
                       out_dir=str(out))
    run_scan(config, progress=False)
    saved = RunConfig.from_file(out / "scan-config.cfg")
    assert saved.capacity == 7
    assert saved.benchmark == str(bench)


def test_scan_corpus_accepts_any_document_iterable(tmp_path):
    rng = random.Random(17)
    corpus_dir = tmp_path / "c"
    corpus_dir.mkdir()
    (corpus_dir / "a.py").write_text(plant(random_text(rng, 9_000), GOLD, 800))
    bench = write_benchmark_file(tmp_path / "b.jsonl", [("t/0", GOLD)])
    benchmark = load_benchmark(bench)
    docs = list(stream_corpus(corpus_dir))
    config = RunConfig(capacity=5)
    db = scan_corpus(benchmark, docs, config, progress=False)
    assert db.problems["t/0"].top1 == 100.0


def test_prune_flag_does_not_change_database(tmp_path):
    rng = random.Random(23)
    corpus = tmp_path / "c"
    corpus.mkdir()
    (corpus / "f.py").write_text(plant(random_text(rng, 12_000), GOLD, 3_000))
    bench = write_benchmark_file(tmp_path / "b.jsonl", [("t/0", GOLD)])
    outputs = []
    for name, prune in (("p1", True), ("p0", False)):
        config = RunConfig(benchmark=str(bench), corpus=str(corpus),
                           capacity=10, prune=prune,
                           out_dir=str(tmp_path / name))
        path = run_scan(config, progress=False)
        text = path.read_text()
        # the corpus field is identical; normalize nothing else
        outputs.append(text)
    assert outputs[0] == outputs[1]
