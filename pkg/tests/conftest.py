"""Shared fixtures: paper program pairs and synthetic corpus builders."""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from leakscan.lexer import canonicalize
from leakscan.semantic import fingerprint

DATA = Path(__file__).parent / "data"
PAIRS = DATA / "pairs"

# A code-flavored alphabet for synthetic corpora: heavy on the characters
# real Python uses, so histogram pruning is exercised, not handed a gift.
CODE_ALPHABET = (
    "abcdefghijklmnopqrstuvwxyz"
    "ABCDEFGHIJ0123456789"
    "_()[]{}:.,=+-*/%<>#'\" \n    "
)


def read_pair(gold_name: str, match_name: str) -> tuple[str, str]:
    return ((PAIRS / gold_name).read_text(encoding="utf-8"),
            (PAIRS / match_name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def commented_copy_pair():
    """Gold program vs an almost fully commented-out near copy."""
    return read_pair("min_squares_gold.py", "min_squares_match.py")


@pytest.fixture(scope="session")
def renamed_pair():
    """Gold program vs a semantically identical, renamed variant."""
    return read_pair("distinct_gold.py", "distinct_match.py")


@pytest.fixture(scope="session")
def counting_pair():
    """Gold counting loop vs a structurally similar dictionary loop."""
    return read_pair("pos_count_gold.py", "get_degree_match.py")


def random_text(rng: random.Random, size: int) -> str:
    return "".join(rng.choices(CODE_ALPHABET, k=size))


def plant(text: str, payload: str, position: int) -> str:
    return text[:position] + payload + text[position + len(payload):]


def mutate_structurally(gold: str, rng: random.Random,
                        min_rate: float = 0.06, max_rate: float = 0.14) -> str:
    """A same-length copy of gold with a bounded fraction of substitutions.

    Substituting s of m characters bounds the indel similarity to at least
    100 * (1 - s/m) and below 100, so a planted mutant's own window score
    is guaranteed inside (that bound, 100).  The canonical token stream and
    its fingerprints are required to differ, so token-level matching cannot
    report a perfect score either.
    """
    punct = "()[]{}:#,;"
    gold_prints = fingerprint(canonicalize(gold))
    for _ in range(200):
        chars = list(gold)
        subs = max(3, int(len(gold) * rng.uniform(min_rate, max_rate)))
        for pos in rng.sample(range(len(chars)), subs):
            replacement = rng.choice(punct)
            while replacement == chars[pos]:
                replacement = rng.choice(punct)
            chars[pos] = replacement
        mutant = "".join(chars)
        if mutant == gold:
            continue
        if canonicalize(mutant) == canonicalize(gold):
            continue
        if fingerprint(canonicalize(mutant)) == gold_prints:
            continue
        return mutant
    raise AssertionError("could not build a structural mutant")


def write_benchmark_file(path: Path, problems: list[tuple[str, str]]) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for task_id, gold in problems:
            handle.write(json.dumps({
                "task_id": task_id,
                "prompt": f"prompt for {task_id}",
                "gold_solution": gold,
            }) + "\n")
    return path


def write_predictions_file(path: Path, outcomes: dict[str, bool]) -> Path:
    with path.open("w", encoding="utf-8") as handle:
        for task_id, correct in outcomes.items():
            handle.write(json.dumps({"task_id": task_id, "correct": correct}) + "\n")
    return path


def make_gold(rng: random.Random, size: int) -> str:
    """A gold-solution-shaped random program."""
    names = ["count", "total", "value", "items", "data", "result", "acc"]
    fn = f"fn_{rng.randrange(10**6)}"
    lines = [f"def {fn}({rng.choice(names)}):"]
    depth = 1
    body = rng.randrange(2, 6)
    for _ in range(body):
        pad = "    " * depth
        kind = rng.random()
        if kind < 0.3 and depth < 3:
            lines.append(f"{pad}if {rng.choice(names)} > {rng.randrange(100)}:")
            depth += 1
        elif kind < 0.5:
            lines.append(f"{pad}{rng.choice(names)} = {rng.choice(names)} + {rng.randrange(50)}")
        else:
            lines.append(f"{pad}{rng.choice(names)} += {rng.randrange(9)}")
    lines.append("    " * depth + f"return {rng.choice(names)}")
    text = "\n".join(lines) + "\n"
    while len(text) < size:
        text += f"# pad {rng.randrange(10**9)}\n"
    return text
