"""Semantic program similarity via winnowed token k-gram fingerprints.

Programs are canonicalized to token streams (see :mod:`leakscan.lexer`),
hashed over sliding k-grams with a polynomial rolling hash, and thinned
with the standard winnowing scheme: within every window of ``w`` consecutive
gram hashes, keep the minimum (rightmost on ties).  Similarity between two
fingerprint sets is the Dice coefficient over the selected hashes, scaled
to [0, 100].

By construction the score is invariant under consistent identifier renames,
literal value changes, and trailing comments, and reaches 100 exactly when
the two canonical streams fingerprint identically.

Streams shorter than ``k`` tokens fall back to a gram length equal to the
stream length.  Gram hashes are domain-separated by the effective gram
length, so a fallback fingerprint never collides with a full-length one;
short fragments compared against real programs score 0, not an error.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParamMismatch
from .lexer import canonicalize

__all__ = [
    "FingerprintSet",
    "fingerprint",
    "fingerprint_text",
    "semantic_similarity",
    "DEFAULT_K",
    "DEFAULT_W",
]

# Token-gram length and winnow window.  Small grams keep the score smooth
# for the short, function-sized programs this tool compares; the gram
# length still spans more tokens than one statement, so a commented-out
# near-copy shares nothing with its original.
DEFAULT_K = 8
DEFAULT_W = 2

_MASK64 = (1 << 64) - 1
# FNV-1a primes for token codes; splitmix64 finalizer for output mixing.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_ROLL_BASE = 6364136223846793005  # MMIX LCG multiplier; odd, full 64-bit period
_MIX_1 = 0xBF58476D1CE4E5B9
_MIX_2 = 0x94D049BB133111EB
_LEN_SALT = 0x9E3779B97F4A7C15


def _token_code(token: str) -> int:
    code = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        code = ((code ^ byte) * _FNV_PRIME) & _MASK64
    return code


def _mix64(value: int) -> int:
    value = (value ^ (value >> 30)) * _MIX_1 & _MASK64
    value = (value ^ (value >> 27)) * _MIX_2 & _MASK64
    return value ^ (value >> 31)


@dataclass(frozen=True)
class FingerprintSet:
    """Winnowed k-gram hashes of one canonical token stream.

    ``k`` and ``w`` record the configured parameters, not the effective
    gram length after a short-stream fallback; sets are only comparable
    when both were built with the same configuration.
    """

    hashes: frozenset[int]
    k: int
    w: int


def _gram_hashes(codes: list[int], gram_len: int) -> list[int]:
    """Rolling polynomial hash of every ``gram_len``-gram, mixed for output."""
    salt = (gram_len * _LEN_SALT) & _MASK64
    top = pow(_ROLL_BASE, gram_len - 1, 1 << 64)
    acc = 0
    for code in codes[:gram_len]:
        acc = (acc * _ROLL_BASE + code) & _MASK64
    hashes = [_mix64(acc ^ salt)]
    for i in range(gram_len, len(codes)):
        acc = ((acc - codes[i - gram_len] * top) * _ROLL_BASE + codes[i]) & _MASK64
        hashes.append(_mix64(acc ^ salt))
    return hashes


def _winnow(hashes: list[int], w: int) -> frozenset[int]:
    """Rightmost-minimum selection over every window of ``w`` gram hashes."""
    count = len(hashes)
    if count == 0:
        return frozenset()
    selected: set[int] = set()
    prev_idx = -1
    for start in range(max(1, count - w + 1)):
        window = hashes[start:start + w]
        min_idx = start
        min_val = window[0]
        for j in range(1, len(window)):
            if window[j] <= min_val:
                min_val = window[j]
                min_idx = start + j
        if min_idx != prev_idx:
            selected.add(min_val)
            prev_idx = min_idx
    return frozenset(selected)


def fingerprint(stream: list[str], k: int = DEFAULT_K, w: int = DEFAULT_W) -> FingerprintSet:
    """Fingerprint a canonical token stream.

    An empty stream yields an empty set; any nonempty stream yields at
    least one hash (gram length shrinks to the stream length if needed).
    """
    if k < 1 or w < 1:
        raise ValueError("k and w must be >= 1")
    codes = [_token_code(token) for token in stream]
    if not codes:
        return FingerprintSet(frozenset(), k, w)
    gram_len = min(k, len(codes))
    return FingerprintSet(_winnow(_gram_hashes(codes, gram_len), w), k, w)


def fingerprint_text(source: str, k: int = DEFAULT_K, w: int = DEFAULT_W) -> FingerprintSet:
    """Canonicalize and fingerprint raw source text."""
    return fingerprint(canonicalize(source), k, w)


def semantic_similarity(a: FingerprintSet, b: FingerprintSet) -> float:
    """Dice similarity of two fingerprint sets, in [0, 100].

    100.00 exactly when the hash sets are equal (and nonempty); two empty
    sets score 0.
    """
    if (a.k, a.w) != (b.k, b.w):
        raise ParamMismatch(
            f"fingerprint parameters differ: (k={a.k}, w={a.w}) vs (k={b.k}, w={b.w})"
        )
    if not a.hashes and not b.hashes:
        return 0.0
    if a.hashes == b.hashes:
        return 100.0
    shared = len(a.hashes & b.hashes)
    raw = 100.0 * (2.0 * shared) / (len(a.hashes) + len(b.hashes))
    return min(round(raw, 2), 99.99)
