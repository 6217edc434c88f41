"""Character-level fuzzy substring search.

Scores every fixed-length window of a document against a gold program with
a length-normalized edit-distance similarity in [0, 100]:

    score = 100 * (1 - D(gold, window) / (len(gold) + len(window)))

The default distance is the indel distance (insertions and deletions cost 1,
substitutions cost 2), which equals ``len(a) + len(b) - 2 * LCS(a, b)``.  A
classic unit-substitution Levenshtein variant is available for sensitivity
checks via ``variant="levenshtein"``; it uses the same normalization.

Scores are quantized to two decimals (round half to even) when constructed,
and a score of exactly 100.00 is produced only for identical strings: a
near-miss that would round up is capped at 99.99 so that "perfect match"
stays an exact-equality signal.

Scanning uses two lossless pruning layers before any exact distance is
computed: a character-histogram lower bound on the distance (see
``prune_bound``), maintained incrementally while sliding so every window
position costs O(1), and exact verification of the survivors with a
bit-parallel LCS.  Both hot loops are compiled with numba; pruned scans
return byte-identical results to brute force.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterator

import numba
import numpy as np

__all__ = [
    "WindowSpec",
    "GoldQuery",
    "surface_similarity",
    "prune_bound",
    "scan_document",
    "indel_distance",
    "levenshtein_distance",
]

# Window positions are processed in slabs of this many characters so that a
# multi-hundred-MiB document never materializes whole-document numpy state.
_CHUNK_CHARS = 1 << 21

# Survivors of the histogram bound are exact-scored in batches this large,
# re-filtering the remainder against the (possibly risen) floor in between.
_REFINE_BATCH = 32768

# A window is skipped when its raw bound is below ``floor - _BOUND_SLACK``.
# Quantization moves a score by at most 0.005, so anything skipped has a
# quantized score strictly below the floor: pruning never changes results.
_BOUND_SLACK = 0.006


@dataclass(frozen=True)
class WindowSpec:
    """Sliding-window geometry: window length and stride, in characters."""

    length: int
    stride: int = 1

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ValueError("window length must be >= 1")
        if self.stride < 1:
            raise ValueError("window stride must be >= 1")


def _quantize(raw: float, exact: bool) -> float:
    """Round to 2 decimals; only an exact match may report 100.00."""
    if exact:
        return 100.0
    return min(round(raw, 2), 99.99)


def _codepoints(text: str) -> np.ndarray:
    return np.frombuffer(text.encode("utf-32-le"), dtype="<u4")


# ---------------------------------------------------------------------------
# Compiled scan kernels
# ---------------------------------------------------------------------------


@numba.njit(cache=True, inline="always")
def _popcount(x: np.uint64) -> np.uint64:
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = ((x & np.uint64(0x3333333333333333))
         + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333)))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(cache=True)
def _sliding_l1(small: np.ndarray, gold_counts: np.ndarray, w_len: int,
                out: np.ndarray) -> None:
    """Histogram L1 difference against the gold for every full window.

    ``small`` holds alphabet indexes (last index = not in gold) and
    ``gold_counts`` the gold histogram with a zero slot for that index.
    The running difference is updated in O(1) per slid position.
    """
    n_alpha = gold_counts.shape[0]
    counts = np.zeros(n_alpha, dtype=np.int64)
    l1 = np.int64(0)
    for j in range(n_alpha):
        l1 += gold_counts[j]
    for pos in range(w_len):
        code = small[pos]
        if counts[code] < gold_counts[code]:
            l1 -= 1
        else:
            l1 += 1
        counts[code] += 1
    out[0] = l1
    n_windows = out.shape[0]
    for window in range(1, n_windows):
        code = small[window - 1]
        counts[code] -= 1
        if counts[code] < gold_counts[code]:
            l1 += 1
        else:
            l1 -= 1
        code = small[window + w_len - 1]
        if counts[code] < gold_counts[code]:
            l1 -= 1
        else:
            l1 += 1
        counts[code] += 1
        out[window] = l1


@numba.njit(cache=True)
def _lcs_single_word(small: np.ndarray, offsets: np.ndarray, w_len: int,
                     pm: np.ndarray, length: int, top_mask: np.uint64,
                     out: np.ndarray) -> None:
    """Bit-parallel LCS for patterns up to 64 characters, one window each."""
    for i in range(offsets.shape[0]):
        start = offsets[i]
        row = top_mask
        for step in range(w_len):
            mask = pm[small[start + step], 0]
            if mask:
                u = row & mask
                row = ((row + u) | (row - u)) & top_mask
        out[i] = length - np.int64(_popcount(row))


@numba.njit(cache=True)
def _lcs_multi_word(small: np.ndarray, offsets: np.ndarray, w_len: int,
                    pm: np.ndarray, length: int, top_mask: np.uint64,
                    out: np.ndarray) -> None:
    """Bit-parallel LCS with the row register sliced into 64-bit words.

    ``u`` only has bits already set in the register, so per-word
    subtraction never borrows; addition carries are chained explicitly.
    """
    words = pm.shape[1]
    reg = np.empty(words, dtype=np.uint64)
    for i in range(offsets.shape[0]):
        start = offsets[i]
        for w in range(words - 1):
            reg[w] = np.uint64(0xFFFFFFFFFFFFFFFF)
        reg[words - 1] = top_mask
        for step in range(w_len):
            code = small[start + step]
            carry = np.uint64(0)
            for w in range(words):
                value = reg[w]
                u = value & pm[code, w]
                total = value + u
                overflow = np.uint64(1) if total < value else np.uint64(0)
                total = total + carry
                if total < carry:
                    overflow = np.uint64(1)
                reg[w] = total | (value - u)
                carry = overflow
            reg[words - 1] &= top_mask
        matched = np.int64(0)
        for w in range(words):
            matched += np.int64(_popcount(reg[w]))
        out[i] = length - matched


def _lcs_bitparallel(masks: dict[str, int], m: int, text: str) -> int:
    """Length of the LCS between a pattern of length m and ``text``.

    ``masks`` maps each pattern character to a bitmask with bit i set when
    pattern[i] equals that character.  Runs the classic bit-vector LCS row
    update in O(len(text)) big-int operations; characters absent from the
    pattern leave the row unchanged and are skipped.
    """
    if m == 0 or not text:
        return 0
    full = (1 << m) - 1
    row = full
    get = masks.get
    for ch in text:
        pm = get(ch)
        if pm:
            u = row & pm
            row = ((row + u) | (row - u)) & full
    return m - row.bit_count()


def _build_masks(pattern: str) -> dict[str, int]:
    masks: dict[str, int] = {}
    for i, ch in enumerate(pattern):
        masks[ch] = masks.get(ch, 0) | (1 << i)
    return masks


def warm_kernels() -> None:
    """Force kernel compilation now (e.g. before forking scan workers)."""
    for gold in ("ab", "ab" * 40):
        query = GoldQuery(gold)
        codes = query.encode_codes(_codepoints("abba" * len(gold)))
        query.batch_lcs(codes, np.array([0, 1], dtype=np.int64), len(gold))
        _window_bounds(query, codes, len(gold))


def indel_distance(a: str, b: str) -> int:
    """Edit distance with unit insertions/deletions (substitution = 2)."""
    if a == b:
        return 0
    # Pattern masks over the shorter string keep the bit rows narrow.
    if len(a) > len(b):
        a, b = b, a
    lcs = _lcs_bitparallel(_build_masks(a), len(a), b)
    return len(a) + len(b) - 2 * lcs


def levenshtein_distance(a: str, b: str) -> int:
    """Classic unit-cost Levenshtein distance, vectorized one row at a time."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) > len(a):
        a, b = b, a
    bb = _codepoints(b)
    width = bb.size + 1
    offsets = np.arange(width, dtype=np.int64)
    prev = offsets.copy()
    seed = np.empty(width, dtype=np.int64)
    for i, ch in enumerate(a, 1):
        # Without the left-neighbor (insertion) term each cell is
        # min(prev[j] + 1, prev[j-1] + cost); insertions then propagate as
        # a running minimum of (cell - column index).
        cost = (bb != ord(ch)).astype(np.int64)
        seed[0] = i
        np.minimum(prev[1:] + 1, prev[:-1] + cost, out=seed[1:])
        prev = np.minimum.accumulate(seed - offsets) + offsets
        seed = seed.copy()
    return int(prev[-1])


def surface_similarity(source: str, target: str, variant: str = "indel") -> float:
    """Similarity in [0, 100] between two strings; 100.00 iff identical."""
    total = len(source) + len(target)
    if total == 0:
        return 100.0
    if source == target:
        return 100.0
    if variant == "indel":
        dist = indel_distance(source, target)
    elif variant == "levenshtein":
        dist = levenshtein_distance(source, target)
    else:
        raise ValueError(f"unknown distance variant {variant!r}")
    return _quantize(100.0 * (1.0 - dist / total), exact=False)


def _histogram_l1(a: Counter, b: Counter) -> int:
    diff = 0
    for ch, count in a.items():
        diff += abs(count - b.get(ch, 0))
    for ch, count in b.items():
        if ch not in a:
            diff += count
    return diff


def prune_bound(gold: str, window: str) -> float:
    """Upper bound on ``surface_similarity(gold, window)``.

    Every insertion or deletion moves exactly one character count by one,
    so the indel distance is at least the L1 difference between the two
    character histograms.  The bound never undercuts the true score.
    """
    total = len(gold) + len(window)
    if total == 0:
        return 100.0
    l1 = _histogram_l1(Counter(gold), Counter(window))
    if l1 == 0:
        return 100.0
    return round(100.0 * (1.0 - l1 / total), 2)


class GoldQuery:
    """Precomputed scan state for one gold solution.

    Holds the character alphabet and histogram used by the vectorized
    bound pass, plus the LCS bitmasks (both big-int and word-sliced forms)
    used to exact-score survivors.  Instances are immutable in practice and
    safe to share across workers.
    """

    __slots__ = ("text", "length", "variant", "alphabet", "alpha_counts",
                 "masks", "pm_words", "word_count", "top_mask", "counts_ref")

    def __init__(self, text: str, variant: str = "indel"):
        if variant not in ("indel", "levenshtein"):
            raise ValueError(f"unknown distance variant {variant!r}")
        self.text = text
        self.length = len(text)
        self.variant = variant
        hist = Counter(text)
        pairs = sorted((ord(ch), n) for ch, n in hist.items())
        self.alphabet = np.array([p[0] for p in pairs], dtype=np.uint32)
        self.alpha_counts = np.array([p[1] for p in pairs], dtype=np.int64)
        # Gold histogram with a zero slot appended for out-of-gold chars.
        self.counts_ref = np.zeros(len(pairs) + 1, dtype=np.int64)
        self.counts_ref[:len(pairs)] = self.alpha_counts
        self.masks = _build_masks(text)
        # Word-sliced pattern masks for the compiled LCS: row per alphabet
        # character plus an all-zero row for characters outside the gold.
        self.word_count = max(1, (self.length + 63) // 64)
        table = np.zeros((len(pairs) + 1, self.word_count), dtype=np.uint64)
        for row, (code, _) in enumerate(pairs):
            mask = self.masks[chr(code)]
            for word in range(self.word_count):
                table[row, word] = (mask >> (64 * word)) & 0xFFFFFFFFFFFFFFFF
        self.pm_words = table
        top_bits = self.length - 64 * (self.word_count - 1)
        self.top_mask = np.uint64((1 << top_bits) - 1 if 0 < top_bits < 64
                                  else 0xFFFFFFFFFFFFFFFF)

    def encode_codes(self, arr: np.ndarray) -> np.ndarray:
        """Map code points to rows of ``pm_words`` (last row = not in gold)."""
        oov = len(self.alphabet)
        if oov == 0:
            return np.full(arr.size, 0, dtype=np.int32)
        idx = np.searchsorted(self.alphabet, arr).astype(np.int32)
        idx[idx == oov] = oov - 1
        hit = self.alphabet[idx] == arr
        return np.where(hit, idx, np.int32(oov)).astype(np.int32)

    def batch_lcs(self, codes: np.ndarray, offsets: np.ndarray,
                  w_len: int) -> np.ndarray:
        """LCS lengths of the gold against many equal-length windows.

        ``codes`` is the chunk mapped by :meth:`encode_codes`; each window
        starts at an entry of ``offsets`` and spans ``w_len`` characters.
        """
        out = np.empty(offsets.size, dtype=np.int64)
        if offsets.size == 0:
            return out
        if self.length == 0:
            out[:] = 0
            return out
        kernel = _lcs_single_word if self.word_count == 1 else _lcs_multi_word
        kernel(codes, offsets, w_len, self.pm_words, self.length,
               self.top_mask, out)
        return out

    def window_score(self, window: str) -> float:
        """Exact quantized similarity of one window against the gold text."""
        total = self.length + len(window)
        if total == 0:
            return 100.0
        if window == self.text:
            return 100.0
        if self.variant == "indel":
            lcs = _lcs_bitparallel(self.masks, self.length, window)
            dist = total - 2 * lcs
        else:
            dist = levenshtein_distance(self.text, window)
        return _quantize(100.0 * (1.0 - dist / total), exact=False)

    def bound_divisor(self) -> int:
        # A substitution can move two histogram counts, so the Levenshtein
        # variant only guarantees distance >= L1 / 2.
        return 1 if self.variant == "indel" else 2


def _window_bounds(query: GoldQuery, small: np.ndarray, w_len: int) -> np.ndarray:
    """Raw similarity upper bounds for every full window start.

    The histogram L1 difference between the gold and a window lower-bounds
    the edit distance; it changes by at most two when the window slides by
    one, so a single incremental pass bounds every position.  ``small`` is
    the chunk mapped by :meth:`GoldQuery.encode_codes`.
    """
    n_windows = small.size - w_len + 1
    l1 = np.empty(n_windows, dtype=np.int64)
    _sliding_l1(small, query.counts_ref, w_len, l1)
    total = query.length + w_len
    divisor = query.bound_divisor()
    return 100.0 * (1.0 - l1 / (divisor * total))


def _iter_chunks(text: str, w_len: int) -> Iterator[tuple[int, int, str]]:
    """Yield (first_offset, end_offset, slab) covering all full windows."""
    full_end = len(text) - w_len + 1
    start = 0
    while start < full_end:
        stop = min(start + _CHUNK_CHARS, full_end)
        yield start, stop, text[start:stop + w_len - 1]
        start = stop


def scan_full_windows(
    query: GoldQuery,
    text: str,
    spec: WindowSpec,
    floor_fn: Callable[[], float],
    emit: Callable[[int, float], None],
    prune: bool = True,
    base_offset: int = 0,
) -> None:
    """Score every stride-aligned full-length window of ``text``.

    ``floor_fn`` is sampled repeatedly and must be monotone non-decreasing;
    windows whose histogram bound falls below the sampled floor are skipped.
    ``emit`` receives (offset, score) for windows scoring at or above the
    floor, in offset order.  ``base_offset`` shifts reported offsets and
    stride alignment, letting callers scan a large document in slices.
    """
    w_len = spec.length
    stride = spec.stride
    total = query.length + w_len
    use_batch = query.variant == "indel" and total > 0
    for chunk_start, chunk_stop, slab in _iter_chunks(text, w_len):
        first = -(base_offset + chunk_start) % stride
        locals_ = np.arange(first, chunk_stop - chunk_start, stride, dtype=np.int64)
        if locals_.size == 0:
            continue
        floor = floor_fn()
        codes = query.encode_codes(_codepoints(slab))
        if prune:
            bounds = _window_bounds(query, codes, w_len)[locals_]
            keep = bounds > floor - _BOUND_SLACK
            survivors = locals_[keep]
            surv_bounds = bounds[keep]
        else:
            survivors = locals_
            surv_bounds = None
        pos = 0
        while pos < survivors.size:
            new_floor = floor_fn()
            if prune and pos and new_floor > floor:
                keep = surv_bounds[pos:] > new_floor - _BOUND_SLACK
                survivors = survivors[pos:][keep]
                surv_bounds = surv_bounds[pos:][keep]
                pos = 0
                if survivors.size == 0:
                    break
            floor = new_floor
            batch = survivors[pos:pos + _REFINE_BATCH]
            if use_batch:
                lcs = query.batch_lcs(codes, batch, w_len)
                dist = total - 2 * lcs
                raw = 100.0 * (1.0 - dist / total)
                for row in np.nonzero(raw > floor - _BOUND_SLACK)[0]:
                    local = int(batch[row])
                    score = _quantize(float(raw[row]), exact=dist[row] == 0)
                    if score >= floor:
                        emit(base_offset + chunk_start + local, score)
            else:
                for local in batch:
                    local = int(local)
                    score = query.window_score(slab[local:local + w_len])
                    if score >= floor:
                        emit(base_offset + chunk_start + local, score)
            pos += len(batch)


def scan_tail_windows(
    query: GoldQuery,
    text: str,
    spec: WindowSpec,
    floor_fn: Callable[[], float],
    emit: Callable[[int, float], None],
    base_offset: int = 0,
) -> None:
    """Score the stride-aligned windows shorter than ``spec.length``.

    These start within the final ``length - 1`` characters of the document
    (or anywhere, for documents shorter than the window): the window is
    whatever text remains.  There are at most ``length - 1`` of them, so
    they are scored directly.
    """
    n = len(text)
    first_tail = max(0, n - spec.length + 1)
    start = first_tail + (-(base_offset + first_tail) % spec.stride)
    for offset in range(start, n, spec.stride):
        score = query.window_score(text[offset:])
        if score >= floor_fn():
            emit(base_offset + offset, score)


def scan_document(
    gold: str,
    content: str,
    spec: WindowSpec | None = None,
    floor: float = 0.0,
    prune: bool = True,
    variant: str = "indel",
) -> list[tuple[int, float]]:
    """All (offset, score) pairs with score >= floor, in offset order.

    Equivalent to evaluating ``surface_similarity`` at every stride-aligned
    offset: pruning only skips windows that provably score below the floor.
    Tail windows shorter than the window length are scored against the
    remaining text.
    """
    if spec is None:
        spec = WindowSpec(length=max(1, len(gold)))
    query = GoldQuery(gold, variant)
    results: list[tuple[int, float]] = []

    def emit(offset: int, score: float) -> None:
        results.append((offset, score))

    floor_fn = lambda: floor
    scan_full_windows(query, content, spec, floor_fn, emit, prune=prune)
    scan_tail_windows(query, content, spec, floor_fn, emit)
    return results
