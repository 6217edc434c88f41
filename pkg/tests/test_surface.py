"""Surface similarity, pruning bound, and window scanning."""

import random

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from leakscan.surface import (
    GoldQuery,
    WindowSpec,
    indel_distance,
    levenshtein_distance,
    prune_bound,
    scan_document,
    surface_similarity,
)

TEXT = st.text(alphabet="abcxyzετ \n", max_size=40)


class TestDistances:
    @given(TEXT, TEXT)
    @settings(max_examples=300)
    def test_indel_matches_reference_dp(self, a, b):
        assert indel_distance(a, b) == oracles.indel_dp(a, b)

    @given(TEXT, TEXT)
    @settings(max_examples=300)
    def test_levenshtein_matches_reference_dp(self, a, b):
        assert levenshtein_distance(a, b) == oracles.levenshtein_dp(a, b)

    def test_long_strings(self):
        rng = random.Random(1)
        a = "".join(rng.choices("abcdef", k=700))
        b = "".join(rng.choices("abcdef", k=650))
        assert indel_distance(a, b) == oracles.indel_dp(a, b)
        assert levenshtein_distance(a, b) == oracles.levenshtein_dp(a, b)


class TestSurfaceSimilarity:
    def test_identical(self):
        assert surface_similarity("abc", "abc") == 100.0

    def test_against_empty(self):
        assert surface_similarity("abc", "") == 0.0

    def test_both_empty(self):
        assert surface_similarity("", "") == 100.0

    def test_kitten_sitting(self):
        # LCS = 4, so the indel distance is 13 - 8 = 5.
        assert surface_similarity("kitten", "sitting") == 61.54
        assert oracles.similarity_dp("kitten", "sitting") == 61.54

    def test_kitten_sitting_levenshtein_variant(self):
        assert surface_similarity("kitten", "sitting", "levenshtein") == 76.92

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            surface_similarity("a", "b", "hamming")

    @given(TEXT, TEXT)
    @settings(max_examples=300)
    def test_symmetry(self, a, b):
        assert surface_similarity(a, b) == surface_similarity(b, a)

    @given(TEXT, TEXT)
    @settings(max_examples=200)
    def test_levenshtein_symmetry(self, a, b):
        assert (surface_similarity(a, b, "levenshtein")
                == surface_similarity(b, a, "levenshtein"))

    def test_hundred_only_for_identical(self):
        # One edit in a long pair rounds to 100.00 without the cap.
        long = "x" * 30000
        nearly = long[:-1] + "y"
        score = surface_similarity(long, nearly)
        assert score == 99.99
        assert surface_similarity(long, long) == 100.0

    @given(TEXT, TEXT)
    @settings(max_examples=300)
    def test_matches_reference(self, a, b):
        assert surface_similarity(a, b) == oracles.similarity_dp(a, b)


class TestPruneBound:
    def test_identical(self):
        assert prune_bound("abc", "abc") == 100.0

    def test_disjoint(self):
        assert prune_bound("aaa", "bbb") == 0.0

    def test_anagram_is_trivial_bound(self):
        assert prune_bound("abc", "cba") == 100.0
        assert surface_similarity("abc", "cba") < 100.0

    @given(TEXT, TEXT)
    @settings(max_examples=500)
    def test_never_undercuts_true_score(self, a, b):
        assert prune_bound(a, b) >= surface_similarity(a, b)

    def test_randomized_soundness(self):
        rng = random.Random(99)
        for _ in range(2000):
            a = "".join(rng.choices("abcd \n():", k=rng.randrange(0, 60)))
            b = "".join(rng.choices("abcd \n():", k=rng.randrange(0, 60)))
            assert prune_bound(a, b) >= surface_similarity(a, b)


class TestWindowSpec:
    def test_validation(self):
        with pytest.raises(ValueError):
            WindowSpec(length=0)
        with pytest.raises(ValueError):
            WindowSpec(length=3, stride=0)


class TestScanDocument:
    def test_exact_embedding(self):
        assert scan_document("abc", "xxabcxx", floor=100.0) == [(2, 100.0)]

    def test_no_match_above_floor(self):
        assert scan_document("abc", "zzzzzzz", floor=50.0) == []

    def test_tail_windows_are_scored(self):
        # Windows at offsets 1 and 2 are shorter than the gold.
        result = scan_document("abc", "zab", floor=0.0)
        assert result == oracles.brute_scan("abc", "zab")
        assert result[1] == (1, 80.0)

    def test_document_shorter_than_gold(self):
        result = scan_document("abcdef", "abc", floor=0.0)
        assert result == oracles.brute_scan("abcdef", "abc")

    def test_empty_document(self):
        assert scan_document("abc", "", floor=0.0) == []

    @pytest.mark.parametrize("stride", [1, 2, 3, 7])
    def test_stride_matches_brute_force(self, stride):
        rng = random.Random(stride)
        gold = "".join(rng.choices("abz():\n ", k=24))
        doc = "".join(rng.choices("abz():\n ", k=400))
        spec = WindowSpec(length=len(gold), stride=stride)
        got = scan_document(gold, doc, spec, floor=30.0)
        want = [pair for pair in oracles.brute_scan(gold, doc, stride)
                if pair[1] >= 30.0]
        assert got == want

    @pytest.mark.parametrize("floor", [0.0, 35.0, 60.0, 90.0])
    def test_prune_equals_no_prune(self, floor):
        rng = random.Random(int(floor))
        gold = "".join(rng.choices("abcde(): \n", k=30))
        doc = "".join(rng.choices("abcde(): \n", k=1500))
        doc = doc[:700] + gold[:25] + "##" + gold[25:] + doc[700:]
        pruned = scan_document(gold, doc, floor=floor, prune=True)
        unpruned = scan_document(gold, doc, floor=floor, prune=False)
        assert pruned == unpruned

    def test_levenshtein_variant_scan(self):
        rng = random.Random(5)
        gold = "".join(rng.choices("abc ", k=12))
        doc = "".join(rng.choices("abc ", k=300))
        got = scan_document(gold, doc, floor=40.0, variant="levenshtein")
        want = [pair for pair in oracles.brute_scan(gold, doc, variant="levenshtein")
                if pair[1] >= 40.0]
        assert got == want
        pruned_off = scan_document(gold, doc, floor=40.0, variant="levenshtein",
                                   prune=False)
        assert got == pruned_off

    def test_monotone_floor_shrinks_results(self):
        rng = random.Random(11)
        gold = "".join(rng.choices("qwe rty\n", k=40))
        doc = "".join(rng.choices("qwe rty\n", k=2000))
        previous = None
        for floor in (0.0, 20.0, 40.0, 60.0, 80.0, 100.0):
            current = set(scan_document(gold, doc, floor=floor))
            if previous is not None:
                assert current <= previous
            previous = current

    def test_planted_region_found(self):
        rng = random.Random(21)
        gold = "def planted(a):\n    return a + a\n"
        noise = "".join(rng.choices("ghjkl;.,'", k=3000))
        doc = noise[:1200] + gold + noise[1200:]
        result = scan_document(gold, doc, floor=100.0)
        assert result == [(1200, 100.0)]


class TestGoldQuery:
    def test_window_score_matches_similarity(self):
        query = GoldQuery("hello world")
        for window in ("hello world", "hello", "", "worldhello", "hxllo wyrld"):
            assert query.window_score(window) == surface_similarity(
                "hello world", window)

    def test_rejects_unknown_variant(self):
        with pytest.raises(ValueError):
            GoldQuery("abc", "bogus")
