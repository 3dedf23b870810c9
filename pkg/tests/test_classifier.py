import numpy as np
import pytest

from hogface.classifier import (GalleryEntry, GalleryError, bin_distance,
                                bin_vote, classify, rank)
from hogface.pca2d import ProjectionBasis


def identity_bases(n_bins, w):
    return [ProjectionBasis(X=np.eye(w), eigenvalues=np.ones(w)) for _ in range(n_bins)]


def entry(label, feats, source=""):
    return GalleryEntry(label=label, features=[np.asarray(f, float) for f in feats],
                        source_id=source)


class TestBinDistance:
    def test_identical_is_zero(self):
        y = np.random.default_rng(0).normal(size=(4, 3))
        assert bin_distance(y, y) == 0.0

    def test_three_four_five_column(self):
        y1 = np.array([[3.0, 0.0], [4.0, 0.0]])
        y2 = np.zeros((2, 2))
        assert bin_distance(y1, y2) == pytest.approx(5.0)

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=(3, 2)), rng.normal(size=(3, 2))
        assert bin_distance(a, b) == bin_distance(b, a)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            bin_distance(np.zeros((2, 2)), np.zeros((2, 3)))


class TestBinVote:
    def test_single_entry_always_wins(self):
        g = [entry("a", [np.ones((2, 2))])]
        label, _ = bin_vote(np.zeros((2, 2)), g, 0)
        assert label == "a"

    def test_exact_match_distance_zero(self):
        feat = np.arange(4.0).reshape(2, 2)
        g = [entry("a", [np.ones((2, 2))]), entry("b", [feat])]
        label, dist = bin_vote(feat, g, 0)
        assert label == "b" and dist == 0.0

    def test_nearest_wins(self):
        g = [entry("near", [np.full((1, 1), 1.0)]), entry("far", [np.full((1, 1), 2.0)])]
        label, dist = bin_vote(np.zeros((1, 1)), g, 0)
        assert label == "near" and dist == pytest.approx(1.0)

    def test_tie_goes_to_first(self):
        g = [entry("b", [np.full((1, 1), 1.0)]), entry("a", [np.full((1, 1), -1.0)])]
        label, _ = bin_vote(np.zeros((1, 1)), g, 0)
        assert label == "b"

    def test_empty_gallery(self):
        with pytest.raises(GalleryError):
            bin_vote(np.zeros((1, 1)), [], 0)


def make_query(bins, h, w, value=0.0):
    return np.full((bins, h, w), value)


class TestClassify:
    def test_single_label_unanimous(self):
        bases = identity_bases(3, 2)
        g = [entry("only", [np.ones((2, 2))] * 3, "s0")]
        res = classify(make_query(3, 2, 2), bases, g)
        assert res.label == "only"
        assert res.votes == {"only": 3}
        assert sum(res.votes.values()) == 3

    def test_self_match_zero_distance(self):
        rng = np.random.default_rng(2)
        bases = identity_bases(2, 3)
        stack = rng.normal(size=(2, 4, 3))
        g = [entry("me", [stack[0], stack[1]]),
             entry("other", [rng.normal(size=(4, 3)), rng.normal(size=(4, 3))])]
        res = classify(stack, bases, g)
        assert res.label == "me"
        assert res.total_distance["me"] == 0.0

    def test_majority_two_to_one(self):
        bases = identity_bases(3, 1)
        # bins 0,1 nearest c1; bin 2 nearest c2
        g = [entry("c1", [[[0.0]], [[0.0]], [[9.0]]]),
             entry("c2", [[[9.0]], [[9.0]], [[0.0]]])]
        res = classify(make_query(3, 1, 1), bases, g)
        assert res.label == "c1"
        assert res.votes == {"c1": 2, "c2": 1}

    def test_vote_tie_breaks_by_total_distance(self):
        bases = identity_bases(2, 1)
        g = [entry("far", [[[0.0]], [[5.0]]]),
             entry("close", [[[1.0]], [[0.0]]])]
        res = classify(make_query(2, 1, 1), bases, g)
        assert res.votes == {"far": 1, "close": 1}
        assert res.label == "close"

    def test_full_tie_breaks_lexicographically(self):
        bases = identity_bases(2, 1)
        g = [entry("b", [[[1.0]], [[2.0]]]), entry("a", [[[2.0]], [[1.0]]])]
        res = classify(make_query(2, 1, 1), bases, g)
        assert res.votes == {"a": 1, "b": 1}
        assert res.total_distance["a"] == res.total_distance["b"]
        assert res.label == "a"

    def test_total_distance_uses_best_entry_per_class(self):
        bases = identity_bases(1, 1)
        g = [entry("c", [[[1.0]]]), entry("c", [[[100.0]]])]
        res = classify(make_query(1, 1, 1), bases, g)
        assert res.total_distance["c"] == pytest.approx(1.0)

    def test_gallery_order_irrelevant_for_distinct_distances(self):
        rng = np.random.default_rng(3)
        bases = identity_bases(2, 2)
        entries = [entry(f"p{i}", [rng.normal(size=(3, 2)) for _ in range(2)])
                   for i in range(5)]
        q = rng.normal(size=(2, 3, 2))
        res_fwd = classify(q, bases, entries)
        res_rev = classify(q, bases, entries[::-1])
        assert res_fwd.label == res_rev.label
        assert res_fwd.votes == res_rev.votes

    def test_bin_mismatch_names_bin(self):
        bases = identity_bases(2, 2)
        g = [entry("a", [np.ones((2, 2)), np.ones((3, 2))])]
        with pytest.raises(GalleryError, match="bin"):
            classify(np.ones((2, 2, 2)), bases, g)

    def test_empty_gallery(self):
        with pytest.raises(GalleryError):
            classify(make_query(1, 1, 1), identity_bases(1, 1), [])


class TestRank:
    def test_head_matches_classify(self):
        rng = np.random.default_rng(4)
        bases = identity_bases(3, 2)
        g = [entry(f"p{i}", [rng.normal(size=(2, 2)) for _ in range(3)])
             for i in range(4)]
        q = rng.normal(size=(3, 2, 2))
        assert rank(q, bases, g, 1)[0][0] == classify(q, bases, g).label

    def test_k_larger_than_classes(self):
        bases = identity_bases(1, 1)
        g = [entry("a", [[[0.0]]]), entry("b", [[[1.0]]]), entry("a", [[[2.0]]])]
        out = rank(make_query(1, 1, 1), bases, g, 10)
        assert [lb for lb, _ in out] == ["a", "b"]

    def test_distance_orders_equal_votes(self):
        bases = identity_bases(2, 1)
        g = [entry("near", [[[0.0]], [[5.0]]]), entry("zero", [[[1.0]], [[0.0]]])]
        out = rank(make_query(2, 1, 1), bases, g, 2)
        assert out[0][0] == "zero"

    def test_scores_nonincreasing_under_order(self):
        rng = np.random.default_rng(5)
        bases = identity_bases(2, 2)
        g = [entry(f"p{i}", [rng.normal(size=(2, 2)) for _ in range(2)])
             for i in range(6)]
        out = rank(rng.normal(size=(2, 2, 2)), bases, g, 6)
        votes = [int(s) for _, s in out]
        assert votes == sorted(votes, reverse=True)

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            rank(make_query(1, 1, 1), identity_bases(1, 1),
                 [entry("a", [[[0.0]]])], 0)
