import itertools

import numpy as np
import pytest

from diffnet.networks import (
    ConfusionCounts,
    EdgeSet,
    diff_edges,
    differential_confusion,
    edge_confusion,
    extract_network,
    shared_edges,
)


def random_edge_set(rng, names, density=0.3):
    p = len(names)
    edges = {
        (i, j)
        for i in range(p)
        for j in range(i + 1, p)
        if rng.random() < density
    }
    return EdgeSet(names, frozenset(edges))


def confusion_oracle(truth, learned):
    """Exhaustive pair-by-pair classification, independent of set algebra."""
    tp = fp = fn = tn = 0
    p = len(truth.node_names)
    for i, j in itertools.combinations(range(p), 2):
        in_truth = (i, j) in truth.edges
        in_learned = (i, j) in learned.edges
        if in_truth and in_learned:
            tp += 1
        elif in_learned:
            fp += 1
        elif in_truth:
            fn += 1
        else:
            tn += 1
    return tp, fp, fn, tn


class TestEdgeSet:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError, match="self-loop"):
            EdgeSet(("a", "b"), frozenset({(1, 1)}))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            EdgeSet(("a", "b"), frozenset({(0, 2)}))

    def test_rejects_unordered(self):
        with pytest.raises(ValueError):
            EdgeSet(("a", "b", "c"), frozenset({(2, 0)}))

    def test_degrees(self):
        es = EdgeSet(("a", "b", "c"), frozenset({(0, 1), (0, 2)}))
        assert es.degrees() == {0: 2, 1: 1, 2: 1}


class TestExtractNetwork:
    def test_diagonal_matrix_empty(self):
        net = extract_network(np.diag([1.0, 2.0, 3.0]), ("a", "b", "c"))
        assert len(net) == 0

    def test_dense_matrix_complete(self):
        net = extract_network(np.ones((4, 4)), tuple("abcd"))
        assert len(net) == 6

    def test_solver_consensus_support_is_recovered(self):
        from diffnet.correlation import ensure_psd
        from diffnet.solver import PenaltyParams, solve_jgl

        rng = np.random.default_rng(61)
        a = rng.standard_normal((40, 10))
        c = np.corrcoef(a, rowvar=False)
        corrs = [ensure_psd(c, 1e-8), np.eye(10)]
        result = solve_jgl(corrs, PenaltyParams(0.3, 0.4))
        for theta in result.thetas:
            net = extract_network(theta, tuple(f"v{i}" for i in range(10)))
            expected = {
                (i, j)
                for i in range(10)
                for j in range(i + 1, 10)
                if theta[i, j] != 0.0
            }
            assert net.edges == expected

    def test_asymmetric_support_rejected(self):
        m = np.eye(3)
        m[0, 1] = 0.5
        with pytest.raises(ValueError, match="symmetric"):
            extract_network(m, ("a", "b", "c"))


class TestDiffEdges:
    def test_identical_empty(self):
        rng = np.random.default_rng(62)
        es = random_edge_set(rng, tuple("abcde"))
        assert len(diff_edges(es, es)) == 0

    def test_one_sided(self):
        a = EdgeSet(("a", "b"), frozenset({(0, 1)}))
        b = EdgeSet(("a", "b"), frozenset())
        assert diff_edges(a, b).edges == {(0, 1)}

    def test_set_algebra(self):
        names = tuple("abcd")
        a = EdgeSet(names, frozenset({(0, 1), (1, 2)}))
        b = EdgeSet(names, frozenset({(1, 2), (2, 3)}))
        assert diff_edges(a, b).edges == {(0, 1), (2, 3)}

    def test_commutative(self):
        rng = np.random.default_rng(63)
        for _ in range(20):
            a = random_edge_set(rng, tuple("abcdefg"))
            b = random_edge_set(rng, tuple("abcdefg"))
            assert diff_edges(a, b) == diff_edges(b, a)

    def test_node_mismatch(self):
        a = EdgeSet(("a", "b"), frozenset())
        b = EdgeSet(("a", "c"), frozenset())
        with pytest.raises(ValueError, match="node"):
            diff_edges(a, b)

    def test_shared_edges(self):
        names = tuple("abcd")
        a = EdgeSet(names, frozenset({(0, 1), (1, 2)}))
        b = EdgeSet(names, frozenset({(1, 2), (2, 3)}))
        assert shared_edges(a, b).edges == {(1, 2)}


class TestConfusion:
    def test_perfect_learning(self):
        rng = np.random.default_rng(64)
        truth = random_edge_set(rng, tuple("abcdef"))
        counts = edge_confusion(truth, truth)
        assert counts.fp == 0 and counts.fn == 0
        assert counts.tp == len(truth)

    def test_empty_learned(self):
        rng = np.random.default_rng(65)
        truth = random_edge_set(rng, tuple("abcdef"))
        counts = edge_confusion(truth, EdgeSet(truth.node_names, frozenset()))
        assert counts.tp == 0 and counts.fp == 0
        assert counts.fn == len(truth)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(66)
        names = tuple(f"n{i}" for i in range(10))
        for _ in range(30):
            truth = random_edge_set(rng, names)
            learned = random_edge_set(rng, names)
            counts = edge_confusion(truth, learned)
            assert (counts.tp, counts.fp, counts.fn, counts.tn) == confusion_oracle(
                truth, learned
            )

    def test_counts_sum_to_pair_count(self):
        rng = np.random.default_rng(67)
        names = tuple(f"n{i}" for i in range(12))
        for _ in range(20):
            truth = random_edge_set(rng, names)
            learned = random_edge_set(rng, names)
            for counts in (
                edge_confusion(truth, learned),
                differential_confusion(truth, learned),
            ):
                assert counts.total == 12 * 11 // 2

    def test_differential_exhaustive_small(self):
        rng = np.random.default_rng(68)
        names = tuple(f"n{i}" for i in range(12))
        for _ in range(50):
            true_diff = random_edge_set(rng, names, density=0.2)
            learned_diff = random_edge_set(rng, names, density=0.2)
            counts = differential_confusion(true_diff, learned_diff)
            assert counts.level == "differential"
            assert (
                counts.tp,
                counts.fp,
                counts.fn,
                counts.tn,
            ) == confusion_oracle(true_diff, learned_diff)

    def test_zero_discoveries_precision_one(self):
        names = ("a", "b", "c")
        true_diff = EdgeSet(names, frozenset({(0, 1)}))
        counts = differential_confusion(true_diff, EdgeSet(names, frozenset()))
        assert counts.precision == 1.0
        assert counts.n_discoveries == 0
        assert counts.recall == 0.0

    def test_perfect_differences(self):
        names = ("a", "b", "c")
        diff = EdgeSet(names, frozenset({(0, 1), (1, 2)}))
        counts = differential_confusion(diff, diff)
        assert counts.precision == 1.0 and counts.recall == 1.0

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            ConfusionCounts(-1, 0, 0, 0, "edge")

    def test_bad_level_rejected(self):
        with pytest.raises(ValueError):
            ConfusionCounts(0, 0, 0, 0, "other")
