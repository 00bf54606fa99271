import math

import numpy as np
import pytest

from diffnet.correlation import (
    CorrelationMatrix,
    SampleMatrix,
    ensure_psd,
    estimate_correlation,
    kendall_tau,
    kendall_tau_matrix,
)


def tau_b_oracle(x, y):
    """Brute-force O(n^2) pair enumeration; independent of the library path."""
    n = len(x)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0:
                ties_x += 1
            if dy == 0:
                ties_y += 1
            if dx * dy > 0:
                concordant += 1
            elif dx * dy < 0:
                discordant += 1
    n0 = n * (n - 1) // 2
    if n0 == ties_x or n0 == ties_y:
        return 0.0
    return (concordant - discordant) / math.sqrt((n0 - ties_x) * (n0 - ties_y))


class TestKendallTau:
    def test_identical_vectors(self):
        assert kendall_tau([1, 2, 3], [1, 2, 3]) == 1.0

    def test_reversed_vectors(self):
        assert kendall_tau([1, 2, 3], [3, 2, 1]) == -1.0

    def test_single_swap(self):
        # All 6 pairs enumerated by hand: 5 concordant, 1 discordant.
        assert kendall_tau([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(2.0 / 3.0)

    def test_constant_vector_returns_zero(self):
        assert kendall_tau([1.0, 1.0, 1.0], [1, 2, 3]) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError, match="length mismatch"):
            kendall_tau([1, 2], [1, 2, 3])

    def test_too_short(self):
        with pytest.raises(ValueError):
            kendall_tau([1.0], [2.0])

    def test_symmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(2, 40))
            x = rng.standard_normal(n)
            y = rng.standard_normal(n)
            assert kendall_tau(x, y) == kendall_tau(y, x)

    def test_monotone_invariance(self):
        rng = np.random.default_rng(12)
        transforms = [
            np.exp,
            lambda v: v**3,
            lambda v: 5 * v - 2,
            np.arctan,
            lambda v: np.sinh(v / 2),
        ]
        for i in range(25):
            n = int(rng.integers(3, 60))
            x = rng.standard_normal(n)
            y = rng.standard_normal(n)
            f = transforms[i % len(transforms)]
            assert kendall_tau(f(x), y) == pytest.approx(kendall_tau(x, y), abs=1e-12)

    def test_matches_bruteforce_oracle_exactly(self):
        rng = np.random.default_rng(13)
        for _ in range(60):
            n = int(rng.integers(2, 200))
            if rng.random() < 0.5:
                # integer data forces ties
                x = rng.integers(0, 6, size=n).astype(float)
                y = rng.integers(0, 6, size=n).astype(float)
            else:
                x = rng.standard_normal(n)
                y = rng.standard_normal(n)
            assert kendall_tau(x, y) == tau_b_oracle(x, y)

    def test_matrix_agrees_with_pairwise(self):
        rng = np.random.default_rng(14)
        x = rng.integers(0, 4, size=(30, 5)).astype(float)
        taus = kendall_tau_matrix(x)
        for i in range(5):
            for j in range(5):
                if i != j:
                    assert taus[i, j] == tau_b_oracle(x[:, i], x[:, j])

    def test_matrix_chunking_invariance(self, monkeypatch):
        import diffnet.correlation as corr_mod

        rng = np.random.default_rng(15)
        x = rng.standard_normal((120, 7))
        full = kendall_tau_matrix(x)
        monkeypatch.setattr(corr_mod, "_PAIR_CHUNK_BUDGET", 97)
        chunked = kendall_tau_matrix(x)
        assert np.array_equal(full, chunked)


class TestEnsurePsd:
    def test_identity_unchanged(self):
        eye = np.eye(3)
        assert np.array_equal(ensure_psd(eye, 1e-8), eye)

    def test_direct_clip(self):
        out = ensure_psd(np.diag([1.0, -0.5]), 1e-8)
        assert out == pytest.approx(np.diag([1.0, 1e-8]), abs=1e-15)

    def test_random_negative_eigenvalue_repaired(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            a = rng.standard_normal((4, 4))
            m = (a + a.T) / 2
            m -= (np.linalg.eigvalsh(m).min() + 0.5) * np.eye(4)
            assert np.linalg.eigvalsh(m).min() < 0
            out = ensure_psd(m, 1e-8)
            assert np.linalg.eigvalsh(out).min() >= 1e-8 - 1e-12

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError, match="symmetric"):
            ensure_psd(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError, match="non-finite"):
            ensure_psd(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestSampleMatrix:
    def test_rejects_nan(self):
        values = np.array([[1.0, 2.0], [np.nan, 3.0]])
        with pytest.raises(ValueError, match="row 1, column 'a'"):
            SampleMatrix(values, ("a", "b"), "c")

    def test_rejects_small(self):
        with pytest.raises(ValueError):
            SampleMatrix(np.ones((1, 3)), ("a", "b", "c"), "c")

    def test_name_count_checked(self):
        with pytest.raises(ValueError):
            SampleMatrix(np.ones((3, 2)), ("a",), "c")


class TestEstimateCorrelation:
    def _sample(self, n=40, p=4, seed=31):
        rng = np.random.default_rng(seed)
        values = rng.standard_normal((n, p))
        names = tuple(f"v{i}" for i in range(p))
        return SampleMatrix(values, names, "test")

    def test_sine_transform_endpoints(self):
        # tau 1 -> 1 and tau 0 -> 0 through the sine map
        assert math.sin(math.pi / 2 * 1.0) == 1.0
        assert math.sin(0.0) == 0.0
        x = np.arange(10.0)
        data = SampleMatrix(
            np.column_stack([x, x, np.cos(x * 2.7)]), ("a", "b", "c"), "t"
        )
        corr = estimate_correlation(data, "kendall_sine")
        # identical columns are perfectly correlated up to the PSD floor repair
        assert corr.values[0, 1] == pytest.approx(1.0, abs=1e-6)

    def test_sine_transform_value(self):
        # tau = 2/3 between these columns (enumerated by hand above)
        data = SampleMatrix(
            np.column_stack([[1, 2, 3, 4], [1, 3, 2, 4]]), ("a", "b"), "t"
        )
        corr = estimate_correlation(data, "kendall_sine")
        assert corr.values[0, 1] == pytest.approx(math.sin(math.pi / 3), abs=1e-12)
        assert corr.values[0, 1] == pytest.approx(0.86603, abs=5e-6)

    def test_symmetric_unit_diagonal_and_floor(self):
        for seed in range(5):
            data = self._sample(n=12, p=8, seed=seed)
            corr = estimate_correlation(data, "kendall_sine")
            assert np.array_equal(corr.values, corr.values.T)
            assert np.diag(corr.values) == pytest.approx(np.ones(8), abs=0)
            assert np.linalg.eigvalsh(corr.values).min() >= 1e-8 - 1e-12

    def test_pearson_matches_corrcoef(self):
        data = self._sample(n=200, p=3, seed=32)
        corr = estimate_correlation(data, "pearson")
        expected = np.corrcoef(data.values, rowvar=False)
        assert corr.values == pytest.approx(expected, abs=1e-10)

    def test_constant_column_warns_and_zeroes(self):
        values = np.column_stack([np.ones(20), np.arange(20.0), np.arange(20.0) ** 2])
        data = SampleMatrix(values, ("const", "a", "b"), "t")
        with pytest.warns(RuntimeWarning, match="constant"):
            corr = estimate_correlation(data, "kendall_sine")
        assert corr.values[0, 1] == 0.0
        assert corr.values[0, 2] == 0.0
        assert corr.values[0, 0] == 1.0

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="estimator"):
            estimate_correlation(self._sample(), "spearman")

    def test_estimator_kind_recorded(self):
        corr = estimate_correlation(self._sample(), "kendall_sine")
        assert corr.estimator_kind == "kendall_sine"
        assert isinstance(corr, CorrelationMatrix)
