"""Generalized correlation estimation from per-condition samples.

The default estimator is Kendall's tau-b mapped through the sine transform
``sin(pi/2 * tau)``, which estimates the latent correlation of an elliptical
model from ranks alone and is therefore robust to monotone marginal
distortions and outliers. A plain Pearson correlation is available as the
parametric alternative. Both estimators finish with an eigenvalue-floor
repair so downstream solvers always receive a matrix with a bounded
log-likelihood.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

DEFAULT_PSD_FLOOR = 1e-8

# Cap on the temporary sign-matrix size used by the all-pairs tau kernel
# (number of float64 entries per chunk).
_PAIR_CHUNK_BUDGET = 4_000_000


@dataclass(frozen=True)
class SampleMatrix:
    """Observations for one condition: rows are samples, columns variables."""

    values: np.ndarray
    variable_names: tuple[str, ...]
    condition_label: str

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        if values.ndim != 2:
            raise ValueError(f"sample matrix must be 2-d, got shape {values.shape}")
        n, p = values.shape
        if n < 2 or p < 2:
            raise ValueError(f"need at least 2 rows and 2 columns, got {n}x{p}")
        if len(self.variable_names) != p:
            raise ValueError(
                f"{len(self.variable_names)} variable names for {p} columns"
            )
        if not np.isfinite(values).all():
            bad = np.argwhere(~np.isfinite(values))[0]
            raise ValueError(
                f"non-finite value at row {bad[0]}, column "
                f"'{self.variable_names[bad[1]]}' of condition "
                f"'{self.condition_label}'"
            )

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_variables(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CorrelationMatrix:
    """Symmetric p x p correlation estimate plus the estimator that made it."""

    values: np.ndarray
    estimator_kind: str
    variable_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "variable_names", tuple(self.variable_names))
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError(f"correlation matrix must be square, got {values.shape}")
        if self.estimator_kind not in ("kendall_sine", "pearson"):
            raise ValueError(f"unknown estimator kind '{self.estimator_kind}'")
        if not np.array_equal(values, values.T):
            raise ValueError("correlation matrix must be exactly symmetric")

    @property
    def n_variables(self) -> int:
        return self.values.shape[0]


def _pair_sign_stats(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """All-pairs concordance statistics for the columns of ``x``.

    Returns ``(numer, untied)`` where ``numer[i, j]`` is the concordant minus
    discordant pair count between columns i and j and ``untied[i]`` is the
    number of sample pairs not tied in column i. Both are integer-valued;
    the accumulation stays exact in float64, so the result is independent of
    chunking.
    """
    n, p = x.shape
    iu, jl = np.triu_indices(n, k=1)
    numer = np.zeros((p, p))
    untied = np.zeros(p)
    chunk = max(1, _PAIR_CHUNK_BUDGET // max(p, 1))
    for start in range(0, iu.size, chunk):
        sl = slice(start, start + chunk)
        signs = np.sign(x[iu[sl]] - x[jl[sl]])
        numer += signs.T @ signs
        untied += np.count_nonzero(signs, axis=0)
    return numer, untied


def kendall_tau_matrix(x: np.ndarray) -> np.ndarray:
    """Tau-b correlation between every pair of columns of ``x``.

    Tie-corrected: tau = (C - D) / sqrt((n0 - t_i)(n0 - t_j)) with n0 the
    total pair count and t_i the tied pair count of column i. Columns with
    all samples tied get tau 0 against everything (including themselves;
    the caller owns the diagonal).
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError("expected a 2-d array of samples")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    numer, untied = _pair_sign_stats(x)
    denom = np.sqrt(np.outer(untied, untied))
    with np.errstate(divide="ignore", invalid="ignore"):
        tau = np.where(denom > 0, numer / np.where(denom > 0, denom, 1.0), 0.0)
    return tau


def kendall_tau(x, y) -> float:
    """Tau-b between two equal-length vectors; 0 when either is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.ndim != 1 or y.ndim != 1:
        raise ValueError("kendall_tau expects 1-d vectors")
    if x.shape[0] != y.shape[0]:
        raise ValueError(f"length mismatch: {x.shape[0]} vs {y.shape[0]}")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 observations")
    if not (np.isfinite(x).all() and np.isfinite(y).all()):
        raise ValueError("inputs must be finite")
    return float(kendall_tau_matrix(np.column_stack([x, y]))[0, 1])


def ensure_psd(m: np.ndarray, floor: float = DEFAULT_PSD_FLOOR) -> np.ndarray:
    """Clip eigenvalues of a symmetric matrix up to ``floor`` and rebuild.

    Eigenvectors are preserved; only eigenvalues below the floor move. The
    output minimum eigenvalue is >= floor up to eigensolver round-off.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    if not np.allclose(m, m.T, rtol=0.0, atol=1e-10):
        raise ValueError("matrix must be symmetric")
    if floor <= 0:
        raise ValueError("floor must be positive")
    w, v = np.linalg.eigh((m + m.T) / 2.0)
    if w.min() >= floor:
        return m
    repaired = (v * np.maximum(w, floor)) @ v.T
    return (repaired + repaired.T) / 2.0


def _repair_to_correlation(corr: np.ndarray, floor: float) -> np.ndarray:
    """Eigenvalue clipping that keeps the diagonal pinned at exactly 1.

    Clipping alone inflates the diagonal; rescaling back to unit diagonal is
    a congruence transform (stays PD) but can land the smallest eigenvalue
    slightly below the floor again. After a few clip/rescale passes the
    matrix is blended with the identity, (1-a)*M + a*I, which preserves the
    unit diagonal exactly and lifts the spectrum to the floor in one step.
    """
    m = (corr + corr.T) / 2.0
    np.fill_diagonal(m, 1.0)
    for _ in range(3):
        if np.linalg.eigvalsh(m).min() >= floor * (1.0 - 1e-9):
            return m
        m = ensure_psd(m, floor)
        d = np.sqrt(np.diag(m))
        m = m / np.outer(d, d)
        m = (m + m.T) / 2.0
        np.fill_diagonal(m, 1.0)
    smallest = np.linalg.eigvalsh(m).min()
    if smallest < floor:
        # smallest > 0 here: the congruence transform preserved definiteness
        alpha = (1.1 * floor - smallest) / (1.0 - smallest)
        m = m * (1.0 - alpha)
        np.fill_diagonal(m, 1.0)
    return m


def estimate_correlation(
    data: SampleMatrix,
    kind: str = "kendall_sine",
    floor: float = DEFAULT_PSD_FLOOR,
) -> CorrelationMatrix:
    """Estimate the generalized correlation matrix of one condition.

    ``kendall_sine`` computes pairwise tau-b and maps it through
    ``sin(pi/2 * tau)``; ``pearson`` normalizes the sample covariance.
    Constant columns are kept (zero off-diagonal, unit diagonal) with a
    warning instead of failing, so degenerate assays still process. The
    result is repaired to minimum eigenvalue >= ``floor`` with the diagonal
    pinned at 1.
    """
    x = data.values
    if kind == "kendall_sine":
        tau = kendall_tau_matrix(x)
        constant = x.min(axis=0) == x.max(axis=0)
        corr = np.sin(0.5 * math.pi * tau)
    elif kind == "pearson":
        constant = x.std(axis=0) == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            corr = np.corrcoef(x, rowvar=False)
        corr = np.where(np.isfinite(corr), corr, 0.0)
    else:
        raise ValueError(f"unknown estimator kind '{kind}'")
    if constant.any():
        names = [data.variable_names[i] for i in np.flatnonzero(constant)]
        warnings.warn(
            f"condition '{data.condition_label}': constant column(s) "
            f"{names} contribute zero correlation",
            RuntimeWarning,
        )
    np.fill_diagonal(corr, 1.0)
    corr = (corr + corr.T) / 2.0
    repaired = _repair_to_correlation(corr, floor)
    return CorrelationMatrix(repaired, kind, data.variable_names)
