"""Joint sparse precision estimation across conditions via consensus ADMM.

The target is, for K conditions with correlation estimates S_k, the maximizer
over symmetric positive definite Theta_k of

    sum_k [ log det Theta_k - tr(S_k Theta_k) ]
        - lambda1 * sum_{i != j} [ (1 - lambda2) * sum_k |theta_k_ij|
                                   + lambda2 * sqrt(sum_k theta_k_ij^2) ]

lambda1 sets the overall sparsity of every network; lambda2 in [0, 1] blends
the elementwise l1 penalty into a group l2 penalty across conditions, pulling
the supports toward agreement. At lambda2 = 0 the problem separates into one
graphical lasso per condition; at lambda2 = 1 the learned supports coincide.

ADMM splits the smooth likelihood from the nonsmooth penalty through a
consensus copy Z_k with scaled dual U_k:

  * Theta step (per condition): closed form via eigendecomposition of
    rho (Z_k - U_k) - S_k, mapping eigenvalues d to
    (d + sqrt(d^2 + 4 rho)) / (2 rho), which is always positive.
  * Z step: the hybrid-penalty prox applied across conditions at every
    off-diagonal entry; diagonals pass through unpenalized.
  * U step: U_k += Theta_k - Z_k.

Supports are read off Z, whose prox produces exact zeros; the returned
matrices carry Theta's values masked by Z's pattern, so no epsilon threshold
enters the sparsity decision.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

logger = logging.getLogger(__name__)


class SolverError(RuntimeError):
    """Raised when the ADMM iteration produces non-finite values."""


@dataclass(frozen=True)
class PenaltyParams:
    """Penalty weights and ADMM knobs for one joint solve."""

    lambda1: float
    lambda2: float
    rho: float = 1.0
    max_iters: int = 500
    tol: float = 1e-5

    def __post_init__(self):
        if self.lambda1 < 0:
            raise ValueError(f"lambda1 must be >= 0, got {self.lambda1}")
        if not 0.0 <= self.lambda2 <= 1.0:
            raise ValueError(f"lambda2 must be in [0, 1], got {self.lambda2}")
        if self.rho <= 0:
            raise ValueError(f"rho must be > 0, got {self.rho}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be a positive integer")
        if self.tol <= 0:
            raise ValueError("tol must be > 0")


@dataclass
class SolverTrace:
    """Per-iteration diagnostics; list lengths equal the iteration count."""

    objective: list[float] = field(default_factory=list)
    primal: list[float] = field(default_factory=list)
    dual: list[float] = field(default_factory=list)


@dataclass
class PrecisionMatrixSet:
    """Solver output: one sparse precision matrix per condition."""

    thetas: list[np.ndarray]
    params: PenaltyParams
    converged: bool
    iterations: int
    final_residuals: tuple[float, float]
    trace: SolverTrace | None = None

    @property
    def n_conditions(self) -> int:
        return len(self.thetas)


def soft_threshold(x, t):
    """Shrink toward zero: sign(x) * max(0, |x| - t). Scalar or array."""
    if np.any(np.asarray(t) < 0):
        raise ValueError("threshold must be >= 0")
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def prox_group_lasso(v, t1: float, t2: float) -> np.ndarray:
    """Minimizer of 0.5*||x - v||^2 + t1*||x||_1 + t2*||x||_2.

    Elementwise soft threshold at t1, then shrink the whole vector by the
    group threshold t2: zero when the thresholded norm is within t2, scaled
    by (1 - t2/norm) otherwise.
    """
    if t1 < 0 or t2 < 0:
        raise ValueError("thresholds must be >= 0")
    v = np.asarray(v, dtype=float)
    s = soft_threshold(v, t1)
    norm = float(np.linalg.norm(s))
    if norm <= t2:
        return np.zeros_like(s)
    return s * (1.0 - t2 / norm)


def _logdet_pd(m: np.ndarray) -> float:
    """Log-determinant via Cholesky; raises on non-PD input."""
    try:
        chol = np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise ValueError("matrix is not positive definite") from exc
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def _as_matrix_list(corrs) -> list[np.ndarray]:
    mats = []
    for c in corrs:
        mats.append(np.asarray(getattr(c, "values", c), dtype=float))
    if not mats:
        raise ValueError("need at least one correlation matrix")
    p = mats[0].shape[0]
    for k, m in enumerate(mats):
        if m.ndim != 2 or m.shape != (p, p):
            raise ValueError(
                f"condition {k}: expected a {p}x{p} matrix, got shape {m.shape}"
            )
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-10):
            raise ValueError(f"condition {k}: correlation matrix not symmetric")
    return mats


def objective_value(thetas, corrs, lambda1: float, lambda2: float) -> float:
    """Evaluate the joint objective (a maximization target; larger is better)."""
    mats = _as_matrix_list(corrs)
    thetas = [np.asarray(t, dtype=float) for t in thetas]
    if len(thetas) != len(mats):
        raise ValueError("one precision matrix per correlation matrix required")
    total = 0.0
    for theta, sig in zip(thetas, mats):
        total += _logdet_pd(theta) - float(np.sum(sig * theta))
    stacked = np.stack(thetas)
    off = ~np.eye(stacked.shape[1], dtype=bool)
    l1_part = np.abs(stacked).sum(axis=0)[off].sum()
    l2_part = np.sqrt((stacked**2).sum(axis=0))[off].sum()
    return total - lambda1 * ((1.0 - lambda2) * l1_part + lambda2 * l2_part)


def _theta_update(a: np.ndarray, rho: float, weight: float) -> np.ndarray:
    """Closed-form minimizer of -w*logdet(T) + (rho/2)||T - A/rho||^2 terms.

    ``a`` is rho*(Z - U) - w*S; the solution shares its eigenvectors and maps
    each eigenvalue d to (d + sqrt(d^2 + 4*rho*w)) / (2*rho) > 0.
    """
    d, v = np.linalg.eigh((a + a.T) / 2.0)
    theta_d = (d + np.sqrt(d * d + 4.0 * rho * weight)) / (2.0 * rho)
    theta = (v * theta_d) @ v.T
    return (theta + theta.T) / 2.0


def _sorted_sum(values) -> float:
    """Sum scalars in magnitude-canonical order: permutation-independent."""
    return float(np.sort(np.asarray(values, dtype=float)).sum())


def _group_prox_offdiag(v: np.ndarray, t1: float, t2: float) -> np.ndarray:
    """Apply the hybrid prox across conditions at every off-diagonal entry.

    ``v`` is the stacked (K, p, p) array Theta + U. Diagonals pass through.
    Squared terms are sorted before summing so that permuting the condition
    order permutes the output exactly.
    """
    k, p, _ = v.shape
    s = soft_threshold(v, t1)
    norms = np.sqrt(np.sort(s * s, axis=0).sum(axis=0))
    with np.errstate(divide="ignore", invalid="ignore"):
        shrink = np.where(norms > t2, 1.0 - t2 / np.where(norms > 0, norms, 1.0), 0.0)
    z = s * shrink[None, :, :]
    idx = np.arange(p)
    z[:, idx, idx] = v[:, idx, idx]
    return z


def solve_jgl(
    corrs,
    params: PenaltyParams,
    weights=None,
    collect_trace: bool = False,
) -> PrecisionMatrixSet:
    """Solve the joint problem over K conditions by ADMM.

    Parameters
    ----------
    corrs : sequence of CorrelationMatrix or (p, p) arrays
        One symmetric correlation estimate per condition, shared dimension.
    params : PenaltyParams
        lambda1/lambda2 plus rho, max_iters and tol.
    weights : sequence of float, optional
        Per-condition multipliers on the log-likelihood term (e.g. sample
        counts). Default is the unweighted objective.
    collect_trace : bool
        Record per-iteration objective and residuals (adds one Cholesky per
        condition per iteration).

    Returns
    -------
    PrecisionMatrixSet
        Masked precision matrices (exact zeros where the consensus variable
        is zero), convergence flag, iteration count and final residuals.
    """
    mats = _as_matrix_list(corrs)
    n_cond = len(mats)
    p = mats[0].shape[0]
    if weights is None:
        w = np.ones(n_cond)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != (n_cond,) or (w <= 0).any():
            raise ValueError("weights must be positive, one per condition")

    rho = params.rho
    t1 = params.lambda1 * (1.0 - params.lambda2) / rho
    t2 = params.lambda1 * params.lambda2 / rho

    sig = np.stack(mats)
    theta = np.stack([np.eye(p)] * n_cond)
    z = theta.copy()
    u = np.zeros_like(theta)
    trace = SolverTrace() if collect_trace else None

    converged = False
    primal = dual = np.inf
    iterations = 0
    for iteration in range(1, params.max_iters + 1):
        iterations = iteration
        for k in range(n_cond):
            theta[k] = _theta_update(rho * (z[k] - u[k]) - w[k] * sig[k], rho, w[k])
        if not np.isfinite(theta).all():
            raise SolverError(
                f"non-finite precision iterate at iteration {iteration} "
                f"(lambda1={params.lambda1}, lambda2={params.lambda2}, rho={rho})"
            )

        z_prev = z
        z = _group_prox_offdiag(theta + u, t1, t2)
        u = u + theta - z

        theta_norm = _sorted_sum([np.linalg.norm(theta[k]) for k in range(n_cond)])
        u_norm = _sorted_sum([np.linalg.norm(u[k]) for k in range(n_cond)])
        primal = _sorted_sum([np.linalg.norm(theta[k] - z[k]) for k in range(n_cond)])
        primal /= max(theta_norm, 1.0)
        dual = rho * _sorted_sum(
            [np.linalg.norm(z[k] - z_prev[k]) for k in range(n_cond)]
        )
        dual /= max(u_norm, 1.0)

        if trace is not None:
            obj = 0.0
            for k in range(n_cond):
                obj += w[k] * (_logdet_pd(theta[k]) - float(np.sum(sig[k] * theta[k])))
            off = ~np.eye(p, dtype=bool)
            l1_part = np.abs(theta).sum(axis=0)[off].sum()
            l2_part = np.sqrt((theta**2).sum(axis=0))[off].sum()
            obj -= params.lambda1 * ((1.0 - params.lambda2) * l1_part + params.lambda2 * l2_part)
            trace.objective.append(obj)
            trace.primal.append(primal)
            trace.dual.append(dual)

        if max(primal, dual) < params.tol:
            converged = True
            break

    if not converged:
        logger.warning(
            "ADMM did not converge in %d iterations (primal=%.3e dual=%.3e, "
            "lambda1=%g lambda2=%g)",
            params.max_iters, primal, dual, params.lambda1, params.lambda2,
        )

    thetas_out = []
    for k in range(n_cond):
        masked = theta[k].copy()
        off_zero = (z[k] == 0.0) & ~np.eye(p, dtype=bool)
        masked[off_zero] = 0.0
        thetas_out.append(masked)

    return PrecisionMatrixSet(
        thetas=thetas_out,
        params=params,
        converged=converged,
        iterations=iterations,
        final_residuals=(float(primal), float(dual)),
        trace=trace,
    )
