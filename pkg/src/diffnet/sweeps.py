"""Similarity-bias and sparsity sweeps producing differential PR curves.

Each grid point is an independent joint solve; the learned differences are
scored against the true differences, giving one (precision, recall) point per
penalty setting. The lambda2 = 0 endpoint is the independent-learning
baseline and carries the highest recall; lambda2 = 1 forces identical
supports, so it always reports zero discoveries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .networks import EdgeSet, diff_edges, differential_confusion, extract_network
from .solver import PenaltyParams, solve_jgl

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PRPoint:
    param_value: float
    precision: float
    recall: float
    n_discoveries: int


@dataclass
class PRCurve:
    """PR points indexed by a swept penalty parameter, strictly ascending."""

    swept_param: str
    points: list[PRPoint]
    fixed: dict[str, float] = field(default_factory=dict)
    errors: list[tuple[float, str]] = field(default_factory=list)
    n_solver_calls: int = 0

    def __post_init__(self):
        if self.swept_param not in ("lambda2", "cutoff_c", "lambda1"):
            raise ValueError(f"unknown swept parameter '{self.swept_param}'")
        values = [pt.param_value for pt in self.points]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError("swept parameter values must be strictly ascending")

    @property
    def param_values(self) -> list[float]:
        return [pt.param_value for pt in self.points]

    def best_precision(self) -> float:
        """Highest precision among points that made at least one discovery."""
        live = [pt.precision for pt in self.points if pt.n_discoveries > 0]
        return max(live) if live else 0.0


def _check_grid(grid, name: str, lo: float = 0.0, hi: float | None = 1.0) -> list[float]:
    values = [float(v) for v in grid]
    if not values:
        raise ValueError(f"{name} must not be empty")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ValueError(f"{name} must be strictly ascending")
    if values[0] < lo or (hi is not None and values[-1] > hi):
        raise ValueError(f"{name} values outside [{lo}, {hi}]")
    return values


def learned_differences(thetas, names) -> tuple[list[EdgeSet], EdgeSet]:
    """Per-condition networks and the differences of the first two conditions."""
    nets = [extract_network(theta, names) for theta in thetas]
    if len(nets) != 2:
        raise ValueError("differential sweeps expect exactly 2 conditions")
    return nets, diff_edges(nets[0], nets[1])


def sweep_lambda2(
    corrs,
    lambda1: float,
    lambda2_grid,
    truth: EdgeSet,
    rho: float = 1.0,
    tol: float = 1e-5,
    max_iters: int = 500,
) -> PRCurve:
    """One joint solve per lambda2 value, scored against the true differences.

    Solver failures at single grid points are recorded on the curve and the
    sweep continues; surviving points keep the ascending-parameter invariant.
    """
    grid = _check_grid(lambda2_grid, "lambda2_grid")
    points: list[PRPoint] = []
    errors: list[tuple[float, str]] = []
    n_calls = 0
    for lam2 in grid:
        params = PenaltyParams(lambda1, lam2, rho=rho, tol=tol, max_iters=max_iters)
        try:
            n_calls += 1
            result = solve_jgl(corrs, params)
            _, learned = learned_differences(result.thetas, truth.node_names)
        except Exception as exc:  # noqa: BLE001 - record and keep sweeping
            logger.warning("solve failed at lambda2=%g: %s", lam2, exc)
            errors.append((lam2, str(exc)))
            continue
        counts = differential_confusion(truth, learned)
        points.append(
            PRPoint(lam2, counts.precision, counts.recall, counts.n_discoveries)
        )
    return PRCurve(
        "lambda2",
        points,
        fixed={"lambda1": float(lambda1)},
        errors=errors,
        n_solver_calls=n_calls,
    )


def sweep_lambda1(
    corrs,
    lambda1_grid,
    lambda2_grid,
    truth: EdgeSet,
    rho: float = 1.0,
    tol: float = 1e-5,
    max_iters: int = 500,
) -> list[PRCurve]:
    """One lambda2 sweep per lambda1 value (denser to sparser networks)."""
    grid = _check_grid(lambda1_grid, "lambda1_grid", hi=None)
    return [
        sweep_lambda2(
            corrs, lam1, lambda2_grid, truth, rho=rho, tol=tol, max_iters=max_iters
        )
        for lam1 in grid
    ]
