"""Permutation-split false discovery rate estimation for unlabeled data.

With no ground truth, the FDR of a differential analysis is estimated by
pooling the rows of all conditions, dealing them back at random into
synthetic populations of the original sizes, and re-running the full
pipeline: any difference found between the synthetic populations is a false
discovery. The ratio of the mean null discovery count to the real discovery
count estimates the FDR. The estimate is known to be optimistic; it is
reported as a mechanism and a trend, never as the true FDR.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .correlation import CorrelationMatrix, SampleMatrix, estimate_correlation
from .networks import diff_edges, extract_network
from .solver import PenaltyParams, solve_jgl

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FdrEstimate:
    """Null-split discovery counts against the real split's count."""

    n_splits: int
    null_discovery_counts: tuple[int, ...]
    real_discovery_count: int
    fdr_hat: float
    lambda1: float
    lambda2: float

    @property
    def degenerate(self) -> bool:
        """True when the real analysis found nothing to estimate an FDR for."""
        return self.real_discovery_count == 0


def _discovery_count(corrs: list[CorrelationMatrix], params: PenaltyParams, names) -> int:
    result = solve_jgl(corrs, params)
    nets = [extract_network(t, names) for t in result.thetas]
    total = 0
    for a in range(len(nets)):
        for b in range(a + 1, len(nets)):
            total += len(diff_edges(nets[a], nets[b]))
    return total


class PooledSplitter:
    """Random re-splits of the pooled rows, sized like the original conditions.

    Correlation matrices for the real split and every null split are computed
    once and reused across penalty settings, so a lambda2 curve costs one
    solve (not one correlation pass) per grid point and split.
    """

    def __init__(
        self,
        data: list[SampleMatrix],
        n_splits: int,
        rng: np.random.Generator,
        estimator: str = "kendall_sine",
    ):
        if n_splits < 1:
            raise ValueError("need at least one null split")
        if len(data) < 2:
            raise ValueError("need at least two conditions")
        names = data[0].variable_names
        for d in data[1:]:
            if d.variable_names != names:
                raise ValueError("conditions must share variable names")
        self.names = names
        self.sizes = [d.n_samples for d in data]
        self.n_splits = n_splits
        self.estimator = estimator
        pooled = np.vstack([d.values for d in data])
        total = pooled.shape[0]

        self.real_corrs = [estimate_correlation(d, estimator) for d in data]
        self.split_corrs: list[list[CorrelationMatrix]] = []
        self.split_assignments: list[list[np.ndarray]] = []
        for split_rng in rng.spawn(n_splits):
            order = split_rng.permutation(total)
            blocks, start = [], 0
            for size in self.sizes:
                blocks.append(order[start : start + size])
                start += size
            self.split_assignments.append(blocks)
            corrs = [
                estimate_correlation(
                    SampleMatrix(pooled[block], names, f"null{k}"), estimator
                )
                for k, block in enumerate(blocks)
            ]
            self.split_corrs.append(corrs)

    def estimate(self, params: PenaltyParams) -> FdrEstimate:
        real_count = _discovery_count(self.real_corrs, params, self.names)
        null_counts = []
        for i, corrs in enumerate(self.split_corrs):
            try:
                null_counts.append(_discovery_count(corrs, params, self.names))
            except Exception as exc:  # noqa: BLE001 - skip split, keep the rest
                logger.warning("null split %d failed: %s", i, exc)
        if not null_counts:
            raise RuntimeError("every null split failed")
        fdr_hat = min(1.0, float(np.mean(null_counts)) / max(1, real_count))
        return FdrEstimate(
            n_splits=len(null_counts),
            null_discovery_counts=tuple(null_counts),
            real_discovery_count=real_count,
            fdr_hat=fdr_hat,
            lambda1=params.lambda1,
            lambda2=params.lambda2,
        )


def estimate_fdr(
    data: list[SampleMatrix],
    params: PenaltyParams,
    n_splits: int,
    rng: np.random.Generator,
    estimator: str = "kendall_sine",
) -> FdrEstimate:
    """FDR estimate at a single penalty setting."""
    return PooledSplitter(data, n_splits, rng, estimator).estimate(params)


def fdr_curve(
    data: list[SampleMatrix],
    lambda1: float,
    lambda2_grid,
    n_splits: int,
    rng: np.random.Generator,
    estimator: str = "kendall_sine",
    rho: float = 1.0,
    tol: float = 1e-5,
    max_iters: int = 500,
) -> list[FdrEstimate]:
    """FDR estimate per lambda2 grid point, sharing the same null splits.

    Reusing one set of splits across the grid pairs the estimates, which
    keeps the curve smooth and spares a correlation pass per point.
    """
    grid = [float(v) for v in lambda2_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("lambda2_grid must be non-empty and strictly ascending")
    splitter = PooledSplitter(data, n_splits, rng, estimator)
    return [
        splitter.estimate(
            PenaltyParams(lambda1, lam2, rho=rho, tol=tol, max_iters=max_iters)
        )
        for lam2 in grid
    ]
