"""Bootstrap baseline: resample, learn independently, threshold frequencies.

The comparison method re-learns both networks on bootstrap resamples of the
data (independent learning, i.e. no similarity bias) and records, per node
pair, the fraction of replicas in which the pair came out as a difference.
Sweeping a cutoff on that frequency traces the baseline's precision-recall
curve, at the cost of one solve per replica.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .correlation import SampleMatrix, estimate_correlation
from .networks import EdgeSet, diff_edges, differential_confusion, extract_network
from .solver import PenaltyParams, solve_jgl
from .sweeps import PRCurve, PRPoint, _check_grid

logger = logging.getLogger(__name__)


@dataclass
class BootstrapResult:
    """Per-pair difference frequencies over B bootstrap replicas."""

    frequencies: dict[tuple[int, int], float]
    n_bootstraps: int
    effective_b: int
    lambda1: float
    node_names: tuple[str, ...]
    n_solver_calls: int = 0

    def __post_init__(self):
        for pair, freq in self.frequencies.items():
            if not 0.0 <= freq <= 1.0:
                raise ValueError(f"frequency {freq} for pair {pair} outside [0, 1]")


def _resample_rows(data: SampleMatrix, rng: np.random.Generator) -> SampleMatrix:
    n = data.n_samples
    rows = rng.integers(0, n, size=n)
    return SampleMatrix(data.values[rows], data.variable_names, data.condition_label)


def bootstrap_differences(
    data: list[SampleMatrix],
    lambda1: float,
    b: int,
    rng: np.random.Generator,
    estimator: str = "kendall_sine",
    rho: float = 1.0,
    tol: float = 1e-5,
    max_iters: int = 500,
) -> BootstrapResult:
    """Difference frequencies over ``b`` independent-learning bootstrap runs.

    Each replica resamples every condition's rows with replacement (keeping
    the per-condition sample counts), re-estimates correlations, solves with
    lambda2 = 0 and records the symmetric difference of the learned supports.
    Replica order does not affect the result; a failed replica is skipped and
    shrinks the effective divisor.
    """
    if b < 1:
        raise ValueError("need at least one bootstrap replica")
    if len(data) != 2:
        raise ValueError("bootstrap differences are defined for exactly 2 conditions")
    names = data[0].variable_names
    if data[1].variable_names != names:
        raise ValueError("conditions must share variable names")

    counts: dict[tuple[int, int], int] = {}
    effective = 0
    n_calls = 0
    params = PenaltyParams(lambda1, 0.0, rho=rho, tol=tol, max_iters=max_iters)
    for replica_rng in rng.spawn(b):
        try:
            resampled = [_resample_rows(d, replica_rng) for d in data]
            corrs = [estimate_correlation(d, estimator) for d in resampled]
            n_calls += 1
            result = solve_jgl(corrs, params)
            nets = [extract_network(t, names) for t in result.thetas]
            difference = diff_edges(nets[0], nets[1])
        except Exception as exc:  # noqa: BLE001 - skip replica, shrink B
            logger.warning("bootstrap replica failed: %s", exc)
            continue
        effective += 1
        for pair in difference.edges:
            counts[pair] = counts.get(pair, 0) + 1
    if effective == 0:
        raise RuntimeError("every bootstrap replica failed")
    if effective < b:
        warnings.warn(
            f"{b - effective} bootstrap replica(s) failed; frequencies use "
            f"B={effective}",
            RuntimeWarning,
        )
    frequencies = {pair: c / effective for pair, c in sorted(counts.items())}
    return BootstrapResult(
        frequencies=frequencies,
        n_bootstraps=b,
        effective_b=effective,
        lambda1=float(lambda1),
        node_names=names,
        n_solver_calls=n_calls,
    )


def differences_at_cutoff(result: BootstrapResult, c: float) -> EdgeSet:
    """Pairs inferred as differences at cutoff ``c``.

    At c = 0 any pair that was a difference in at least one replica counts
    (strictly positive frequency); other cutoffs use frequency >= c.
    """
    if c == 0.0:
        chosen = {pair for pair, f in result.frequencies.items() if f > 0.0}
    else:
        chosen = {pair for pair, f in result.frequencies.items() if f >= c}
    return EdgeSet(result.node_names, frozenset(chosen))


def bootstrap_pr_curve(
    result: BootstrapResult,
    true_diff: EdgeSet,
    c_grid,
) -> PRCurve:
    """Precision/recall of the frequency-thresholded differences per cutoff."""
    grid = _check_grid(c_grid, "c_grid")
    if true_diff.node_names != result.node_names:
        raise ValueError("true differences defined over different node names")
    points = []
    for c in grid:
        inferred = differences_at_cutoff(result, c)
        counts = differential_confusion(true_diff, inferred)
        points.append(PRPoint(c, counts.precision, counts.recall, counts.n_discoveries))
    return PRCurve(
        "cutoff_c",
        points,
        fixed={"lambda1": result.lambda1},
        n_solver_calls=result.n_solver_calls,
    )
