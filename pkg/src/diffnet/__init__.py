"""Differential dependency-network analysis with a tunable similarity bias.

Learn sparse precision matrices jointly across conditions, extract
high-confidence differences between the resulting networks, and quantify the
differential precision-recall tradeoff against bootstrap and permutation-FDR
baselines.
"""

from .correlation import (
    CorrelationMatrix,
    SampleMatrix,
    ensure_psd,
    estimate_correlation,
    kendall_tau,
    kendall_tau_matrix,
)
from .networks import (
    ConfusionCounts,
    EdgeSet,
    diff_edges,
    differential_confusion,
    edge_confusion,
    extract_network,
    shared_edges,
)
from .solver import (
    PenaltyParams,
    PrecisionMatrixSet,
    SolverError,
    SolverTrace,
    objective_value,
    prox_group_lasso,
    soft_threshold,
    solve_jgl,
)
from .sweeps import PRCurve, PRPoint, sweep_lambda1, sweep_lambda2
from .synthetic import (
    GroundTruth,
    SyntheticScenario,
    build_precision_matrix,
    generate_base_graph,
    generate_dataset,
    generate_ground_truth,
    rewire,
    sample_gaussian,
)
from .bootstrap import (
    BootstrapResult,
    bootstrap_differences,
    bootstrap_pr_curve,
    differences_at_cutoff,
)
from .fdr import FdrEstimate, PooledSplitter, estimate_fdr, fdr_curve

__version__ = "0.1.0"

__all__ = [
    "BootstrapResult",
    "ConfusionCounts",
    "CorrelationMatrix",
    "EdgeSet",
    "FdrEstimate",
    "GroundTruth",
    "PRCurve",
    "PRPoint",
    "PenaltyParams",
    "PooledSplitter",
    "PrecisionMatrixSet",
    "SampleMatrix",
    "SolverError",
    "SolverTrace",
    "SyntheticScenario",
    "bootstrap_differences",
    "bootstrap_pr_curve",
    "build_precision_matrix",
    "diff_edges",
    "differences_at_cutoff",
    "differential_confusion",
    "edge_confusion",
    "ensure_psd",
    "estimate_correlation",
    "estimate_fdr",
    "extract_network",
    "fdr_curve",
    "generate_base_graph",
    "generate_dataset",
    "generate_ground_truth",
    "kendall_tau",
    "kendall_tau_matrix",
    "objective_value",
    "prox_group_lasso",
    "rewire",
    "sample_gaussian",
    "shared_edges",
    "soft_threshold",
    "solve_jgl",
    "sweep_lambda1",
    "sweep_lambda2",
]
