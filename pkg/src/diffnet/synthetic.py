"""Ground-truth network pairs and Gaussian training data for benchmarks.

A base network with m undirected edges over p variables is drawn uniformly;
each further condition re-wires one endpoint of each edge independently with
probability ``p_move``, so conditions share roughly ``1 - p_move`` of their
edges. Precision matrices put standard-normal weights (magnitude floored at
0.1) on edges and make the diagonal dominant, and samples are drawn from the
zero-mean Gaussian whose covariance is the matrix inverse.

All randomness flows through numpy Generators; every operation that needs
randomness receives its own child stream spawned from the scenario seed, so
datasets reproduce bit-for-bit across runs and platforms.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .correlation import SampleMatrix
from .networks import EdgeSet, diff_edges

WEIGHT_FLOOR = 0.1
DIAGONAL_MARGIN = 0.1


@dataclass(frozen=True)
class SyntheticScenario:
    """Shape of one synthetic benchmark instance."""

    p: int
    m: int
    p_move: float
    K: int = 2
    n_per_condition: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.p < 2:
            raise ValueError("need at least 2 nodes")
        max_edges = self.p * (self.p - 1) // 2
        if not 0 <= self.m <= max_edges:
            raise ValueError(f"edge count {self.m} outside [0, {max_edges}]")
        if not 0.0 <= self.p_move <= 1.0:
            raise ValueError("p_move must be in [0, 1]")
        if self.K < 2:
            raise ValueError("need at least 2 conditions")
        if self.n_per_condition < 2:
            raise ValueError("need at least 2 samples per condition")

    @property
    def node_names(self) -> tuple[str, ...]:
        width = len(str(self.p - 1))
        return tuple(f"v{i:0{width}d}" for i in range(self.p))


@dataclass(frozen=True)
class GroundTruth:
    """True per-condition networks, their precision matrices, and differences."""

    edge_sets: tuple[EdgeSet, ...]
    precisions: tuple[np.ndarray, ...]
    pair_differences: dict[tuple[int, int], EdgeSet] = field(default_factory=dict)

    @property
    def true_differences(self) -> EdgeSet:
        """Symmetric difference of the first two conditions' supports."""
        return self.pair_differences[(0, 1)]


def generate_base_graph(p: int, m: int, rng: np.random.Generator) -> EdgeSet:
    """Sample m distinct undirected edges uniformly, no self-loops."""
    n_pairs = p * (p - 1) // 2
    if m > n_pairs:
        raise ValueError(f"cannot place {m} edges on {p} nodes (max {n_pairs})")
    chosen = rng.choice(n_pairs, size=m, replace=False)
    # Linear index k of pair (i, j), i < j, in row-major upper-triangle order:
    # k = i*p - i*(i+1)/2 + (j - i - 1).
    edges = set()
    for k in np.sort(chosen):
        i = int((2 * p - 1 - np.sqrt((2 * p - 1) ** 2 - 8 * k)) // 2)
        j = int(k - i * p + i * (i + 1) // 2 + i + 1)
        edges.add((i, j))
    assert len(edges) == m
    width = len(str(p - 1))
    names = tuple(f"v{i:0{width}d}" for i in range(p))
    return EdgeSet(names, frozenset(edges))


def rewire(base: EdgeSet, p_move: float, rng: np.random.Generator) -> EdgeSet:
    """Move one endpoint of each edge with probability ``p_move``.

    The moved endpoint is chosen uniformly between the two; its replacement
    is drawn uniformly from the nodes that create neither a self-loop nor a
    duplicate of a currently existing edge. If no replacement node exists
    (near-complete graphs) the edge is kept unchanged with a warning. Edge
    count is preserved exactly.
    """
    if not 0.0 <= p_move <= 1.0:
        raise ValueError("p_move must be in [0, 1]")
    p = len(base.node_names)
    current = set(base.edges)
    blocked = 0
    for edge in sorted(base.edges):
        if rng.random() >= p_move:
            continue
        keep_idx = int(rng.integers(2))
        anchor, moved = edge[keep_idx], edge[1 - keep_idx]
        neighbors = {a if b == anchor else b
                     for a, b in current if anchor in (a, b)}
        candidates = np.array(
            [c for c in range(p) if c != anchor and c != moved and c not in neighbors],
            dtype=int,
        )
        if candidates.size == 0:
            blocked += 1
            continue
        new_node = int(candidates[rng.integers(candidates.size)])
        current.discard(edge)
        current.add((min(anchor, new_node), max(anchor, new_node)))
    if blocked:
        warnings.warn(
            f"{blocked} edge(s) could not be re-wired (no free endpoint)",
            RuntimeWarning,
        )
    assert len(current) == len(base.edges)
    return EdgeSet(base.node_names, frozenset(current))


def build_precision_matrix(edges: EdgeSet, rng: np.random.Generator) -> np.ndarray:
    """Edge-weighted precision matrix, made PD by diagonal dominance.

    Each edge gets a standard-normal weight redrawn until its magnitude
    reaches 0.1 (near-zero weights would make the support unrecoverable);
    non-edges are exactly zero. Row diagonals are set to the absolute row
    sum plus 0.1, so every eigenvalue is at least 0.1 by Gershgorin.
    """
    p = len(edges.node_names)
    theta = np.zeros((p, p))
    for i, j in sorted(edges.edges):
        w = float(rng.standard_normal())
        while abs(w) < WEIGHT_FLOOR:
            w = float(rng.standard_normal())
        theta[i, j] = w
        theta[j, i] = w
    diag = np.abs(theta).sum(axis=1) + DIAGONAL_MARGIN
    theta[np.diag_indices(p)] = diag
    return (theta + theta.T) / 2.0


def sample_gaussian(
    precision: np.ndarray,
    n: int,
    rng: np.random.Generator,
    variable_names=None,
    condition_label: str = "synthetic",
) -> SampleMatrix:
    """Draw n rows from the zero-mean Gaussian with covariance precision^-1."""
    precision = np.asarray(precision, dtype=float)
    p = precision.shape[0]
    try:
        chol = np.linalg.cholesky(precision)
    except np.linalg.LinAlgError as exc:
        raise ValueError("precision matrix is not positive definite") from exc
    z = rng.standard_normal((n, p))
    # x = L^-T z has covariance (L L^T)^-1 = precision^-1.
    x = np.linalg.solve(chol.T, z.T).T
    if variable_names is None:
        width = len(str(p - 1))
        variable_names = tuple(f"v{i:0{width}d}" for i in range(p))
    return SampleMatrix(x, variable_names, condition_label)


def generate_ground_truth(scenario: SyntheticScenario) -> GroundTruth:
    """Base network plus K-1 re-wired variants with their precision matrices."""
    root = np.random.SeedSequence(scenario.seed)
    graph_seq, weight_seq = root.spawn(2)
    graph_streams = graph_seq.spawn(scenario.K)
    weight_streams = weight_seq.spawn(scenario.K)

    base = generate_base_graph(
        scenario.p, scenario.m, np.random.default_rng(graph_streams[0])
    )
    edge_sets = [base]
    for k in range(1, scenario.K):
        edge_sets.append(
            rewire(base, scenario.p_move, np.random.default_rng(graph_streams[k]))
        )
    precisions = tuple(
        build_precision_matrix(es, np.random.default_rng(ws))
        for es, ws in zip(edge_sets, weight_streams)
    )
    pair_differences = {
        (a, b): diff_edges(edge_sets[a], edge_sets[b])
        for a in range(scenario.K)
        for b in range(a + 1, scenario.K)
    }
    return GroundTruth(tuple(edge_sets), precisions, pair_differences)


def generate_dataset(
    scenario: SyntheticScenario,
) -> tuple[GroundTruth, list[SampleMatrix]]:
    """Ground truth plus one sample matrix per condition."""
    truth = generate_ground_truth(scenario)
    root = np.random.SeedSequence(scenario.seed)
    # Streams 0 and 1 feed the graph/weight draws in generate_ground_truth.
    _, _, sample_seq = root.spawn(3)
    sample_streams = sample_seq.spawn(scenario.K)
    names = scenario.node_names
    samples = [
        sample_gaussian(
            truth.precisions[k],
            scenario.n_per_condition,
            np.random.default_rng(sample_streams[k]),
            variable_names=names,
            condition_label=f"cond{k}",
        )
        for k in range(scenario.K)
    ]
    return truth, samples
