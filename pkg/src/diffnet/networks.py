"""Edge sets, network extraction, and edge/differential confusion counts.

A dependency network is the support of a precision matrix: nodes i and j are
connected iff the off-diagonal entry is nonzero. Differences between two
conditions are the symmetric difference of their supports; a learned
difference counts as correct if the same unordered pair is a true difference,
regardless of which condition carries the edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EdgeSet:
    """Undirected edge list over named nodes; pairs stored as (i, j), i < j."""

    node_names: tuple[str, ...]
    edges: frozenset[tuple[int, int]]

    def __post_init__(self):
        object.__setattr__(self, "node_names", tuple(self.node_names))
        object.__setattr__(
            self, "edges", frozenset((int(i), int(j)) for i, j in self.edges)
        )
        p = len(self.node_names)
        for i, j in self.edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= i < j < p):
                raise ValueError(f"edge ({i}, {j}) out of order or out of range")

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def n_nodes(self) -> int:
        return len(self.node_names)

    @property
    def n_pairs(self) -> int:
        p = len(self.node_names)
        return p * (p - 1) // 2

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def degrees(self) -> dict[int, int]:
        deg = {i: 0 for i in range(self.n_nodes)}
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg


@dataclass(frozen=True)
class ConfusionCounts:
    """Pair classification tallies at edge or differential level."""

    tp: int
    fp: int
    fn: int
    tn: int
    level: str

    def __post_init__(self):
        if self.level not in ("edge", "differential"):
            raise ValueError(f"unknown confusion level '{self.level}'")
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def n_discoveries(self) -> int:
        return self.tp + self.fp

    @property
    def precision(self) -> float:
        """tp / (tp + fp); reported as 1.0 with zero discoveries."""
        return self.tp / self.n_discoveries if self.n_discoveries else 1.0

    @property
    def recall(self) -> float:
        """tp / (tp + fn); vacuously 1.0 when nothing is there to recover."""
        positives = self.tp + self.fn
        return self.tp / positives if positives else 1.0


def _check_same_nodes(a: EdgeSet, b: EdgeSet) -> None:
    if a.node_names != b.node_names:
        raise ValueError("edge sets are defined over different node sets")


def extract_network(theta: np.ndarray, names) -> EdgeSet:
    """Support of a precision matrix with exact zeros encoding non-edges."""
    theta = np.asarray(theta)
    p = theta.shape[0]
    if theta.ndim != 2 or theta.shape != (p, p):
        raise ValueError(f"expected a square matrix, got shape {theta.shape}")
    names = tuple(names)
    if len(names) != p:
        raise ValueError(f"{len(names)} names for a {p}x{p} matrix")
    nonzero = theta != 0.0
    if not np.array_equal(nonzero, nonzero.T):
        raise ValueError("support is not symmetric")
    iu, ju = np.nonzero(np.triu(nonzero, k=1))
    return EdgeSet(names, frozenset(zip(iu.tolist(), ju.tolist())))


def diff_edges(a: EdgeSet, b: EdgeSet) -> EdgeSet:
    """Edges present in exactly one of the two networks."""
    _check_same_nodes(a, b)
    return EdgeSet(a.node_names, a.edges ^ b.edges)


def shared_edges(a: EdgeSet, b: EdgeSet) -> EdgeSet:
    """Edges present in both networks."""
    _check_same_nodes(a, b)
    return EdgeSet(a.node_names, a.edges & b.edges)


def _confusion(truth: EdgeSet, learned: EdgeSet, level: str) -> ConfusionCounts:
    _check_same_nodes(truth, learned)
    tp = len(truth.edges & learned.edges)
    fp = len(learned.edges - truth.edges)
    fn = len(truth.edges - learned.edges)
    tn = truth.n_pairs - tp - fp - fn
    return ConfusionCounts(tp, fp, fn, tn, level)


def edge_confusion(truth: EdgeSet, learned: EdgeSet) -> ConfusionCounts:
    """Classify every node pair against the true network's edges."""
    return _confusion(truth, learned, "edge")


def differential_confusion(true_diff: EdgeSet, learned_diff: EdgeSet) -> ConfusionCounts:
    """Classify every node pair against the true set of differences."""
    return _confusion(true_diff, learned_diff, "differential")
