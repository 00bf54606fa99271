"""File formats: delimited exports, graph documents, grid artifacts, manifests.

Everything is written atomically (temp file + rename) with '.'-decimal float
repr formatting, so identical runs produce byte-identical files and every
value round-trips exactly through its reader.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .networks import EdgeSet
from .sweeps import PRCurve, PRPoint


def fmt(value) -> str:
    """Shortest exact decimal form: round-trips through float()."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, payload) -> None:
    atomic_write_text(path, json.dumps(payload, indent=1, sort_keys=True) + "\n")


def read_json(path: str):
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def config_hash(canonical: dict) -> str:
    blob = json.dumps(canonical, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


# ---------------------------------------------------------------------------
# PR curves


def write_pr_csv(path: str, curve: PRCurve) -> None:
    lines = ["swept_param,value,precision,recall,n_discoveries"]
    for pt in curve.points:
        lines.append(
            f"{curve.swept_param},{fmt(pt.param_value)},{fmt(pt.precision)},"
            f"{fmt(pt.recall)},{fmt(pt.n_discoveries)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_pr_csv(path: str) -> PRCurve:
    with open(path, encoding="utf-8") as handle:
        rows = [line.strip() for line in handle if line.strip()]
    if rows[0] != "swept_param,value,precision,recall,n_discoveries":
        raise ValueError(f"{path}: unexpected header '{rows[0]}'")
    points, swept = [], None
    for row in rows[1:]:
        name, value, precision, recall, n_disc = row.split(",")
        swept = name
        points.append(
            PRPoint(float(value), float(precision), float(recall), int(float(n_disc)))
        )
    return PRCurve(swept or "lambda2", points)


def write_mean_pr_csv(path: str, swept_param: str, rows) -> None:
    """Seed-averaged curve; n_discoveries becomes a float mean."""
    lines = ["swept_param,value,precision,recall,n_discoveries"]
    for value, precision, recall, n_disc in rows:
        lines.append(
            f"{swept_param},{fmt(value)},{fmt(precision)},{fmt(recall)},{fmt(n_disc)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Edge lists and graph documents


def write_edge_list(path: str, edges: EdgeSet, weights=None, tag: str = "") -> None:
    """One edge per line: nodeA<TAB>nodeB<TAB>weight<TAB>condition_tag."""
    lines = []
    names = edges.node_names
    for i, j in edges.sorted_edges():
        weight = 0.0 if weights is None else weights.get((i, j), 0.0)
        lines.append(f"{names[i]}\t{names[j]}\t{fmt(weight)}\t{tag}")
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_edge_list(path: str, node_names) -> EdgeSet:
    names = tuple(node_names)
    index = {name: k for k, name in enumerate(names)}
    pairs = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            a, b = index[parts[0]], index[parts[1]]
            pairs.add((min(a, b), max(a, b)))
    return EdgeSet(names, frozenset(pairs))


def write_graph_json(path: str, edges: EdgeSet, weights=None, tag: str = "",
                     attributes: dict | None = None) -> None:
    names = edges.node_names
    degrees = edges.degrees()
    payload = {
        "nodes": [
            {"id": names[i], "degree": degrees[i]} for i in range(len(names))
        ],
        "edges": [
            {
                "source": names[i],
                "target": names[j],
                "weight": 0.0 if weights is None else weights.get((i, j), 0.0),
                "condition": tag,
            }
            for i, j in edges.sorted_edges()
        ],
        "attributes": attributes or {},
    }
    write_json(path, payload)


def read_graph_json(path: str) -> EdgeSet:
    payload = read_json(path)
    names = tuple(node["id"] for node in payload["nodes"])
    index = {name: k for k, name in enumerate(names)}
    pairs = set()
    for edge in payload["edges"]:
        a, b = index[edge["source"]], index[edge["target"]]
        pairs.add((min(a, b), max(a, b)))
    return EdgeSet(names, frozenset(pairs))


# ---------------------------------------------------------------------------
# Bootstrap frequencies, FDR rows, solver traces


def write_bootstrap_csv(path: str, result) -> None:
    lines = ["node_i,node_j,frequency"]
    names = result.node_names
    for (i, j), freq in sorted(result.frequencies.items()):
        lines.append(f"{names[i]},{names[j]},{fmt(freq)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_bootstrap_csv(path: str, node_names) -> dict[tuple[int, int], float]:
    index = {name: k for k, name in enumerate(node_names)}
    frequencies = {}
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        if header != "node_i,node_j,frequency":
            raise ValueError(f"{path}: unexpected header '{header}'")
        for line in handle:
            line = line.strip()
            if not line:
                continue
            a, b, freq = line.split(",")
            i, j = index[a], index[b]
            frequencies[(min(i, j), max(i, j))] = float(freq)
    return frequencies


def write_fdr_csv(path: str, estimates) -> None:
    lines = ["lambda1,lambda2,fdr_hat,n_discoveries"]
    for est in estimates:
        lines.append(
            f"{fmt(est.lambda1)},{fmt(est.lambda2)},{fmt(est.fdr_hat)},"
            f"{fmt(est.real_discovery_count)}"
        )
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_fdr_csv(path: str) -> list[tuple[float, float, float, int]]:
    rows = []
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().strip()
        if header != "lambda1,lambda2,fdr_hat,n_discoveries":
            raise ValueError(f"{path}: unexpected header '{header}'")
        for line in handle:
            line = line.strip()
            if not line:
                continue
            l1, l2, fdr_hat, n = line.split(",")
            rows.append((float(l1), float(l2), float(fdr_hat), int(float(n))))
    return rows


def write_trace_csv(path: str, trace) -> None:
    lines = ["iter,objective,primal,dual"]
    for it, (obj, pri, dua) in enumerate(
        zip(trace.objective, trace.primal, trace.dual), start=1
    ):
        lines.append(f"{it},{fmt(obj)},{fmt(pri)},{fmt(dua)}")
    atomic_write_text(path, "\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Grid artifact


@dataclass
class GridCell:
    lambda1: float
    lambda2: float
    networks: dict[str, list[tuple[int, int, float]]]
    differences: list[dict]
    n_discoveries: int
    fdr_hat: float | None = None


@dataclass
class GridArtifact:
    """Precomputed networks and differences over a lambda1 x lambda2 grid."""

    config_hash: str
    node_names: tuple[str, ...]
    condition_labels: list[str]
    lambda1_grid: list[float]
    lambda2_grid: list[float]
    cells: list[GridCell] = field(default_factory=list)

    def __post_init__(self):
        self.node_names = tuple(self.node_names)

    def validate(self) -> None:
        expected = len(self.lambda1_grid) * len(self.lambda2_grid)
        if len(self.cells) != expected:
            raise ValueError(
                f"grid artifact has {len(self.cells)} cells, expected {expected}"
            )

    def _snap(self, grid: list[float], value: float, name: str) -> float:
        if value < grid[0] - 1e-9 or value > grid[-1] + 1e-9:
            raise KeyError(
                f"{name}={value} outside the precomputed range "
                f"[{grid[0]}, {grid[-1]}]"
            )
        return min(grid, key=lambda g: (abs(g - value), g))

    def cell_at(self, lambda1: float, lambda2: float) -> GridCell:
        """Nearest precomputed cell; KeyError outside the grid's range."""
        l1 = self._snap(self.lambda1_grid, lambda1, "lambda1")
        l2 = self._snap(self.lambda2_grid, lambda2, "lambda2")
        for cell in self.cells:
            if cell.lambda1 == l1 and cell.lambda2 == l2:
                return cell
        raise KeyError(f"missing cell ({l1}, {l2})")

    def curve_rows(self, lambda1: float) -> list[dict]:
        l1 = self._snap(self.lambda1_grid, lambda1, "lambda1")
        rows = []
        for lam2 in self.lambda2_grid:
            cell = self.cell_at(l1, lam2)
            rows.append(
                {
                    "lambda2": lam2,
                    "n_discoveries": cell.n_discoveries,
                    "fdr_hat": cell.fdr_hat,
                }
            )
        return rows

    def meta(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "variable_names": list(self.node_names),
            "condition_labels": list(self.condition_labels),
            "lambda1_grid": self.lambda1_grid,
            "lambda2_grid": self.lambda2_grid,
            "n_cells": len(self.cells),
        }

    def to_payload(self) -> dict:
        return {
            "format": "diffnet-grid/1",
            "config_hash": self.config_hash,
            "node_names": list(self.node_names),
            "condition_labels": list(self.condition_labels),
            "lambda1_grid": self.lambda1_grid,
            "lambda2_grid": self.lambda2_grid,
            "cells": [
                {
                    "lambda1": cell.lambda1,
                    "lambda2": cell.lambda2,
                    "networks": {
                        label: [[i, j, w] for i, j, w in pairs]
                        for label, pairs in cell.networks.items()
                    },
                    "differences": cell.differences,
                    "n_discoveries": cell.n_discoveries,
                    "fdr_hat": cell.fdr_hat,
                }
                for cell in self.cells
            ],
        }

    def save(self, path: str) -> None:
        self.validate()
        write_json(path, self.to_payload())

    @classmethod
    def load(cls, path: str) -> "GridArtifact":
        payload = read_json(path)
        if payload.get("format") != "diffnet-grid/1":
            raise ValueError(f"{path}: not a grid artifact")
        cells = [
            GridCell(
                lambda1=raw["lambda1"],
                lambda2=raw["lambda2"],
                networks={
                    label: [(int(i), int(j), float(w)) for i, j, w in pairs]
                    for label, pairs in raw["networks"].items()
                },
                differences=[
                    {
                        "conditions": list(d["conditions"]),
                        "edges": [[int(i), int(j)] for i, j in d["edges"]],
                    }
                    for d in raw["differences"]
                ],
                n_discoveries=int(raw["n_discoveries"]),
                fdr_hat=raw["fdr_hat"],
            )
            for raw in payload["cells"]
        ]
        artifact = cls(
            config_hash=payload["config_hash"],
            node_names=tuple(payload["node_names"]),
            condition_labels=list(payload["condition_labels"]),
            lambda1_grid=[float(v) for v in payload["lambda1_grid"]],
            lambda2_grid=[float(v) for v in payload["lambda2_grid"]],
            cells=cells,
        )
        artifact.validate()
        return artifact
