"""Experiment configuration: YAML file plus CLI overrides.

One structured file drives every mode; any value can be overridden from the
command line. The canonical form (sorted keys, resolved defaults) is hashed
into every artifact so outputs are traceable to the exact configuration that
produced them.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict

import yaml

from .artifacts import config_hash
from .synthetic import SyntheticScenario

MODES = ("synth_sweep", "fit", "bootstrap", "fdr", "grid", "serve")

DEFAULT_LAMBDA1_GRID = [0.2, 0.4, 0.6]
DEFAULT_LAMBDA2_GRID = [round(0.1 * i, 1) for i in range(11)]
DEFAULT_CUTOFF_GRID = [round(0.1 * i, 1) for i in range(11)]


@dataclass
class SolverOptions:
    rho: float = 1.0
    tol: float = 1e-5
    max_iters: int = 500

    def validate(self) -> None:
        if self.rho <= 0 or self.tol <= 0 or self.max_iters < 1:
            raise ValueError("solver options out of range")


@dataclass
class ExperimentConfig:
    mode: str
    out: str = "runs/out"
    seeds: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5])
    estimator: str = "kendall_sine"
    scenario: SyntheticScenario | None = None
    inputs: list[tuple[str, str]] = field(default_factory=list)
    lambda1_grid: list[float] = field(default_factory=lambda: list(DEFAULT_LAMBDA1_GRID))
    lambda2_grid: list[float] = field(default_factory=lambda: list(DEFAULT_LAMBDA2_GRID))
    solver: SolverOptions = field(default_factory=SolverOptions)
    weight_by_samples: bool = False
    bootstrap_b: int = 100
    cutoff_grid: list[float] = field(default_factory=lambda: list(DEFAULT_CUTOFF_GRID))
    fdr_splits: int = 20
    grid_fdr_splits: int = 0
    bind: str = "127.0.0.1:8787"
    artifact: str | None = None
    ui_dir: str | None = None

    def validate(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode '{self.mode}' (choose from {MODES})")
        if self.estimator not in ("kendall_sine", "pearson"):
            raise ValueError(f"unknown estimator '{self.estimator}'")
        for name, grid, hi in (
            ("lambda1_grid", self.lambda1_grid, None),
            ("lambda2_grid", self.lambda2_grid, 1.0),
            ("cutoff_grid", self.cutoff_grid, 1.0),
        ):
            if not grid:
                raise ValueError(f"{name} must not be empty")
            if any(b <= a for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be strictly ascending")
            if grid[0] < 0 or (hi is not None and grid[-1] > hi):
                raise ValueError(f"{name} values out of range")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if self.bootstrap_b < 1:
            raise ValueError("bootstrap_b must be >= 1")
        if self.fdr_splits < 1:
            raise ValueError("fdr_splits must be >= 1")
        if self.grid_fdr_splits < 0:
            raise ValueError("grid_fdr_splits must be >= 0")
        self.solver.validate()
        if self.mode == "serve":
            if not self.artifact:
                raise ValueError("serve mode needs a grid artifact path")
        elif self.scenario is None and not self.inputs:
            raise ValueError("provide either a synthetic scenario or input files")
        if self.inputs:
            labels = [label for label, _ in self.inputs]
            if len(set(labels)) != len(labels):
                raise ValueError("condition labels must be unique")

    def canonical(self) -> dict:
        data = asdict(self)
        data["inputs"] = [list(pair) for pair in self.inputs]
        if self.scenario is not None:
            data["scenario"] = asdict(self.scenario)
        return data

    def hash(self) -> str:
        return config_hash(self.canonical())


def _scenario_from_dict(raw: dict) -> SyntheticScenario:
    known = {"p", "m", "p_move", "K", "n_per_condition", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
    return SyntheticScenario(**{k: raw[k] for k in raw})


def _inputs_from_list(raw) -> list[tuple[str, str]]:
    inputs = []
    for entry in raw:
        if isinstance(entry, dict):
            inputs.append((str(entry["label"]), str(entry["path"])))
        else:
            label, _, path = str(entry).partition("=")
            if not path:
                raise ValueError(
                    f"input '{entry}' must be 'label=path' or a label/path mapping"
                )
            inputs.append((label, path))
    return inputs


def load_config(path: str | None, mode: str, overrides: dict) -> ExperimentConfig:
    """Build the configuration: file values first, CLI overrides on top."""
    raw: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as handle:
            raw = yaml.safe_load(handle) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: expected a mapping at the top level")

    config = ExperimentConfig(mode=mode)
    if "out" in raw:
        config.out = str(raw["out"])
    if "seeds" in raw:
        config.seeds = [int(s) for s in raw["seeds"]]
    if "seed" in raw:
        config.seeds = [int(raw["seed"])]
    if "estimator" in raw:
        config.estimator = str(raw["estimator"])
    if "scenario" in raw and raw["scenario"]:
        config.scenario = _scenario_from_dict(dict(raw["scenario"]))
    if "inputs" in raw and raw["inputs"]:
        config.inputs = _inputs_from_list(raw["inputs"])
    if "lambda1_grid" in raw:
        config.lambda1_grid = [float(v) for v in raw["lambda1_grid"]]
    if "lambda2_grid" in raw:
        config.lambda2_grid = [float(v) for v in raw["lambda2_grid"]]
    if "solver" in raw and raw["solver"]:
        solver_raw = dict(raw["solver"])
        config.solver = SolverOptions(
            rho=float(solver_raw.get("rho", 1.0)),
            tol=float(solver_raw.get("tol", 1e-5)),
            max_iters=int(solver_raw.get("max_iters", 500)),
        )
    if "weight_by_samples" in raw:
        config.weight_by_samples = bool(raw["weight_by_samples"])
    if "bootstrap" in raw and raw["bootstrap"]:
        boot = dict(raw["bootstrap"])
        config.bootstrap_b = int(boot.get("b", config.bootstrap_b))
        if "cutoff_grid" in boot:
            config.cutoff_grid = [float(v) for v in boot["cutoff_grid"]]
    if "fdr" in raw and raw["fdr"]:
        config.fdr_splits = int(dict(raw["fdr"]).get("n_splits", config.fdr_splits))
    if "grid" in raw and raw["grid"]:
        config.grid_fdr_splits = int(
            dict(raw["grid"]).get("fdr_splits", config.grid_fdr_splits)
        )
    if "serve" in raw and raw["serve"]:
        serve_raw = dict(raw["serve"])
        config.bind = str(serve_raw.get("bind", config.bind))
        config.artifact = serve_raw.get("artifact", config.artifact)
        config.ui_dir = serve_raw.get("ui", config.ui_dir)

    for key, value in overrides.items():
        if value is None:
            continue
        if key == "seed":
            config.seeds = [int(value)]
        elif key == "lambda1":
            config.lambda1_grid = value
        elif key == "lambda2":
            config.lambda2_grid = value
        elif key == "inputs":
            config.inputs = _inputs_from_list(value)
        elif key == "scenario":
            config.scenario = value
        else:
            setattr(config, key, value)

    config.validate()
    return config
