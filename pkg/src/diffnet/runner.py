"""Experiment orchestration: one entry point per CLI mode.

Every mode reads its inputs, drives the library, and writes artifacts into
the configured output directory: delimited data files, rendered figures, and
a manifest tying the outputs to the exact configuration, seeds, and package
versions. Reruns with the same configuration produce byte-identical data
artifacts; wall-clock information is confined to the manifest's timing field.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__, artifacts, plots
from .bootstrap import bootstrap_differences, bootstrap_pr_curve
from .config import ExperimentConfig
from .correlation import estimate_correlation
from .fdr import PooledSplitter
from .ingest import load_conditions, write_csv
from .networks import diff_edges, extract_network
from .solver import PenaltyParams, solve_jgl
from .sweeps import sweep_lambda2

logger = logging.getLogger(__name__)


def _penalty(config: ExperimentConfig, lambda1: float, lambda2: float) -> PenaltyParams:
    return PenaltyParams(
        lambda1,
        lambda2,
        rho=config.solver.rho,
        tol=config.solver.tol,
        max_iters=config.solver.max_iters,
    )


def _load_data(config: ExperimentConfig, seed: int):
    """Returns (truth-or-None, samples) for one seed."""
    if config.inputs:
        return None, load_conditions(config.inputs)
    from .synthetic import generate_dataset

    scenario = dataclasses.replace(config.scenario, seed=seed)
    return generate_dataset(scenario)


def _weights(config: ExperimentConfig, samples):
    if not config.weight_by_samples:
        return None
    return [float(s.n_samples) for s in samples]


def write_manifest(config: ExperimentConfig, started: float) -> None:
    manifest = {
        "config": config.canonical(),
        "config_hash": config.hash(),
        "versions": {
            "diffnet": __version__,
            "python": sys.version.split()[0],
            "numpy": np.__version__,
        },
        "timing": {
            "started_utc": datetime.fromtimestamp(started, tz=timezone.utc).isoformat(),
            "runtime_seconds": round(time.time() - started, 3),
        },
    }
    artifacts.write_json(os.path.join(config.out, "manifest.json"), manifest)


def run_synth_sweep(config: ExperimentConfig) -> None:
    """Per-seed lambda2 sweeps for every lambda1, plus seed-averaged curves."""
    if config.scenario is None:
        raise ValueError("synth_sweep needs a synthetic scenario")
    per_lambda1: dict[float, list] = {l1: [] for l1 in config.lambda1_grid}
    for seed in config.seeds:
        truth, samples = _load_data(config, seed)
        corrs = [estimate_correlation(s, config.estimator) for s in samples]
        for lam1 in config.lambda1_grid:
            curve = sweep_lambda2(
                corrs,
                lam1,
                config.lambda2_grid,
                truth.true_differences,
                rho=config.solver.rho,
                tol=config.solver.tol,
                max_iters=config.solver.max_iters,
            )
            per_lambda1[lam1].append(curve)
            artifacts.write_pr_csv(
                os.path.join(
                    config.out, f"pr_seed{seed}_lambda1_{artifacts.fmt(lam1)}.csv"
                ),
                curve,
            )
    mean_rows_by_l1 = []
    for lam1, curves in per_lambda1.items():
        rows = []
        for idx, lam2 in enumerate(config.lambda2_grid):
            precisions = [c.points[idx].precision for c in curves]
            recalls = [c.points[idx].recall for c in curves]
            counts = [c.points[idx].n_discoveries for c in curves]
            rows.append(
                (
                    lam2,
                    float(np.mean(precisions)),
                    float(np.mean(recalls)),
                    float(np.mean(counts)),
                )
            )
        artifacts.write_mean_pr_csv(
            os.path.join(config.out, f"pr_mean_lambda1_{artifacts.fmt(lam1)}.csv"),
            "lambda2",
            rows,
        )
        mean_rows_by_l1.append((f"lambda1={artifacts.fmt(lam1)}", rows))
    plots.save_pr_curves(
        [(label, [(r[0], r[1], r[2], r[3]) for r in rows]) for label, rows in mean_rows_by_l1],
        os.path.join(config.out, "pr_curves.png"),
    )


def run_fit(config: ExperimentConfig) -> None:
    """Single solve; exports networks, differences, trace, and figures."""
    if len(config.lambda1_grid) != 1 or len(config.lambda2_grid) != 1:
        raise ValueError("fit mode expects a single lambda1 and a single lambda2")
    lam1, lam2 = config.lambda1_grid[0], config.lambda2_grid[0]
    truth, samples = _load_data(config, config.seeds[0])
    labels = [s.condition_label for s in samples]
    names = samples[0].variable_names
    corrs = [estimate_correlation(s, config.estimator) for s in samples]
    result = solve_jgl(
        corrs,
        _penalty(config, lam1, lam2),
        weights=_weights(config, samples),
        collect_trace=True,
    )
    if not result.converged:
        logger.warning("fit did not converge; writing best iterate")

    nets = []
    for label, theta in zip(labels, result.thetas):
        net = extract_network(theta, names)
        nets.append(net)
        weights = {(i, j): float(theta[i, j]) for i, j in net.edges}
        artifacts.write_edge_list(
            os.path.join(config.out, f"network_{label}.tsv"), net, weights, label
        )
        artifacts.write_graph_json(
            os.path.join(config.out, f"network_{label}.json"),
            net,
            weights,
            label,
            attributes={"lambda1": lam1, "lambda2": lam2, "condition": label},
        )
    diff_mask = np.zeros((len(names), len(names)), dtype=bool)
    for a in range(len(nets)):
        for b in range(a + 1, len(nets)):
            difference = diff_edges(nets[a], nets[b])
            for i, j in difference.edges:
                diff_mask[i, j] = diff_mask[j, i] = True
            tag = f"{labels[a]}_vs_{labels[b]}"
            weights = {}
            holders = {}
            for i, j in difference.edges:
                holder = a if (i, j) in nets[a].edges else b
                weights[(i, j)] = float(result.thetas[holder][i, j])
                holders[(i, j)] = labels[holder]
            artifacts.write_edge_list(
                os.path.join(config.out, f"diff_{tag}.tsv"), difference, weights, tag
            )
            artifacts.write_graph_json(
                os.path.join(config.out, f"diff_{tag}.json"),
                difference,
                weights,
                tag,
                attributes={
                    "lambda1": lam1,
                    "lambda2": lam2,
                    "edge_holders": {f"{i},{j}": h for (i, j), h in sorted(holders.items())},
                },
            )
    if truth is not None:
        artifacts.write_edge_list(
            os.path.join(config.out, "true_differences.tsv"),
            truth.true_differences,
            None,
            "truth",
        )
    artifacts.write_trace_csv(os.path.join(config.out, "trace.csv"), result.trace)
    plots.save_trace(result.trace, os.path.join(config.out, "trace.png"))
    plots.save_support_panels(
        result.thetas, labels, diff_mask, os.path.join(config.out, "supports.png")
    )


def run_bootstrap(config: ExperimentConfig) -> None:
    """Bootstrap difference frequencies; PR curve when ground truth exists."""
    if len(config.lambda1_grid) != 1:
        raise ValueError("bootstrap mode expects a single lambda1")
    lam1 = config.lambda1_grid[0]
    seed = config.seeds[0]
    truth, samples = _load_data(config, seed)
    rng = np.random.default_rng([seed, 101])
    result = bootstrap_differences(
        samples,
        lam1,
        config.bootstrap_b,
        rng,
        estimator=config.estimator,
        rho=config.solver.rho,
        tol=config.solver.tol,
        max_iters=config.solver.max_iters,
    )
    artifacts.write_bootstrap_csv(
        os.path.join(config.out, "bootstrap_frequencies.csv"), result
    )
    if truth is None:
        return
    curve = bootstrap_pr_curve(result, truth.true_differences, config.cutoff_grid)
    artifacts.write_pr_csv(os.path.join(config.out, "bootstrap_pr.csv"), curve)
    corrs = [estimate_correlation(s, config.estimator) for s in samples]
    transfer = sweep_lambda2(
        corrs,
        lam1,
        config.lambda2_grid,
        truth.true_differences,
        rho=config.solver.rho,
        tol=config.solver.tol,
        max_iters=config.solver.max_iters,
    )
    artifacts.write_pr_csv(os.path.join(config.out, "transfer_pr.csv"), transfer)
    plots.save_pr_curves(
        [
            ("bootstrap cutoff sweep",
             [(p.param_value, p.precision, p.recall, p.n_discoveries) for p in curve.points]),
            ("similarity-bias sweep",
             [(p.param_value, p.precision, p.recall, p.n_discoveries) for p in transfer.points]),
        ],
        os.path.join(config.out, "bootstrap_vs_transfer.png"),
    )
    artifacts.write_json(
        os.path.join(config.out, "computation.json"),
        {
            "bootstrap_solver_calls": result.n_solver_calls,
            "transfer_solver_calls": transfer.n_solver_calls,
        },
    )


def run_fdr(config: ExperimentConfig) -> None:
    """Permutation-split FDR across the lambda grid; CSV plus tradeoff plot."""
    seed = config.seeds[0]
    truth, samples = _load_data(config, seed)
    all_estimates = []
    labeled_rows = []
    base_rng = np.random.default_rng([seed, 202])
    for lam1, lam1_rng in zip(config.lambda1_grid, base_rng.spawn(len(config.lambda1_grid))):
        splitter = PooledSplitter(samples, config.fdr_splits, lam1_rng, config.estimator)
        estimates = [
            splitter.estimate(_penalty(config, lam1, lam2))
            for lam2 in config.lambda2_grid
        ]
        all_estimates.extend(estimates)
        labeled_rows.append(
            (
                f"lambda1={artifacts.fmt(lam1)}",
                [(e.lambda2, e.fdr_hat, e.real_discovery_count) for e in estimates],
            )
        )
    artifacts.write_fdr_csv(os.path.join(config.out, "fdr_curve.csv"), all_estimates)
    plots.save_fdr_tradeoff(labeled_rows, os.path.join(config.out, "fdr_tradeoff.png"))


def run_grid(config: ExperimentConfig) -> None:
    """Precompute every (lambda1, lambda2) cell for the interactive explorer."""
    seed = config.seeds[0]
    truth, samples = _load_data(config, seed)
    labels = [s.condition_label for s in samples]
    names = samples[0].variable_names
    corrs = [estimate_correlation(s, config.estimator) for s in samples]
    weights = _weights(config, samples)
    splitter = None
    if config.grid_fdr_splits > 0:
        splitter = PooledSplitter(
            samples,
            config.grid_fdr_splits,
            np.random.default_rng([seed, 303]),
            config.estimator,
        )
    cells = []
    for lam1 in config.lambda1_grid:
        for lam2 in config.lambda2_grid:
            params = _penalty(config, lam1, lam2)
            result = solve_jgl(corrs, params, weights=weights)
            nets = [extract_network(t, names) for t in result.thetas]
            networks = {}
            for label, net, theta in zip(labels, nets, result.thetas):
                networks[label] = [
                    (i, j, float(theta[i, j])) for i, j in net.sorted_edges()
                ]
            differences = []
            n_disc = 0
            for a in range(len(nets)):
                for b in range(a + 1, len(nets)):
                    difference = diff_edges(nets[a], nets[b])
                    n_disc += len(difference)
                    differences.append(
                        {
                            "conditions": [labels[a], labels[b]],
                            "edges": [[i, j] for i, j in difference.sorted_edges()],
                        }
                    )
            fdr_hat = splitter.estimate(params).fdr_hat if splitter else None
            cells.append(
                artifacts.GridCell(
                    lambda1=lam1,
                    lambda2=lam2,
                    networks=networks,
                    differences=differences,
                    n_discoveries=n_disc,
                    fdr_hat=fdr_hat,
                )
            )
    artifact = artifacts.GridArtifact(
        config_hash=config.hash(),
        node_names=names,
        condition_labels=labels,
        lambda1_grid=list(config.lambda1_grid),
        lambda2_grid=list(config.lambda2_grid),
        cells=cells,
    )
    artifact.save(os.path.join(config.out, "grid.json"))
    if truth is not None:
        artifacts.write_edge_list(
            os.path.join(config.out, "true_differences.tsv"),
            truth.true_differences,
            None,
            "truth",
        )


def export_scenario_csvs(config: ExperimentConfig) -> None:
    """Write the synthetic samples so external tools can ingest them."""
    truth, samples = _load_data(config, config.seeds[0])
    for sample in samples:
        write_csv(
            os.path.join(config.out, f"samples_{sample.condition_label}.csv"), sample
        )


_MODE_RUNNERS = {
    "synth_sweep": run_synth_sweep,
    "fit": run_fit,
    "bootstrap": run_bootstrap,
    "fdr": run_fdr,
    "grid": run_grid,
}


def run_experiment(config: ExperimentConfig) -> int:
    """Dispatch one mode; returns a process exit status.

    Failures produce a structured error report (error.json in the output
    directory when writable) and a non-zero status instead of a traceback.
    """
    config.validate()
    if config.mode == "serve":
        raise ValueError("serve mode is handled by the CLI, not run_experiment")
    started = time.time()
    os.makedirs(config.out, exist_ok=True)
    try:
        _MODE_RUNNERS[config.mode](config)
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit nonzero
        logger.error("%s run failed: %s", config.mode, exc)
        report = {"mode": config.mode, "error": type(exc).__name__, "message": str(exc)}
        try:
            artifacts.write_json(os.path.join(config.out, "error.json"), report)
        except OSError:
            pass
        return 1
    write_manifest(config, started)
    return 0
