"""Command-line interface: subcommands mirror the experiment modes."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import load_config
from .runner import run_experiment

LOG_ENV_VAR = "DIFFNET_LOG"


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--seed", type=int, help="single seed replacing the seed list")
    parser.add_argument("--out", help="output directory")
    parser.add_argument(
        "--lambda1", type=_parse_floats, help="comma-separated lambda1 value(s)"
    )
    parser.add_argument(
        "--lambda2", type=_parse_floats, help="comma-separated lambda2 value(s)"
    )
    parser.add_argument(
        "--estimator", choices=("kendall_sine", "pearson"), help="correlation estimator"
    )
    parser.add_argument(
        "--input",
        action="append",
        dest="inputs",
        metavar="LABEL=PATH",
        help="condition CSV (repeat once per condition)",
    )
    parser.add_argument(
        "--p", type=int, help="synthetic scenario: number of variables"
    )
    parser.add_argument("--m", type=int, help="synthetic scenario: number of edges")
    parser.add_argument(
        "--p-move", type=float, help="synthetic scenario: rewiring probability"
    )
    parser.add_argument(
        "--n-per-condition", type=int, help="synthetic scenario: samples per condition"
    )
    parser.add_argument(
        "--conditions", type=int, help="synthetic scenario: number of conditions"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="diffnet",
        description=(
            "Differential dependency-network analysis: learn networks jointly "
            "across conditions and tune the similarity bias to trade "
            "differential precision against recall."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser(
        "synth-sweep", help="synthetic benchmark sweeps averaged over seeds"
    )
    _add_common(sweep)

    fit = sub.add_parser("fit", help="single solve; export networks and differences")
    _add_common(fit)
    fit.add_argument(
        "--weight-by-samples",
        action="store_true",
        default=None,
        help="weight each condition's likelihood by its sample count",
    )

    boot = sub.add_parser("bootstrap", help="bootstrap difference frequencies")
    _add_common(boot)
    boot.add_argument("--bootstrap-b", type=int, help="number of bootstrap replicas")

    fdr = sub.add_parser("fdr", help="permutation-split FDR estimation")
    _add_common(fdr)
    fdr.add_argument("--fdr-splits", type=int, help="number of permutation splits")

    grid = sub.add_parser("grid", help="precompute the explorer grid artifact")
    _add_common(grid)
    grid.add_argument(
        "--grid-fdr-splits",
        type=int,
        help="permutation splits per cell (0 disables FDR annotation)",
    )

    serve = sub.add_parser("serve", help="serve a grid artifact over HTTP")
    serve.add_argument("--config", help="YAML configuration file")
    serve.add_argument("--artifact", help="grid.json produced by the grid mode")
    serve.add_argument("--bind", help="host:port to listen on")
    serve.add_argument("--ui-dir", help="static explorer bundle directory")
    serve.add_argument("--out", help=argparse.SUPPRESS)

    return parser


def _configure_logging() -> None:
    level_name = os.environ.get(LOG_ENV_VAR, "INFO").upper()
    level = getattr(logging, level_name, logging.INFO)
    logging.basicConfig(
        level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s"
    )


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    for key in (
        "seed",
        "out",
        "estimator",
        "inputs",
        "bootstrap_b",
        "fdr_splits",
        "grid_fdr_splits",
        "bind",
        "artifact",
        "ui_dir",
        "weight_by_samples",
    ):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    if getattr(args, "lambda1", None) is not None:
        overrides["lambda1"] = args.lambda1
    if getattr(args, "lambda2", None) is not None:
        overrides["lambda2"] = args.lambda2
    scenario_keys = {
        "p": getattr(args, "p", None),
        "m": getattr(args, "m", None),
        "p_move": getattr(args, "p_move", None),
        "n_per_condition": getattr(args, "n_per_condition", None),
        "K": getattr(args, "conditions", None),
    }
    if any(v is not None for v in scenario_keys.values()):
        from .synthetic import SyntheticScenario

        missing = [k for k in ("p", "m", "p_move") if scenario_keys[k] is None]
        if missing:
            raise SystemExit(
                f"scenario flags require --p, --m and --p-move (missing: {missing})"
            )
        overrides["scenario"] = SyntheticScenario(
            p=scenario_keys["p"],
            m=scenario_keys["m"],
            p_move=scenario_keys["p_move"],
            K=scenario_keys["K"] or 2,
            n_per_condition=scenario_keys["n_per_condition"] or 200,
        )
    return overrides


def main(argv=None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    mode = args.command.replace("-", "_")
    try:
        config = load_config(args.config, mode, _overrides_from_args(args))
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if mode == "serve":
        from .artifacts import GridArtifact
        from .service import serve_grid

        try:
            artifact = GridArtifact.load(config.artifact)
            server = serve_grid(artifact, config.bind, config.ui_dir)
        except (ValueError, OSError, KeyError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        host, port = server.server_address[:2]
        print(f"serving grid on http://{host}:{port}/ (Ctrl+C to stop)")
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
        finally:
            server.shutdown()
            server.server_close()
        return 0

    status = run_experiment(config)
    if status == 0:
        print(f"wrote artifacts to {config.out}")
    else:
        print(f"run failed; see {config.out}/error.json", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
