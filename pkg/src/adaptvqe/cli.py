"""Command-line interface.

Subcommands:

* ``run``: execute an experiment (paired modes by default) and write traces,
  ledgers and a summary into an output directory.
* ``pool``: export an operator pool as JSON.
* ``model``: emit a built-in model Hamiltonian file.
* ``diagnose``: replay a finished run with diagnostics enabled.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .experiment import (
    ExperimentConfig,
    ExperimentError,
    diagnose_run,
    load_config,
    resolve_pool,
    run_experiment,
)
from .hamiltonians import (
    HamiltonianFormatError,
    builtin_model,
    load_hamiltonian,
    save_hamiltonian,
)


def _add_hamiltonian_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--hamiltonian", help="path to a Hamiltonian JSON file")
    parser.add_argument("--model", choices=("tfim", "heisenberg"),
                        help="use a built-in model instead of a file")
    parser.add_argument("--n-qubits", type=int, default=None,
                        help="qubit count for --model")
    parser.add_argument("--coupling", type=float, default=1.0,
                        help="model coupling J (default 1.0)")
    parser.add_argument("--field", type=float, default=1.0,
                        help="model transverse field h (default 1.0)")


def _add_pool_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--pool", choices=("auto", "qe", "qubit", "nn"),
                        default="auto", help="operator pool (default: auto)")
    parser.add_argument("--qe-singles", choices=("on", "off"), default="on",
                        help="include single excitations in the QE pool")
    parser.add_argument("--pool-scale", type=float, default=1.0,
                        help="uniform generator scale (default 1.0)")


def _builtin_spec(args) -> dict | None:
    if args.model is None:
        return None
    if args.n_qubits is None:
        raise ExperimentError("--model requires --n-qubits")
    return {"kind": args.model, "n_qubits": args.n_qubits,
            "coupling": args.coupling, "field": args.field}


def _config_from_args(args) -> ExperimentConfig:
    if args.config:
        config = load_config(args.config)
        if args.out:
            from dataclasses import replace
            config = replace(config, output_dir=args.out)
        return config
    if (args.hamiltonian is None) == (args.model is None):
        raise ExperimentError("provide exactly one of --hamiltonian or --model")
    return ExperimentConfig(
        hamiltonian_path=args.hamiltonian,
        builtin=_builtin_spec(args),
        pool=args.pool,
        qe_singles=args.qe_singles == "on",
        pool_scale=args.pool_scale,
        modes=tuple(args.modes.split(",")),
        eps=args.eps,
        max_adapt_iterations=args.max_iterations,
        opt_grad_tol=args.opt_eps,
        opt_max_iterations=args.opt_max_iterations,
        diagnostics=args.diagnostics,
        heatmap_iterations=tuple(int(n) for n in args.heatmaps.split(",") if n),
        output_dir=args.out or "run_output",
        verify_hamiltonian=args.verify,
        seed=args.seed,
    )


def _cmd_run(args) -> int:
    summary = run_experiment(_config_from_args(args))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_pool(args) -> int:
    if (args.hamiltonian is None) == (args.model is None):
        raise ExperimentError("provide exactly one of --hamiltonian or --model")
    if args.hamiltonian:
        hfile = load_hamiltonian(args.hamiltonian)
    else:
        spec = _builtin_spec(args)
        hfile = builtin_model(spec["kind"], spec["n_qubits"], spec["coupling"],
                              spec["field"], with_exact=False)
    config = ExperimentConfig(
        hamiltonian_path=args.hamiltonian,
        builtin=None if args.hamiltonian else _builtin_spec(args),
        pool=args.pool, qe_singles=args.qe_singles == "on",
        pool_scale=args.pool_scale,
    )
    pool = resolve_pool(config, hfile)
    payload = pool.to_payload()
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
        print(f"wrote {len(payload)} operators to {args.out}")
    else:
        print(json.dumps(payload, indent=2))
    return 0


def _cmd_model(args) -> int:
    hfile = builtin_model(args.kind, args.n_qubits, args.coupling, args.field,
                          with_exact=not args.no_exact)
    save_hamiltonian(hfile, args.out)
    print(f"wrote {hfile.name} ({hfile.operator.n_terms} terms) to {args.out}")
    return 0


def _cmd_diagnose(args) -> int:
    summary = diagnose_run(args.run_dir)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="adaptvqe",
        description="Adaptive VQE with an inverse-Hessian-recycling optimizer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    _add_hamiltonian_args(run)
    _add_pool_args(run)
    run.add_argument("--config", help="JSON config file (overrides other flags)")
    run.add_argument("--modes", default="canonical,recycling",
                     help="comma-separated mode list (default both)")
    run.add_argument("--eps", type=float, default=1e-6,
                     help="pool-gradient-norm stop threshold")
    run.add_argument("--max-iterations", type=int, default=50,
                     help="growth-iteration cap")
    run.add_argument("--opt-eps", type=float, default=1e-6,
                     help="optimizer gradient-norm threshold")
    run.add_argument("--opt-max-iterations", type=int, default=10000,
                     help="optimizer line-search cap")
    run.add_argument("--diagnostics", action="store_true",
                     help="emit Hessian-distance and convergence diagnostics")
    run.add_argument("--heatmaps", default="",
                     help="comma-separated iterations for heatmap export")
    run.add_argument("--verify", action="store_true",
                     help="re-verify recorded exact energies on load")
    run.add_argument("--seed", type=int, default=None,
                     help="seed for randomized extensions (core path is "
                          "deterministic)")
    run.add_argument("--out", help="output directory")
    run.set_defaults(func=_cmd_run)

    pool = sub.add_parser("pool", help="export an operator pool as JSON")
    _add_hamiltonian_args(pool)
    _add_pool_args(pool)
    pool.add_argument("--out", help="output file (stdout when omitted)")
    pool.set_defaults(func=_cmd_pool)

    model = sub.add_parser("model", help="emit a built-in model Hamiltonian")
    model.add_argument("--kind", choices=("tfim", "heisenberg"), required=True)
    model.add_argument("--n-qubits", type=int, required=True)
    model.add_argument("--coupling", type=float, default=1.0)
    model.add_argument("--field", type=float, default=1.0)
    model.add_argument("--no-exact", action="store_true",
                       help="skip the exact ground-energy diagonalization")
    model.add_argument("--out", required=True, help="output file")
    model.set_defaults(func=_cmd_model)

    diagnose = sub.add_parser("diagnose", help="replay a run with diagnostics")
    diagnose.add_argument("run_dir", help="finished run directory")
    diagnose.set_defaults(func=_cmd_diagnose)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExperimentError, HamiltonianFormatError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
