"""Experiment orchestration: configs, paired-mode runs, and file emission.

A run directory receives, per mode, the growth-loop trace and the companion
per-optimizer-iteration trace as CSV, the cost ledger as JSON, plus a
``summary.json`` comparing modes.  With diagnostics enabled the
inverse-Hessian distance series, element-wise difference heatmaps and a
convergence report for the final optimization are emitted as well.  All
outputs are byte-deterministic for a fixed config; concurrent runs must use
distinct directories, enforced by a lock file.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .cost import CostLedger
from .diagnostics import convergence_report, exact_ansatz_hessian, hessian_distance_series
from .driver import MODES, AdaptResult, run_adapt
from .hamiltonians import HamiltonianFile, builtin_model, load_hamiltonian
from .optimizer import OptimizerResult
from .pools import OperatorPool, build_nearest_neighbor_pool, build_qe_pool, build_qubit_pool
from .simulator import AnsatzState

__all__ = ["ExperimentConfig", "ExperimentError", "load_config", "run_experiment"]

ADAPT_TRACE_COLUMNS = (
    "n", "selected_label", "selected_gradient", "pool_grad_norm",
    "energy", "error", "line_searches", "fevals_cumulative",
)
OPT_TRACE_COLUMNS = (
    "n", "k", "f", "grad_norm", "alpha", "fevals_cumulative", "update_skipped",
)

_POOL_CHOICES = ("auto", "qe", "qubit", "nn")


class ExperimentError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce a run; JSON round-trippable."""

    hamiltonian_path: str | None = None
    builtin: dict | None = None
    pool: str = "auto"
    qe_singles: bool = True
    pool_scale: float = 1.0
    modes: tuple[str, ...] = ("canonical", "recycling")
    eps: float = 1e-6
    max_adapt_iterations: int = 50
    opt_grad_tol: float = 1e-6
    opt_max_iterations: int = 10000
    diagnostics: bool = False
    heatmap_iterations: tuple[int, ...] = ()
    output_dir: str = "run_output"
    verify_hamiltonian: bool = False
    seed: int | None = None

    def __post_init__(self):
        if (self.hamiltonian_path is None) == (self.builtin is None):
            raise ValueError("exactly one of hamiltonian_path or builtin is required")
        if self.pool not in _POOL_CHOICES:
            raise ValueError(f"pool must be one of {_POOL_CHOICES}")
        if self.eps <= 0 or self.opt_grad_tol <= 0:
            raise ValueError("convergence thresholds must be positive")
        if self.max_adapt_iterations < 0 or self.opt_max_iterations < 1:
            raise ValueError("iteration caps out of range")
        bad = [m for m in self.modes if m not in MODES]
        if bad or not self.modes:
            raise ValueError(f"modes must be a non-empty subset of {MODES}")
        self.modes = tuple(self.modes)
        self.heatmap_iterations = tuple(int(i) for i in self.heatmap_iterations)

    def to_payload(self) -> dict:
        return {
            "hamiltonian_path": self.hamiltonian_path,
            "builtin": self.builtin,
            "pool": self.pool,
            "qe_singles": self.qe_singles,
            "pool_scale": self.pool_scale,
            "modes": list(self.modes),
            "eps": self.eps,
            "max_adapt_iterations": self.max_adapt_iterations,
            "opt_grad_tol": self.opt_grad_tol,
            "opt_max_iterations": self.opt_max_iterations,
            "diagnostics": self.diagnostics,
            "heatmap_iterations": list(self.heatmap_iterations),
            "output_dir": self.output_dir,
            "verify_hamiltonian": self.verify_hamiltonian,
            "seed": self.seed,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ExperimentConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(payload) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        payload = dict(payload)
        if "modes" in payload:
            payload["modes"] = tuple(payload["modes"])
        if "heatmap_iterations" in payload:
            payload["heatmap_iterations"] = tuple(payload["heatmap_iterations"])
        return cls(**payload)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    try:
        payload = json.loads(path.read_text())
    except OSError as exc:
        raise ExperimentError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ExperimentError(f"{path}: invalid JSON: {exc}") from exc
    try:
        return ExperimentConfig.from_payload(payload)
    except (TypeError, ValueError) as exc:
        raise ExperimentError(f"{path}: {exc}") from exc


def _resolve_hamiltonian(config: ExperimentConfig) -> HamiltonianFile:
    if config.hamiltonian_path is not None:
        return load_hamiltonian(config.hamiltonian_path, verify=config.verify_hamiltonian)
    spec = dict(config.builtin)
    try:
        return builtin_model(
            kind=spec.pop("kind"),
            n_qubits=int(spec.pop("n_qubits")),
            coupling=float(spec.pop("coupling", 1.0)),
            field_strength=float(spec.pop("field", 1.0)),
            with_exact=bool(spec.pop("with_exact", True)),
        )
    except KeyError as exc:
        raise ExperimentError(f"builtin spec missing field {exc}") from exc


def resolve_pool(config: ExperimentConfig, hfile: HamiltonianFile) -> OperatorPool:
    choice = config.pool
    if choice == "auto":
        choice = "qe" if hfile.n_electrons else "nn"
    if choice in ("qe", "qubit"):
        if not hfile.n_electrons:
            raise ExperimentError(
                "excitation pools need n_electrons in the Hamiltonian metadata"
            )
        qe = build_qe_pool(hfile.n_qubits, hfile.n_electrons,
                           include_singles=config.qe_singles, scale=config.pool_scale)
        return qe if choice == "qe" else build_qubit_pool(qe)
    return build_nearest_neighbor_pool(hfile.n_qubits, scale=config.pool_scale)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_csv(path: Path, header, rows) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def write_adapt_trace(path: Path, result: AdaptResult) -> None:
    rows = [(0, "", "", "", result.initial_energy,
             None if result.exact_energy is None
             else result.initial_energy - result.exact_energy, 0, 1)]
    for it in result.iterations:
        rows.append((it.n, it.selected_label, it.selected_gradient,
                     it.pool_grad_norm, it.energy, it.error,
                     it.line_searches, it.fevals_cumulative))
    _write_csv(path, ADAPT_TRACE_COLUMNS, rows)


def write_opt_trace(path: Path, result: AdaptResult) -> None:
    rows = []
    for it in result.iterations:
        for rec in it.opt_trace:
            rows.append((it.n, rec.k, rec.f, rec.grad_norm, rec.alpha,
                         rec.fevals_cumulative, rec.update_skipped))
    _write_csv(path, OPT_TRACE_COLUMNS, rows)


def write_ledger(path: Path, result: AdaptResult) -> None:
    ledger = result.ledger
    _write_json(path, {
        "function_evaluations": ledger.function_evaluations,
        "pool_gradient_units": ledger.pool_gradient_units,
        "total_units": ledger.total_units,
        "pool_sweeps": result.pool_sweeps,
        "per_iteration": ledger.breakdown,
    })


def _mode_summary(result: AdaptResult) -> dict:
    return {
        "final_energy": result.energy,
        "error_vs_exact": result.error,
        "converged": result.converged,
        "stalled": result.stalled,
        "iterations": len(result.iterations),
        "function_evaluations": result.ledger.function_evaluations,
        "pool_gradient_units": result.ledger.pool_gradient_units,
        "final_pool_grad_norm": result.final_pool_grad_norm,
    }


def _write_diagnostics(out: Path, config: ExperimentConfig, hfile: HamiltonianFile,
                       pool: OperatorPool, results: dict[str, AdaptResult]) -> None:
    shadow = CostLedger()
    if {"canonical", "recycling"} <= set(results):
        records, heatmaps = hessian_distance_series(
            results["canonical"], results["recycling"], hfile.operator, pool,
            hfile.reference_bitstring, shadow_ledger=shadow,
            heatmap_iterations=config.heatmap_iterations,
        )
        _write_csv(
            out / f"hessdist_{hfile.name}.csv",
            ("n", "canonical_distance", "recycled_distance",
             "evolution_distance", "excluded"),
            [(r.n, r.canonical_distance, r.recycled_distance,
              r.evolution_distance, r.excluded) for r in records],
        )
        for n, matrices in heatmaps.items():
            for mode, matrix in matrices.items():
                _write_csv(out / f"hm_{mode}_{n}.csv",
                           [f"c{j}" for j in range(matrix.shape[1])],
                           [tuple(float(v) for v in row) for row in matrix])
    for mode, result in results.items():
        if not result.iterations:
            continue
        it = result.iterations[-1]
        if it.opt_snapshots is None:
            continue
        ansatz = AnsatzState(hfile.reference_bitstring)
        for prev in result.iterations:
            ansatz = ansatz.grown(pool.operators[prev.selected_index], 0.0)
        hess_star = exact_ansatz_hessian(
            ansatz, hfile.operator, it.x_star, shadow_ledger=shadow)
        opt_result = OptimizerResult(
            x_star=it.x_star, f_star=it.energy, grad_star=it.grad_star,
            h_star=it.h_star, line_searches=it.line_searches,
            converged=it.opt_converged, line_search_failed=it.line_search_failed,
            trace=it.opt_trace, initial_fevals=it.opt_initial_fevals,
            snapshots=it.opt_snapshots,
        )
        report = convergence_report(opt_result, hessian_at_xstar=hess_star)
        if report.insufficient:
            continue
        rows = [
            (k, report.step_sizes[k], report.error_ratios[k],
             report.superlinear_markers[k])
            for k in range(len(report.step_sizes))
        ]
        _write_csv(out / f"convergence_{mode}_{it.n}.csv",
                   ("k", "alpha", "error_ratio", "superlinear_marker"), rows)
    _write_json(out / "diagnostics_ledger.json", shadow.snapshot())


def run_experiment(config: ExperimentConfig) -> dict:
    """Execute every configured mode and write the run directory.

    Returns the summary payload.  Raises :class:`ExperimentError` with the
    growth-loop iteration attached when a run fails mid-flight.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    lock = out / ".lock"
    try:
        lock_handle = lock.open("x")
    except FileExistsError:
        raise ExperimentError(
            f"output directory {out} is locked by another run ({lock})"
        ) from None
    try:
        lock_handle.close()
        hfile = _resolve_hamiltonian(config)
        pool = resolve_pool(config, hfile)
        results: dict[str, AdaptResult] = {}
        for mode in config.modes:
            try:
                results[mode] = run_adapt(
                    hfile.operator, hfile.reference_bitstring, pool, mode=mode,
                    eps=config.eps, max_iterations=config.max_adapt_iterations,
                    opt_grad_tol=config.opt_grad_tol,
                    opt_max_iterations=config.opt_max_iterations,
                    exact_energy=hfile.exact_ground_energy,
                    record_optimizer_state=config.diagnostics,
                )
            except Exception as exc:
                raise ExperimentError(f"{mode} run failed: {exc}") from exc
            write_adapt_trace(out / f"adapt_trace_{mode}.csv", results[mode])
            write_opt_trace(out / f"opt_trace_{mode}.csv", results[mode])
            write_ledger(out / f"ledger_{mode}.json", results[mode])

        summary: dict = {
            "hamiltonian": hfile.name,
            "n_qubits": hfile.n_qubits,
            "pool_kind": pool.kind,
            "pool_size": len(pool),
            "exact_ground_energy": hfile.exact_ground_energy,
            "modes": {mode: _mode_summary(results[mode]) for mode in config.modes},
        }
        if {"canonical", "recycling"} <= set(results):
            canonical = results["canonical"].ledger.function_evaluations
            recycling = results["recycling"].ledger.function_evaluations
            summary["feval_ratio"] = recycling / canonical if canonical else None
            summary["final_energy_gap"] = abs(
                results["canonical"].energy - results["recycling"].energy
            )
        _write_json(out / "summary.json", summary)
        _write_json(out / "config.json", config.to_payload())
        if config.diagnostics:
            _write_diagnostics(out, config, hfile, pool, results)
        return summary
    finally:
        lock.unlink(missing_ok=True)


def diagnose_run(run_dir: str | Path) -> dict:
    """Recompute a finished run with diagnostics enabled.

    The run's own ``config.json`` is replayed (deterministic core), so the
    existing traces are reproduced alongside the diagnostic series.
    """
    run_dir = Path(run_dir)
    config_path = run_dir / "config.json"
    if not config_path.is_file():
        raise ExperimentError(f"{run_dir} has no config.json to replay")
    config = load_config(config_path)
    config = replace(config, diagnostics=True, output_dir=str(run_dir))
    return run_experiment(config)
