"""The adaptive ansatz-growth outer loop.

Each iteration measures the gradient of every pool operator at the current
state, appends the operator with the largest gradient magnitude (parameter
initialized to zero), and re-optimizes all parameters.  The optimizer is
dispatched per mode: ``canonical`` restarts from an identity inverse
Hessian, ``recycling`` warm-starts from the previous iteration's final
parameter vector, gradient and inverse Hessian.  The loop stops when the
pool-gradient norm falls below the threshold or the iteration cap is hit.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .cost import CostLedger, default_pool_sweep_units
from .objectives import AnsatzObjective
from .optimizer import (
    IterationRecord,
    OptimizerSnapshot,
    expand_inverse_hessian,
    minimize_canonical,
    minimize_recycled,
)
from .paulis import PauliSum
from .pools import OperatorPool
from .simulator import AnsatzState, StateVector, expectation, prepare, _apply_sum_raw

__all__ = [
    "MODES",
    "AdaptIteration",
    "AdaptResult",
    "pool_gradients",
    "select_operator",
    "run_adapt",
]

logger = logging.getLogger(__name__)

MODES = ("canonical", "recycling")

_ENERGY_RISE_TOL = 1e-10


@dataclass
class AdaptIteration:
    """Everything recorded about one ansatz-growth iteration."""

    n: int
    selected_index: int
    selected_label: str
    selected_gradient: float
    pool_grad_norm: float
    energy: float
    error: float | None
    line_searches: int
    fevals_cumulative: int
    pool_units_cumulative: int
    opt_converged: bool
    line_search_failed: bool
    x_start: np.ndarray
    x_star: np.ndarray
    grad_star: np.ndarray
    h_start: np.ndarray
    h_star: np.ndarray
    opt_trace: list[IterationRecord]
    opt_initial_fevals: int
    opt_snapshots: list[OptimizerSnapshot] | None = None


@dataclass
class AdaptResult:
    mode: str
    ansatz: AnsatzState
    x_star: np.ndarray
    energy: float
    initial_energy: float
    converged: bool
    stalled: bool
    pool_sweeps: int
    final_pool_grad_norm: float | None
    exact_energy: float | None
    iterations: list[AdaptIteration] = field(default_factory=list)
    ledger: CostLedger = field(default_factory=CostLedger)

    @property
    def selected_indices(self) -> list[int]:
        return [it.selected_index for it in self.iterations]

    @property
    def error(self) -> float | None:
        if self.exact_energy is None:
            return None
        return self.energy - self.exact_energy


def pool_gradients(
    state: StateVector,
    pool: OperatorPool,
    hamiltonian: PauliSum,
    ledger: CostLedger | None = None,
    units: int | None = None,
) -> np.ndarray:
    """Energy derivative of each candidate operator at parameter zero.

    Each entry is the expectation of the commutator of the Hamiltonian with
    the generator, evaluated as 2 Re <H psi | A_k psi>.  The ledger is
    charged one flat pool sweep (default 8N units) per call.
    """
    if pool.n_qubits != state.n_qubits or hamiltonian.n_qubits != state.n_qubits:
        raise ValueError("pool/Hamiltonian/state qubit counts disagree")
    if ledger is not None:
        ledger.charge_pool_sweep(
            default_pool_sweep_units(state.n_qubits) if units is None else units
        )
    h_psi = _apply_sum_raw(state.amplitudes, state.n_qubits, hamiltonian)
    grads = np.empty(len(pool), dtype=float)
    for k, op in enumerate(pool.operators):
        a_psi = _apply_sum_raw(state.amplitudes, state.n_qubits, op)
        grads[k] = 2.0 * np.real(np.vdot(h_psi, a_psi))
    return grads


def select_operator(gradients: np.ndarray, tie_tol: float = 1e-6) -> tuple[int, float]:
    """Index of the largest-magnitude gradient and the Euclidean norm of the
    whole gradient vector.

    Candidates within ``tie_tol`` of the maximum magnitude count as tied and
    the lowest pool index wins.  Symmetry-degenerate operators differ only
    by numerical noise at converged iterates, so a strict argmax would make
    the selection depend on noise instead of on the pool order.
    """
    gradients = np.asarray(gradients, dtype=float)
    if gradients.size == 0:
        raise ValueError("cannot select from an empty pool")
    magnitudes = np.abs(gradients)
    best = float(np.max(magnitudes))
    index = int(np.argmax(magnitudes >= best - tie_tol))
    return index, float(np.linalg.norm(gradients))


def run_adapt(
    hamiltonian: PauliSum,
    reference: str,
    pool: OperatorPool,
    mode: str = "canonical",
    eps: float = 1e-6,
    max_iterations: int = 50,
    opt_grad_tol: float = 1e-6,
    opt_max_iterations: int = 10000,
    ledger: CostLedger | None = None,
    exact_energy: float | None = None,
    pool_units_per_iteration: int | None = None,
    stall_limit: int = 3,
    record_optimizer_state: bool = False,
    strong_wolfe: bool = False,
) -> AdaptResult:
    """Run the adaptive growth loop until the pool-gradient norm drops below
    ``eps`` or ``max_iterations`` operators have been added.

    A line-search failure inside one optimization is recorded and the loop
    continues from the best point found; ``stall_limit`` consecutive
    first-line-search failures abort the loop with a diagnostic.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if len(pool) == 0:
        raise ValueError("operator pool is empty")
    if eps <= 0 or opt_grad_tol <= 0:
        raise ValueError("convergence thresholds must be positive")
    if max_iterations < 0 or opt_max_iterations < 1:
        raise ValueError("iteration caps out of range")

    ledger = ledger if ledger is not None else CostLedger()
    ansatz = AnsatzState(reference)
    ledger.charge_energy(1)
    energy = expectation(prepare(ansatz), hamiltonian)
    initial_energy = energy

    x_star = np.zeros(0)
    grad_star = np.zeros(0)
    h_star = np.zeros((0, 0))
    iterations: list[AdaptIteration] = []
    converged = False
    stalled = False
    pool_sweeps = 0
    pool_norm = None
    consecutive_stalls = 0

    n = 0
    while n < max_iterations:
        n += 1
        state = prepare(ansatz)
        grads = pool_gradients(state, pool, hamiltonian, ledger,
                               pool_units_per_iteration)
        pool_sweeps += 1
        index, pool_norm = select_operator(grads)
        ledger.record_iteration(
            f"adapt-{n}", pool_grad_norm=pool_norm, **ledger.snapshot()
        )
        if pool_norm <= eps:
            converged = True
            break

        ansatz = ansatz.grown(pool.operators[index], 0.0)
        objective = AnsatzObjective(hamiltonian, ansatz, ledger)
        try:
            if mode == "canonical":
                h_start = np.eye(n)
                opt = minimize_canonical(
                    objective, np.concatenate([x_star, [0.0]]),
                    grad_tol=opt_grad_tol, max_iterations=opt_max_iterations,
                    record_state=record_optimizer_state, strong_wolfe=strong_wolfe,
                )
            else:
                h_start = expand_inverse_hessian(h_star, 1)
                opt = minimize_recycled(
                    objective, x_star, grad_star, h_star, 1,
                    grad_tol=opt_grad_tol, max_iterations=opt_max_iterations,
                    record_state=record_optimizer_state, strong_wolfe=strong_wolfe,
                )
        except Exception as exc:
            raise RuntimeError(f"ADAPT iteration {n} ({mode} mode) failed: {exc}") from exc

        if opt.f_star > energy + _ENERGY_RISE_TOL:
            raise RuntimeError(
                f"ADAPT iteration {n}: energy rose from {energy:.12f} to "
                f"{opt.f_star:.12f}"
            )
        if opt.line_search_failed and opt.line_searches <= 1:
            consecutive_stalls += 1
            logger.warning("ADAPT iteration %d: first line search failed (%d/%d)",
                           n, consecutive_stalls, stall_limit)
        else:
            consecutive_stalls = 0

        x_start = np.concatenate([x_star, [0.0]])
        x_star = opt.x_star
        grad_star = opt.grad_star
        h_star = opt.h_star
        energy = opt.f_star
        ansatz = ansatz.with_parameters(x_star)
        iterations.append(AdaptIteration(
            n=n,
            selected_index=index,
            selected_label=pool.labels[index],
            selected_gradient=float(grads[index]),
            pool_grad_norm=pool_norm,
            energy=energy,
            error=None if exact_energy is None else energy - exact_energy,
            line_searches=opt.line_searches,
            fevals_cumulative=ledger.function_evaluations,
            pool_units_cumulative=ledger.pool_gradient_units,
            opt_converged=opt.converged,
            line_search_failed=opt.line_search_failed,
            x_start=x_start,
            x_star=x_star.copy(),
            grad_star=grad_star.copy(),
            h_start=h_start,
            h_star=h_star.copy(),
            opt_trace=opt.trace,
            opt_initial_fevals=opt.initial_fevals,
            opt_snapshots=opt.snapshots,
        ))
        if consecutive_stalls >= stall_limit:
            stalled = True
            logger.error("ADAPT aborted after %d consecutive stalled iterations",
                         consecutive_stalls)
            break

    return AdaptResult(
        mode=mode,
        ansatz=ansatz,
        x_star=x_star,
        energy=energy,
        initial_energy=initial_energy,
        converged=converged,
        stalled=stalled,
        pool_sweeps=pool_sweeps,
        final_pool_grad_norm=pool_norm,
        exact_energy=exact_energy,
        iterations=iterations,
        ledger=ledger,
    )
