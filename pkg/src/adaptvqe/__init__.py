"""Adaptive VQE on an exact statevector simulator, with a quasi-Newton
optimizer that recycles the approximate inverse Hessian across ansatz-growth
iterations, plus convergence and measurement-cost diagnostics."""

from .cost import CostLedger, default_pool_sweep_units
from .diagnostics import (
    ConvergenceReport,
    HessianDistanceRecord,
    HessianReport,
    convergence_report,
    exact_ansatz_hessian,
    exact_hessian,
    frobenius_distance,
    hessian_distance_series,
    hessian_report,
    newton_direction,
)
from .driver import AdaptIteration, AdaptResult, pool_gradients, run_adapt, select_operator
from .hamiltonians import (
    HamiltonianFile,
    HamiltonianFormatError,
    builtin_model,
    bundled_fixture_path,
    ground_state_energy,
    list_bundled_fixtures,
    load_hamiltonian,
    save_hamiltonian,
)
from .objectives import AnsatzObjective, FunctionObjective
from .optimizer import (
    OptimizerResult,
    bfgs_update,
    expand_inverse_hessian,
    freeze_parameters,
    minimize_canonical,
    minimize_recycled,
    wolfe_line_search,
)
from .paulis import PauliString, PauliSum, commutator, jordan_wigner_ladder, multiply
from .pools import (
    OperatorPool,
    build_nearest_neighbor_pool,
    build_qe_pool,
    build_qubit_pool,
    particle_number_operator,
    sz_projection_operator,
)
from .simulator import (
    AnsatzState,
    StateVector,
    apply_generator_exponential,
    apply_pauli_sum,
    basis_state,
    energy_and_gradient,
    expectation,
    gradient_components,
    prepare,
)

__version__ = "0.1.0"
