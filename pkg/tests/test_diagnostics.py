import numpy as np
import pytest

from adaptvqe.cost import CostLedger
from adaptvqe.diagnostics import (
    convergence_report,
    exact_ansatz_hessian,
    exact_hessian,
    frobenius_distance,
    hessian_distance_series,
    hessian_report,
    is_positive_definite,
    newton_direction,
)
from adaptvqe.objectives import FunctionObjective
from adaptvqe.optimizer import OptimizerResult, OptimizerSnapshot, minimize_canonical
from adaptvqe.paulis import PauliSum
from adaptvqe.simulator import AnsatzState

from oracles import central_difference_gradient


def quadratic_objective(matrix):
    matrix = np.asarray(matrix, dtype=float)
    return FunctionObjective(lambda x: 0.5 * x @ matrix @ x, lambda x: matrix @ x)


def synthetic_result(iterates, alphas=None):
    """Wrap a list of iterates as a state-recorded optimizer result."""
    iterates = [np.atleast_1d(np.asarray(x, dtype=float)) for x in iterates]
    n = iterates[0].size
    snapshots = [OptimizerSnapshot(k, x, 0.0, np.zeros(n), -np.ones(n), np.eye(n))
                 for k, x in enumerate(iterates[:-1])]
    from adaptvqe.optimizer import IterationRecord
    trace = [IterationRecord(k, 0.0, 0.0, 1.0 if alphas is None else alphas[k],
                             1, 0, False, 0.0, -1.0, 0.0)
             for k in range(len(snapshots))]
    return OptimizerResult(
        x_star=iterates[-1], f_star=0.0, grad_star=np.zeros(n),
        h_star=np.eye(n), line_searches=len(snapshots), converged=True,
        line_search_failed=False, trace=trace, initial_fevals=0,
        snapshots=snapshots)


class TestExactHessian:
    def test_quadratic_surrogate_recovers_constant_matrix(self):
        a = np.array([[4.0, 1.0], [1.0, 3.0]])
        hess = exact_hessian(lambda x: a @ x, np.array([0.3, -0.7]))
        np.testing.assert_allclose(hess, a, atol=1e-6)

    def test_single_rotation_ansatz_analytic_value(self):
        # E(theta) = <0|exp(-i t Y) Z exp(i t Y)|0> = cos(2 t);  E''(0) = -4
        gen = PauliSum.from_text_terms([("Y", 1j)])
        ansatz = AnsatzState("0", ((gen, 0.0),))
        ham = PauliSum.from_text_terms([("Z", 1.0)])
        hess = exact_ansatz_hessian(ansatz, ham)
        assert hess[0, 0] == pytest.approx(-4.0, abs=1e-6)

    def test_richardson_tightens_the_estimate(self):
        grad = lambda x: np.array([np.sin(x[0]) * 10.0])
        x = np.array([0.4])
        coarse = exact_hessian(grad, x, step=1e-2)
        refined = exact_hessian(grad, x, step=1e-2, richardson=True)
        truth = 10.0 * np.cos(0.4)
        assert abs(refined[0, 0] - truth) < abs(coarse[0, 0] - truth)

    def test_raw_asymmetry_is_small(self, h2_fixture):
        # symmetry of the unsymmetrized central-difference matrix is a
        # smoothness self-consistency check
        from adaptvqe.pools import build_qe_pool
        from adaptvqe.simulator import gradient_components
        pool = build_qe_pool(4, 2)
        ansatz = AnsatzState(h2_fixture.reference_bitstring,
                             ((pool.operators[2], 0.2), (pool.operators[3], -0.1)))
        x = ansatz.parameters

        def grad(params):
            return gradient_components(ansatz.with_parameters(params),
                                       h2_fixture.operator, [0, 1])

        raw = np.empty((2, 2))
        step = 1e-5
        for i in range(2):
            shift = np.zeros(2)
            shift[i] = step
            raw[:, i] = (grad(x + shift) - grad(x - shift)) / (2 * step)
        assert np.max(np.abs(raw - raw.T)) < 1e-6

    def test_shadow_ledger_charged(self, h2_fixture):
        from adaptvqe.pools import build_qe_pool
        pool = build_qe_pool(4, 2)
        ansatz = AnsatzState(h2_fixture.reference_bitstring, ((pool.operators[2], 0.2),))
        shadow = CostLedger()
        exact_ansatz_hessian(ansatz, h2_fixture.operator, shadow_ledger=shadow)
        assert shadow.function_evaluations == 2 * 2 * 1  # 2n grad calls of dim n=1

    def test_invalid_step(self):
        with pytest.raises(ValueError, match="positive"):
            exact_hessian(lambda x: x, np.zeros(1), step=0.0)


class TestNewtonDirection:
    def test_identity_hessian_reproduces_steepest_descent(self):
        grad = np.array([0.3, -1.2])
        np.testing.assert_allclose(newton_direction(grad, np.eye(2)), -grad)

    def test_diagonal_solve(self):
        p = newton_direction(np.array([2.0, 1.0]), np.diag([2.0, 0.5]))
        np.testing.assert_allclose(p, [-1.0, -2.0])

    def test_random_spd_matches_dense_solver(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            m = rng.normal(size=(n, n))
            hess = m @ m.T + 0.5 * np.eye(n)
            grad = rng.normal(size=n)
            p = newton_direction(grad, hess)
            assert np.linalg.norm(hess @ p + grad) < 1e-10

    def test_singular_hessian_falls_back_to_least_squares(self):
        hess = np.diag([1.0, 0.0])
        p = newton_direction(np.array([1.0, 0.0]), hess)
        assert np.isfinite(p).all()
        assert not is_positive_definite(hess)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            newton_direction(np.ones(3), np.eye(2))


class TestConvergenceReport:
    def test_geometric_sequence_is_linear_with_half_ratio(self):
        iterates = [np.array([2.0 ** -k]) for k in range(12)] + [np.array([0.0])]
        report = convergence_report(synthetic_result(iterates))
        np.testing.assert_allclose(report.error_ratios[:-2], 0.5, atol=1e-12)

    def test_doubly_exponential_sequence_is_superlinear(self):
        iterates = [np.array([2.0 ** -(2 ** k)]) for k in range(7)] + [np.array([0.0])]
        report = convergence_report(synthetic_result(iterates))
        ratios = report.error_ratios[:-2]
        assert all(later < earlier for earlier, later in zip(ratios, ratios[1:]))
        assert ratios[-1] < 1e-3

    def test_short_trace_flagged_insufficient(self):
        report = convergence_report(synthetic_result([np.ones(1), np.zeros(1)]))
        assert report.insufficient

    def test_marker_vanishes_on_quadratic(self):
        diag = np.diag([10.0, 30.0, 90.0])
        obj = quadratic_objective(diag)
        result = minimize_canonical(obj, np.ones(3), grad_tol=1e-8, record_state=True)
        report = convergence_report(result, hessian_at_xstar=diag)
        assert report.superlinear_markers[-1] < 1e-6

    def test_newton_distances_on_quadratic_shrink(self):
        diag = np.diag([10.0, 40.0])
        obj = quadratic_objective(diag)
        result = minimize_canonical(obj, np.ones(2), grad_tol=1e-8, record_state=True)
        report = convergence_report(
            result, grad_fn=lambda x: diag @ x, compute_newton=True)
        assert report.newton_distances[-1] <= report.newton_distances[0] + 1e-12
        assert report.hessian_pd_flags.all()

    def test_requires_snapshots(self):
        result = minimize_canonical(quadratic_objective(np.eye(2)), np.ones(2))
        with pytest.raises(ValueError, match="snapshots"):
            convergence_report(result)


class TestHessianReport:
    def test_frobenius_definition_matches_elementwise_sum(self):
        rng = np.random.default_rng(42)
        a, b = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
        expected = np.sqrt(np.sum(np.abs(a - b) ** 2))
        assert frobenius_distance(a, b) == pytest.approx(expected, rel=1e-12)

    def test_report_fields(self):
        exact = np.diag([2.0, 4.0])
        report = hessian_report(exact, np.eye(2))
        np.testing.assert_allclose(report.exact_inverse, np.diag([0.5, 0.25]))
        assert report.frobenius_distance == pytest.approx(
            np.sqrt(0.25 + 0.5625))
        assert report.hessian_positive_definite

    def test_singular_exact_hessian_flagged(self):
        report = hessian_report(np.diag([1.0, 0.0]), np.eye(2))
        assert report.exact_inverse is None and report.frobenius_distance is None


class TestHessianDistanceSeries:
    def test_last_row_and_column_identical_between_modes(
            self, h4_equilibrium_fixture, h4_equilibrium_paired):
        pool, results = h4_equilibrium_paired
        hf = h4_equilibrium_fixture
        records, heatmaps = hessian_distance_series(
            results["canonical"], results["recycling"], hf.operator, pool,
            hf.reference_bitstring, with_evolution=False,
            heatmap_iterations=(2, 5))
        included = [r for r in records if not r.excluded]
        assert len(included) >= 5
        for n in (2, 5):
            pair = heatmaps[n]
            assert np.array_equal(pair["canonical"][-1, :], pair["recycling"][-1, :])
            assert np.array_equal(pair["canonical"][:, -1], pair["recycling"][:, -1])

    def test_first_iteration_distances_coincide(
            self, h4_equilibrium_fixture, h4_equilibrium_paired):
        # a single parameter has no history to recycle: both modes start at I
        pool, results = h4_equilibrium_paired
        hf = h4_equilibrium_fixture
        records, _ = hessian_distance_series(
            results["canonical"], results["recycling"], hf.operator, pool,
            hf.reference_bitstring, with_evolution=False)
        first = records[0]
        assert first.n == 1 and not first.excluded
        assert first.canonical_distance == pytest.approx(first.recycled_distance)

    def test_recycled_initial_matrix_is_closer_late(
            self, h4_equilibrium_fixture, h4_equilibrium_paired):
        pool, results = h4_equilibrium_paired
        hf = h4_equilibrium_fixture
        shadow = CostLedger()
        records, _ = hessian_distance_series(
            results["canonical"], results["recycling"], hf.operator, pool,
            hf.reference_bitstring, with_evolution=False, shadow_ledger=shadow)
        late = [r for r in records if r.n >= 4 and not r.excluded]
        wins = sum(r.recycled_distance <= r.canonical_distance for r in late)
        assert wins / len(late) >= 0.9
        assert shadow.function_evaluations > 0
