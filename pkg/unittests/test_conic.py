# ------------------------------------------------------------------------------
# Tests for the dual semidefinite program.
# ------------------------------------------------------------------------------

import numpy as np

import helpers
from gridfree import conic
from gridfree import geometry
from gridfree import manifold
from gridfree import poly
from gridfree import utils


def origin_model():
    return manifold.build_manifold(geometry.ArrayGeometry((geometry.SensorPosition(0.0),)))


def single_source(M=40, radius=2.0, doa_deg=40.0, P=63):
    g = geometry.make_uca(M, radius)
    y = geometry.steering_response(g, np.radians(doa_deg))
    return g, y, manifold.build_manifold(g, P=P)


def test_assemble_counts():
    g = geometry.make_uca(6, 0.5)
    model = manifold.build_manifold(g)
    program = conic.assemble(conic.DualProblem(np.ones(6), model, 0.1))
    P = model.P
    assert program.n_trace_constraints == P
    assert program.psd_dimension == 2 * (P + 1)
    assert program.n_variables == P * P + 2 * 6 + 1
    assert program.complex_count == P * P / 2 + 6


def test_scalar_program():
    model = origin_model()
    program = conic.assemble(conic.DualProblem(np.array([1.0 + 0j]), model, 0.1))
    assert program.psd_dimension == 4
    solution = conic.solve(conic.DualProblem(np.array([1.0 + 0j]), model, 0.1))
    assert solution.status == 'optimal'
    assert abs(solution.c_star[0] - 1.0) < 1e-5
    assert abs(solution.objective - 0.9) < 1e-5


def test_problem_validation():
    model = origin_model()
    for y, delta in ((np.ones(2), 0.1), (np.ones(1), -1.0)):
        try:
            conic.DualProblem(y, model, delta)
        except utils.GridfreeError:
            continue
        assert False, "expected GridfreeError"


def test_zero_snapshot():
    g = geometry.make_uca(8, 1.0)
    model = manifold.build_manifold(g)
    solution = conic.solve(conic.DualProblem(np.zeros(8), model, 0.5))
    assert solution.ok
    assert np.linalg.norm(solution.c_star) < 1e-5
    assert abs(solution.objective) < 1e-5


def test_h_star_recomputed():
    g, y, model = single_source(M=12, radius=1.0, P=None)
    solution = conic.solve(conic.DualProblem(y, model, 0.1))
    assert np.allclose(solution.h_star, model.G_hermitian @ solution.c_star, atol=1e-14)
    assert solution.diagnostics['backend']
    assert solution.diagnostics['solve_time'] >= 0


def test_noiseless_single_source():
    g, y, model = single_source()
    solution = conic.solve(conic.DualProblem(y, model, 1e-6))
    assert solution.ok
    peak = abs(model.evaluate(solution.h_star, [np.radians(40.0)])[0])
    assert abs(peak - 1.0) < 1e-3
    assert conic.max_modulus(solution.h_star) <= 1 + 1e-4
    assert abs(solution.objective - 1.0) < 1e-3


def test_dual_function_peaks_at_source():
    g, y, model = single_source(M=40, radius=2.0, doa_deg=-70.0)
    solution = conic.solve(conic.DualProblem(y, model, 1e-6))
    thetas = np.radians(np.arange(-180.0, 180.0, 0.05))
    direct = np.abs(geometry.steering_matrix(g, thetas).conj().T @ solution.c_star)
    at_source = abs(geometry.steering_response(g, np.radians(-70.0)).conj() @ solution.c_star)
    assert at_source >= direct.max() - 1e-3



def test_certificate():
    g = geometry.make_uca(8, 0.6)
    model = manifold.build_manifold(g)
    rng = np.random.default_rng(4)
    y = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    solution = conic.solve(conic.DualProblem(y, model, 0.3))
    cert = conic.certificate(solution)
    assert cert['min_eigenvalue'] >= -1e-6
    assert cert['trace_residual'] <= 1e-6


def test_certificate_needs_matrix():
    solution = conic.DualSolution(np.zeros(1), np.zeros(1), 0.0, 'failed')
    try:
        conic.certificate(solution)
    except utils.GridfreeError:
        return
    assert False, "expected GridfreeError"


def test_objective_non_increasing_in_delta():
    g = geometry.make_uca(10, 1.0)
    model = manifold.build_manifold(g)
    y = geometry.steering_matrix(g, np.radians([20.0, 110.0])) @ np.array([1.0, 0.7j])
    y = y + 0.05 * helpers.random_unit_vector(10, 2)
    objectives = [conic.solve(conic.DualProblem(y, model, delta)).objective for delta in (0.01, 0.1, 0.5, 1.0)]
    assert all(b <= a + 1e-6 for a, b in zip(objectives, objectives[1:])), objectives


def test_unknown_backend_fails_without_raising():
    model = origin_model()
    solution = conic.solve(conic.DualProblem(np.array([1.0 + 0j]), model, 0.1), solver='NO_SUCH_SOLVER')
    assert solution.status == 'failed'
    assert not solution.ok
    assert solution.diagnostics['attempts']


def test_direct_ula_zero_snapshot():
    solution = conic.solve_direct_ula(np.zeros(6), 0.5)
    assert solution.ok
    assert np.linalg.norm(solution.c_star) < 1e-5


def test_ula_cross_check():
    truth = np.array([60.0, 100.0])
    g = geometry.make_ula(8, 0.5)
    y = geometry.steering_matrix(g, np.radians(truth)) @ np.array([1.0, np.exp(0.8j)])

    direct = np.degrees(conic.ula_angles(conic.solve_direct_ula(y, 1e-6)))

    model = manifold.build_manifold(g)
    solution = conic.solve(conic.DualProblem(y, model, 1e-6))
    rootset = poly.find_unit_circle_angles(poly.build_p(solution.h_star))
    folded = np.degrees(poly.cluster_angles(np.abs(rootset.unit_circle_angles), np.radians(0.5)))

    assert helpers.worst_miss(direct, truth) < 0.05
    assert helpers.worst_miss(folded, truth) < 0.05
    for angle in truth:
        nearest_direct = direct[np.argmin(np.abs(direct - angle))]
        nearest_folded = folded[np.argmin(np.abs(folded - angle))]
        assert abs(nearest_direct - nearest_folded) < 0.05
