# ------------------------------------------------------------------------------
# The finite dual semidefinite program.
#
# We maximize Re{c^H y} - delta ||c||_2 over the dual vector c subject to the
# dual polynomial b(z) = sum_k (G^H c)_k z^k being bounded by one on the unit
# circle. Boundedness is certified by a Hermitian H (P x P) with
#
#   [[H, G^H c], [c^H G, 1]] >= 0,   sum_i H[i, i+j] = 1 if j == 0 else 0.
#
# The complex bordered matrix Z is carried as the real symmetric embedding
# W = [[Re Z, -Im Z], [Im Z, Re Z]] of size 2(P+1) and handed to a real conic
# backend. ||c||_2 enters through an epigraph variable t and a
# second-order cone.
# ------------------------------------------------------------------------------

import dataclasses
import logging
import time

import cvxpy as cp
import numpy as np
import scipy.sparse

from . import manifold
from . import poly
from . import utils


logger = logging.getLogger(__name__)


# Default relative KKT tolerance handed to the backend.
DEFAULT_TOL = 1e-8

# Backends tried in order when the caller does not choose one.
DEFAULT_BACKENDS = ('CLARABEL', 'SCS')

# Grid used to check that the returned dual polynomial is bounded.
BOUND_GRID = 4096
BOUND_SLACK = 1e-4


# Map backend names to functions returning their solver options for a tolerance.
backends = {}


# Decorator function for registering backend option builders.
def register(*names):

    def register_backend(func):
        for name in names:
            backends[name] = func
        return func

    return register_backend


@register('CLARABEL')
def clarabel_options(tol):
    return dict(tol_gap_abs=tol, tol_gap_rel=tol, tol_feas=tol, max_iter=500)


@register('SCS')
def scs_options(tol):
    return dict(eps_abs=tol, eps_rel=tol, max_iters=200000)


@register('CVXOPT')
def cvxopt_options(tol):
    return dict(abstol=tol, reltol=tol, feastol=tol, max_iters=500)


@register('MOSEK')
def mosek_options(tol):
    return {}


@dataclasses.dataclass
class DualProblem:
    y: np.ndarray
    model: manifold.ManifoldModel
    delta: float

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=complex)
        if not self.delta >= 0:
            raise utils.GridfreeError("Noise bound delta must be >= 0, got %r." % self.delta)
        if self.y.shape != (self.model.M,):
            raise utils.GridfreeError(
                "Snapshot has shape %s but the manifold has %d sensors." % (self.y.shape, self.model.M))


@dataclasses.dataclass
class DualSolution:
    c_star: np.ndarray
    h_star: np.ndarray
    objective: float
    status: str
    H: np.ndarray = None
    diagnostics: dict = dataclasses.field(default_factory=dict)

    @property
    def ok(self):
        return self.status in ('optimal', 'near_optimal')


# A conic program ready to hand to a backend, together with the handles
# needed to read the solution back out.
class ConicProgram:

    def __init__(self, problem, c_re, c_im, t, W, P, M):
        self.problem = problem
        self.c_re = c_re
        self.c_im = c_im
        self.t = t
        self.W = W
        self.P = P
        self.M = M

    # Real degrees of freedom: P^2 for the Hermitian H, 2M for c, one for t.
    @property
    def n_variables(self):
        return self.P * self.P + 2 * self.M + 1

    # The same count in complex units, H counted by its upper triangle.
    @property
    def complex_count(self):
        return self.P * self.P / 2 + self.M

    @property
    def n_trace_constraints(self):
        return self.P

    @property
    def psd_dimension(self):
        return self.W.shape[0]

    def c_value(self):
        return np.asarray(self.c_re.value) + 1j * np.asarray(self.c_im.value)

    def H_value(self):
        n = self.P + 1
        W = np.asarray(self.W.value)
        return W[:self.P, :self.P] + 1j * W[n:n + self.P, :self.P]


def assemble(problem):
    return _assemble(problem.y, problem.model.G_hermitian, problem.delta)


# Builds the embedded program for a snapshot y, a coefficient map G^H
# (P x M, h = G^H c) and a noise bound delta.
def _assemble(y, G_hermitian, delta):
    y = np.asarray(y, dtype=complex)
    P, M = G_hermitian.shape
    if y.shape != (M,):
        raise utils.GridfreeError("Snapshot length %d does not match %d manifold columns." % (len(y), M))
    n = P + 1
    A, B = G_hermitian.real, G_hermitian.imag

    c_re = cp.Variable(M, name='c_re')
    c_im = cp.Variable(M, name='c_im')
    t = cp.Variable(nonneg=True, name='t')
    W = cp.Variable((2 * n, 2 * n), symmetric=True, name='W')

    Zr, Zi = W[:n, :n], W[n:, :n]
    h_re = A @ c_re - B @ c_im
    h_im = B @ c_re + A @ c_im

    constraints = [
        W >> 0,
        # Block structure of the real embedding: equal diagonal blocks and a
        # skew-symmetric imaginary block. Upper triangles only, no repeats.
        cp.upper_tri(W[n:, n:] - Zr) == 0,
        cp.diag(W[n:, n:] - Zr) == 0,
        cp.upper_tri(Zi + Zi.T) == 0,
        cp.diag(Zi) == 0,
        # Border.
        Zr[:P, P] == h_re,
        Zi[:P, P] == h_im,
        Zr[P, P] == 1,
        cp.SOC(t, cp.hstack([c_re, c_im])),
    ]

    # Trace constraints on the diagonals of H: sum_i H[i, i+j] = delta_j0.
    T = _diagonal_sums(P)
    target = np.zeros(P)
    target[0] = 1.0
    constraints.append(T @ cp.reshape(Zr[:P, :P], (P * P,), order='F') == target)
    if P > 1:
        constraints.append(T[1:] @ cp.reshape(Zi[:P, :P], (P * P,), order='F') == 0)

    objective = cp.Maximize(y.real @ c_re + y.imag @ c_im - delta * t)
    program = ConicProgram(cp.Problem(objective, constraints), c_re, c_im, t, W, P, M)
    logger.debug("conic: assembled P=%d M=%d, %d real variables, PSD cone %d, %d trace constraints",
                 P, M, program.n_variables, program.psd_dimension, program.n_trace_constraints)
    return program


# Sparse P x P^2 matrix summing the j-th superdiagonal of a column-major
# flattened P x P matrix into row j.
def _diagonal_sums(P):
    rows, cols = [], []
    for j in range(P):
        for i in range(P - j):
            rows.append(j)
            cols.append(i + (i + j) * P)
    data = np.ones(len(rows))
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(P, P * P))


_status_map = {
    cp.OPTIMAL: 'optimal',
    cp.OPTIMAL_INACCURATE: 'near_optimal',
}


def solve(problem, tol=DEFAULT_TOL, solver=None):
    program = assemble(problem)
    return _solve_program(program, problem.y, problem.model.G_hermitian, problem.delta, tol, solver)


# Runs the assembled program through each backend in turn until one returns
# a usable answer. Never raises on non-convergence: the returned status is
# 'failed' and the diagnostics say why.
def _solve_program(program, y, G_hermitian, delta, tol, solver):
    names = [solver] if solver else [name for name in DEFAULT_BACKENDS if name in cp.installed_solvers()]
    attempts = []

    for name in names:
        options = backends.get(name, lambda tol: {})(tol)
        start = time.perf_counter()
        try:
            program.problem.solve(solver=name, verbose=logger.isEnabledFor(logging.DEBUG), **options)
        except (cp.SolverError, ValueError) as err:
            attempts.append('%s: %s' % (name, err))
            logger.warning("conic: backend %s raised: %s", name, err)
            continue
        elapsed = time.perf_counter() - start
        status = _status_map.get(program.problem.status, 'failed')
        attempts.append('%s: %s' % (name, program.problem.status))
        if status == 'failed' or program.c_re.value is None:
            logger.warning("conic: backend %s returned status %s", name, program.problem.status)
            continue

        c_star = program.c_value()
        h_star = G_hermitian @ c_star
        objective = float(np.real(np.vdot(c_star, y)) - delta * np.linalg.norm(c_star))
        stats = program.problem.solver_stats
        diagnostics = {
            'backend': name,
            'backend_status': program.problem.status,
            'backend_objective': float(program.problem.value),
            'iterations': getattr(stats, 'num_iters', None),
            'solve_time': elapsed,
            'n_variables': program.n_variables,
            'attempts': attempts,
        }
        solution = DualSolution(c_star, h_star, objective, status, program.H_value(), diagnostics)

        peak = max_modulus(h_star)
        diagnostics['max_dual_modulus'] = peak
        if solution.status == 'optimal' and peak > 1 + BOUND_SLACK:
            logger.warning("conic: dual polynomial peaks at %.6f > 1 + %g; marking near-optimal",
                           peak, BOUND_SLACK)
            solution.status = 'near_optimal'

        logger.debug("conic: %s %s in %.3fs, %s iterations, objective %.10g",
                     name, program.problem.status, elapsed, diagnostics['iterations'], objective)
        return solution

    M = G_hermitian.shape[1]
    return DualSolution(
        c_star=np.zeros(M, dtype=complex),
        h_star=np.zeros(G_hermitian.shape[0], dtype=complex),
        objective=float('nan'),
        status='failed',
        diagnostics={'attempts': attempts or ['no backend available']},
    )


# Largest modulus of the dual polynomial on a uniform grid of the circle.
def max_modulus(h, n_grid=BOUND_GRID):
    if len(h) % 2 == 0:
        h = np.append(h, 0)
    thetas = 2 * np.pi * np.arange(n_grid) / n_grid
    return float(np.max(np.abs(manifold.evaluate_polynomial(h, thetas))))


# Feasibility certificate for a solved program: the smallest eigenvalue of
# the bordered matrix and the worst trace-constraint residual.
def certificate(solution):
    if solution.H is None:
        raise utils.GridfreeError("Solution carries no H matrix (status %s)." % solution.status)
    H, h = solution.H, solution.h_star
    P = len(h)
    Z = np.zeros((P + 1, P + 1), dtype=complex)
    Z[:P, :P] = H
    Z[:P, P] = h
    Z[P, :P] = h.conj()
    Z[P, P] = 1.0
    min_eig = float(np.linalg.eigvalsh((Z + Z.conj().T) / 2).min())
    sums = np.array([np.trace(H, offset=j) for j in range(P)])
    sums[0] -= 1.0
    return {'min_eigenvalue': min_eig, 'trace_residual': float(np.max(np.abs(sums)))}


# Classical direct-polynomial program for a half-wavelength ULA whose dual
# function sum_m c_m e^{jm u}, u = pi cos(theta), is already a polynomial:
# the same program with G^H = I.
def solve_direct_ula(y, delta, tol=DEFAULT_TOL, solver=None):
    y = np.asarray(y, dtype=complex)
    identity = np.eye(len(y), dtype=complex)
    program = _assemble(y, identity, delta)
    return _solve_program(program, y, identity, delta, tol, solver)


# DOAs (radians, in [0, pi]) from a direct-route ULA solution. Rooting gives
# electrical angles u = pi cos(theta); a line array cannot tell front from
# back so only the upper half-plane is returned.
def ula_angles(solution, circle_tol=poly.DEFAULT_CIRCLE_TOL, cluster_tol_deg=poly.DEFAULT_CLUSTER_TOL_DEG):
    p = poly.build_p(solution.c_star)
    roots = poly.find_unit_circle_angles(p, circle_tol, cluster_tol_deg)
    thetas = np.arccos(np.clip(roots.unit_circle_angles / np.pi, -1.0, 1.0))
    return poly.cluster_angles(thetas, np.radians(cluster_tol_deg))
