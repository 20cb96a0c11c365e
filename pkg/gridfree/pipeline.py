# ------------------------------------------------------------------------------
# End-to-end estimation.
#
#   1. manifold      G^H from the geometry
#   2. delta         noise-norm bound
#   3. conic         optimal dual vector c*
#   4. poly          h* = G^H c*, p(z) = 1 - |b(z)|^2 and its unit-circle roots
#   5. prune         sparse fit over candidates plus random fill angles
#   6. amplitudes    least squares on the surviving directions
#
# The number of sources is never an input. Also provides the conventional
# delay-and-sum beamformer spectrum used as a baseline.
# ------------------------------------------------------------------------------

import contextlib
import dataclasses
import logging
import time

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.signal

from . import conic
from . import geometry
from . import manifold
from . import poly
from . import prune
from . import utils


logger = logging.getLogger(__name__)


SCHEMA = 'gridfree.result/1'


@dataclasses.dataclass
class EstimatorConfig:
    gamma_db: float = manifold.DEFAULT_GAMMA_DB
    P: int = None
    delta: float = None
    delta_mult: float = 1.0
    sigma_n: float = None
    circle_tol: float = poly.DEFAULT_CIRCLE_TOL
    cluster_tol_deg: float = poly.DEFAULT_CLUSTER_TOL_DEG
    beta: float = None
    beta_scale: float = prune.DEFAULT_BETA_SCALE
    n_fill: int = prune.DEFAULT_N_FILL
    support_thresh: float = prune.DEFAULT_SUPPORT_THRESH
    merge_coherence: float = prune.DEFAULT_MERGE_COHERENCE
    squared_residual: bool = False
    prune: bool = True
    tol: float = conic.DEFAULT_TOL
    solver: str = None
    seed: int = 0

    def __post_init__(self):
        for name in ('circle_tol', 'cluster_tol_deg', 'beta_scale', 'support_thresh', 'merge_coherence', 'tol', 'delta_mult'):
            if not getattr(self, name) > 0:
                raise utils.GridfreeError("Config value %s must be positive, got %r." % (name, getattr(self, name)))
        if self.beta is not None and not self.beta > 0:
            raise utils.GridfreeError("Config value beta must be positive, got %r." % self.beta)
        if self.delta is not None and not self.delta >= 0:
            raise utils.GridfreeError("Config value delta must be >= 0, got %r." % self.delta)
        if not self.merge_coherence <= 1:
            raise utils.GridfreeError("Config value merge_coherence must be at most 1, got %r." % self.merge_coherence)
        if self.n_fill < 0:
            raise utils.GridfreeError("Config value n_fill must be >= 0, got %r." % self.n_fill)

    # delta explicit, or delta_mult * e_n with e_n = sigma_n sqrt(M).
    def resolve_delta(self, M):
        if self.delta is not None:
            return float(self.delta)
        if self.sigma_n is not None:
            return float(self.delta_mult * self.sigma_n * np.sqrt(M))
        raise utils.GridfreeError("Set delta, or sigma_n so that delta = delta_mult * sigma_n * sqrt(M).")

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)

    # Copy with every default that depends on the array filled in.
    def resolved(self, M):
        return self.replace(delta=self.resolve_delta(M))

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass
class SourceEstimate:
    doas_deg: np.ndarray
    amplitudes: np.ndarray
    diagnostics: dict
    config: dict
    solution: conic.DualSolution = None
    roots: poly.RootSet = None
    pruning: prune.PruneResult = None

    def __len__(self):
        return len(self.doas_deg)

    def to_record(self):
        return {
            'schema': SCHEMA,
            'doas_deg': [float(doa) for doa in self.doas_deg],
            'amplitudes': [[float(a.real), float(a.imag)] for a in self.amplitudes],
            'diagnostics': utils.plain(self.diagnostics),
            'config': utils.plain(self.config),
        }


# Times a stage and tags any failure inside it with the stage name.
@contextlib.contextmanager
def _stage(name, timings):
    start = time.perf_counter()
    try:
        yield
    except utils.StageError:
        raise
    except (utils.GridfreeError, np.linalg.LinAlgError) as err:
        raise utils.StageError(name, err) from err
    finally:
        timings[name] = time.perf_counter() - start


def estimate(y, g, cfg=None):
    cfg = cfg or EstimatorConfig()
    y = np.asarray(y, dtype=complex)
    if y.shape != (g.M,):
        raise utils.GridfreeError("Snapshot has shape %s, expected (%d,)." % (y.shape, g.M))

    timings = {}
    diagnostics = {'M': g.M, 'timings': timings}

    with _stage('manifold', timings):
        model = manifold.build_manifold(g, cfg.gamma_db, cfg.P)
        diagnostics.update(P=model.P, N=model.N)

    with _stage('delta', timings):
        cfg = cfg.resolved(g.M)
        delta = cfg.delta
        diagnostics['delta'] = delta

    with _stage('conic', timings):
        solution = conic.solve(conic.DualProblem(y, model, delta), cfg.tol, cfg.solver)
        diagnostics.update(solver_status=solution.status, objective=solution.objective,
                           solver=solution.diagnostics)
        if not solution.ok:
            raise utils.GridfreeError("dual program did not converge: %s"
                                      % '; '.join(solution.diagnostics.get('attempts', [])))

    with _stage('poly', timings):
        p = poly.build_p(solution.h_star)
        roots = poly.find_unit_circle_angles(p, cfg.circle_tol, cfg.cluster_tol_deg)
        candidates = roots.unit_circle_angles
        diagnostics.update(n_roots=len(roots.roots), n_candidates=len(candidates),
                           degenerate=roots.degenerate)

    pruning = None
    with _stage('prune', timings):
        if cfg.prune and len(candidates):
            dictionary = prune.build_dictionary(g, candidates, cfg.n_fill, cfg.seed, cfg.cluster_tol_deg)
            beta = cfg.beta or prune.default_beta(dictionary.D, g.M, delta, cfg.squared_residual, cfg.beta_scale)
            if not beta > 0:
                beta = 1e-6 * max(np.linalg.norm(y), 1e-12)
            pruning = prune.lasso_prune(y, dictionary, beta, cfg.support_thresh,
                                        cfg.squared_residual, cfg.tol, cfg.solver)
            survivors = prune.surviving_candidates(pruning, cfg.merge_coherence, g.M)
            doas = dictionary.angles[survivors]
            diagnostics.update(beta=beta, D=dictionary.D, n_support=len(pruning.support))
        else:
            if len(candidates) > g.M:
                raise utils.GridfreeError("%d candidate angles exceed the %d sensors; enable pruning." % (len(candidates), g.M))
            doas = candidates
        doas = poly.cluster_angles(doas, np.radians(cfg.cluster_tol_deg))
        diagnostics['n_pruned'] = len(doas)

    with _stage('amplitudes', timings):
        doas_deg = np.degrees(doas)
        amplitudes = recover_amplitudes(y, g, doas_deg)

    logger.info("estimate: %d candidate angles, %d directions after pruning (P=%d, delta=%.4g)",
                len(candidates), len(doas_deg), model.P, delta)
    config = cfg.to_dict()
    config['beta'] = diagnostics.get('beta', cfg.beta)
    return SourceEstimate(doas_deg, amplitudes, diagnostics, config, solution, roots, pruning)


# Least-squares amplitudes s = A(theta)^+ y for the given DOAs (degrees).
def recover_amplitudes(y, g, doas_deg):
    y = np.asarray(y, dtype=complex)
    doas_deg = np.atleast_1d(np.asarray(doas_deg, dtype=float))
    if len(doas_deg) == 0:
        return np.empty(0, dtype=complex)
    if len(doas_deg) > g.M:
        raise utils.GridfreeError("Cannot fit %d directions with %d sensors." % (len(doas_deg), g.M))

    A = geometry.steering_matrix(g, np.radians(doas_deg))
    _, R, _ = scipy.linalg.qr(A, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(R))
    rank = int(np.sum(diagonal > 1e-8 * diagonal[0]))
    if rank < len(doas_deg):
        i, j = _most_coherent_pair(A)
        raise utils.GridfreeError(
            "Steering matrix is rank deficient (rank %d of %d): DOAs %.4f° and %.4f° are "
            "indistinguishable." % (rank, len(doas_deg), doas_deg[i], doas_deg[j]))

    amplitudes, _, _, _ = scipy.linalg.lstsq(A, y)
    return amplitudes


def _most_coherent_pair(A):
    gram = np.abs(A.conj().T @ A) / A.shape[0]
    np.fill_diagonal(gram, -1.0)
    i, j = np.unravel_index(np.argmax(gram), gram.shape)
    return min(i, j), max(i, j)


# Normalised delay-and-sum spectrum |a(theta)^H y| / M on a grid of degrees.
def cbf_spectrum(y, g, grid_deg):
    grid_deg = np.atleast_1d(np.asarray(grid_deg, dtype=float))
    if len(grid_deg) == 0:
        raise utils.GridfreeError("CBF needs a nonempty angle grid.")
    A = geometry.steering_matrix(g, np.radians(grid_deg))
    return np.abs(A.conj().T @ np.asarray(y, dtype=complex)) / g.M


# Grid angles (degrees) of the local maxima of a spectrum. A circular grid
# is padded so that peaks at the seam are found.
def cbf_peaks(spectrum, grid_deg, circular=False, prominence=None):
    spectrum = np.asarray(spectrum, dtype=float)
    grid_deg = np.asarray(grid_deg, dtype=float)
    if circular:
        padded = np.concatenate([spectrum[-1:], spectrum, spectrum[:1]])
        peaks, _ = scipy.signal.find_peaks(padded, prominence=prominence)
        peaks = peaks - 1
    else:
        peaks, _ = scipy.signal.find_peaks(spectrum, prominence=prominence)
    return grid_deg[peaks]


# Pairs estimated and true DOAs (degrees) by minimum total circular error.
# Returns the per-truth errors; a true DOA left without a partner takes its
# distance to the nearest estimate, or 180 degrees if there are none.
def match_doas(estimated_deg, truth_deg):
    estimated = np.atleast_1d(np.asarray(estimated_deg, dtype=float))
    truth = np.atleast_1d(np.asarray(truth_deg, dtype=float))
    if len(truth) == 0:
        return np.empty(0)
    if len(estimated) == 0:
        return np.full(len(truth), 180.0)
    cost = np.abs(utils.wrap_degrees(truth[:, np.newaxis] - estimated[np.newaxis, :]))
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    errors = cost.min(axis=1)
    errors[rows] = cost[rows, cols]
    return errors


def doa_rmse(estimated_deg, truth_deg):
    errors = match_doas(estimated_deg, truth_deg)
    return float(np.sqrt(np.mean(errors ** 2))) if len(errors) else 0.0
