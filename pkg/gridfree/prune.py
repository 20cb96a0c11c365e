# ------------------------------------------------------------------------------
# Pruning extraneous root angles with a sparse fit.
#
# The candidate angles from the rooting step are pooled with random fill
# angles into a steering dictionary and the snapshot is fitted with
#
#   min_x  1/2 ||y - A x||_2 + beta ||x||_1
#
# where ||x||_1 sums complex moduli. Each atom in the support of x is credited
# to the candidate it is most coherent with, and the credited candidates are
# the directions that survive. A squared-residual variant is available.
# ------------------------------------------------------------------------------

import csv
import dataclasses
import logging

import cvxpy as cp
import numpy as np

from . import conic
from . import geometry
from . import utils


logger = logging.getLogger(__name__)


DEFAULT_N_FILL = 180
DEFAULT_SUPPORT_THRESH = 0.05
DEFAULT_BETA_SCALE = 0.5
DEFAULT_MERGE_COHERENCE = 0.5
DEFAULT_TOL = 1e-8

# With the default scale, 2 beta stays below this fraction of the column
# norm sqrt(M).
BETA_CEILING = 0.4

# Candidates this coherent with a stronger survivor are the same direction.
DUPLICATE_COHERENCE = 0.999


@dataclasses.dataclass(frozen=True)
class AugmentedDictionary:
    angles: np.ndarray
    A: np.ndarray
    n_candidates: int

    @property
    def D(self):
        return len(self.angles)


@dataclasses.dataclass
class PruneResult:
    x_star: np.ndarray
    support: np.ndarray
    angles: np.ndarray
    beta: float
    objective: float
    dictionary: AugmentedDictionary

    @property
    def degrees(self):
        return np.degrees(self.angles)


# Pools the candidate angles (radians) with n_fill angles drawn uniformly on
# the circle. Fill angles that land within cluster_tol of a candidate are
# drawn again so that every candidate appears exactly once.
def build_dictionary(g, candidates, n_fill=DEFAULT_N_FILL, rng_seed=0, cluster_tol_deg=0.5):
    candidates = utils.wrap_angle(np.atleast_1d(np.asarray(candidates, dtype=float)))
    tol = np.radians(cluster_tol_deg)
    rng = np.random.default_rng(rng_seed)

    fill = np.empty(0)
    while len(fill) < n_fill:
        draw = utils.wrap_angle(rng.uniform(-np.pi, np.pi, size=n_fill - len(fill)))
        if len(candidates):
            distance = utils.angular_distance(draw[:, np.newaxis], candidates[np.newaxis, :])
            draw = draw[distance.min(axis=1) > tol]
        fill = np.concatenate([fill, draw])

    angles = np.concatenate([candidates, fill])
    A = geometry.steering_matrix(g, angles)
    return AugmentedDictionary(angles, A, len(candidates))


# Resolves the default weight. The residual-norm form compares the
# correlations |a^H r| / ||r|| with 2 beta: the level sqrt(ln D) of the
# largest noise-only correlation, held below a fixed fraction of sqrt(M) so
# that small arrays keep room for the true atoms. The squared form is
# referenced to delta.
def default_beta(D, M, delta=None, squared=False, beta_scale=DEFAULT_BETA_SCALE):
    level = min(np.sqrt(np.log(max(D, 2))), BETA_CEILING * np.sqrt(M))
    beta = beta_scale * level
    if squared:
        beta *= 2 * (delta or 0.0)
    return float(beta)


def lasso_prune(y, dictionary, beta, support_thresh=DEFAULT_SUPPORT_THRESH,
                squared=False, tol=DEFAULT_TOL, solver=None):
    y = np.asarray(y, dtype=complex)
    A = dictionary.A
    if not beta > 0:
        raise utils.GridfreeError("LASSO weight beta must be positive, got %r." % beta)
    if y.shape != (A.shape[0],):
        raise utils.GridfreeError("Snapshot length %d does not match dictionary rows %d." % (len(y), A.shape[0]))

    if dictionary.D == 0 or not np.any(y):
        x_star = np.zeros(dictionary.D, dtype=complex)
        return PruneResult(x_star, np.empty(0, dtype=int), np.empty(0), beta, 0.0, dictionary)

    x = cp.Variable(dictionary.D, complex=True)
    residual = y - A @ x
    fit = 0.5 * cp.sum_squares(residual) if squared else 0.5 * cp.norm(residual, 2)
    problem = cp.Problem(cp.Minimize(fit + beta * cp.norm1(x)))

    names = [solver] if solver else [name for name in conic.DEFAULT_BACKENDS if name in cp.installed_solvers()]
    for name in names:
        try:
            problem.solve(solver=name, **conic.backends.get(name, lambda tol: {})(tol))
        except (cp.SolverError, ValueError) as err:
            logger.warning("prune: backend %s raised: %s", name, err)
            continue
        if problem.status in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            break
        logger.warning("prune: backend %s returned status %s", name, problem.status)
    else:
        raise utils.GridfreeError("LASSO did not converge (last status %s)." % problem.status)

    x_star = np.asarray(x.value, dtype=complex)
    magnitude = np.abs(x_star)
    peak = magnitude.max()
    if peak <= 1e-12 * max(1.0, np.linalg.norm(y)):
        support = np.empty(0, dtype=int)
    else:
        support = np.flatnonzero(magnitude > support_thresh * peak)

    logger.debug("prune: D=%d (%d candidates), beta=%.4g, support %d",
                 dictionary.D, dictionary.n_candidates, beta, len(support))
    return PruneResult(x_star, support, dictionary.angles[support], beta, float(problem.value), dictionary)


# Indices of the candidate columns that survive, strongest first. Every
# support atom credits |x| to the candidate it is most coherent with, where
# coherence is |a_i^H a_j| / M; atoms below min_coherence with every
# candidate credit nothing. A candidate nearly identical to a stronger
# survivor is dropped, and at most max_count survive.
def surviving_candidates(result, min_coherence=DEFAULT_MERGE_COHERENCE, max_count=None):
    dictionary = result.dictionary
    n = dictionary.n_candidates
    if n == 0 or len(result.support) == 0:
        return np.empty(0, dtype=int)

    M = dictionary.A.shape[0]
    candidates = dictionary.A[:, :n]
    coherence = np.abs(dictionary.A[:, result.support].conj().T @ candidates) / M
    nearest = np.argmax(coherence, axis=1)
    credited = coherence[np.arange(len(nearest)), nearest] >= min_coherence
    credit = np.zeros(n)
    np.add.at(credit, nearest[credited], np.abs(result.x_star[result.support[credited]]))

    survivors = []
    for index in np.argsort(-credit, kind='stable'):
        if credit[index] <= 0:
            break
        overlap = np.abs(candidates[:, survivors].conj().T @ candidates[:, index]) / M
        if np.any(overlap > DUPLICATE_COHERENCE):
            continue
        survivors.append(int(index))
    if max_count is not None and len(survivors) > max_count:
        logger.warning("prune: %d candidates survive, keeping the %d strongest", len(survivors), max_count)
        survivors = survivors[:max_count]

    logger.debug("prune: %d of %d support atoms credited to %d candidates",
                 int(credited.sum()), len(result.support), len(survivors))
    return np.array(survivors, dtype=int)


# Writes the full (angle, |x|) profile, sorted by angle, for stem plots.
def write_profile_csv(result, path, config=None):
    order = np.argsort(result.dictionary.angles)
    in_support = np.zeros(result.dictionary.D, dtype=bool)
    in_support[result.support] = True
    with open(path, 'w', newline='', encoding='utf-8') as file:
        for line in utils.comment_lines(config):
            file.write(line + '\n')
        writer = csv.writer(file)
        writer.writerow(['angle_deg', 'magnitude', 'candidate', 'support'])
        for index in order:
            writer.writerow(['%.6f' % np.degrees(result.dictionary.angles[index]),
                             '%.8g' % abs(result.x_star[index]),
                             int(index < result.dictionary.n_candidates),
                             int(in_support[index])])
