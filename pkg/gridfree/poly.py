# ------------------------------------------------------------------------------
# Rooting the nonnegative polynomial p(z) = 1 - |b(z)|^2.
#
# On the unit circle |b(e^{jt})|^2 = sum_k r_k e^{jkt} where r is the
# autocorrelation of the dual polynomial coefficients h. Source directions are
# among the angles of the unit-circle zeros of p.
# ------------------------------------------------------------------------------

import csv
import dataclasses
import logging

import numpy as np
import scipy.linalg

from . import manifold
from . import utils


logger = logging.getLogger(__name__)


DEFAULT_CIRCLE_TOL = 0.02
DEFAULT_CLUSTER_TOL_DEG = 0.5

# Coefficients below this fraction of the largest one count as zero.
TRIM_TOL = 1e-12

# Allowed undershoot of p below zero before we warn.
NEGATIVITY_TOL = 1e-7


# Coefficients of a Hermitian trigonometric polynomial indexed k = -D..D.
# Multiplying by z^D gives an ordinary polynomial of degree 2D with the same
# nonzero roots.
@dataclasses.dataclass
class TrigPolynomial:
    coeffs: np.ndarray
    degenerate: bool = False

    @property
    def D(self):
        return (len(self.coeffs) - 1) // 2

    # Real part of p(e^{jt}); the imaginary part vanishes by Hermitian symmetry.
    def evaluate(self, thetas):
        return manifold.evaluate_polynomial(self.coeffs, thetas)

    # Ascending-power coefficients of z^D p(z).
    def ordinary(self):
        return self.coeffs.copy()


@dataclasses.dataclass
class RootSet:
    roots: np.ndarray
    unit_circle_angles: np.ndarray
    circle_tol: float = DEFAULT_CIRCLE_TOL
    degenerate: bool = False

    @property
    def distances(self):
        return np.abs(np.abs(self.roots) - 1)

    @property
    def kept(self):
        return self.distances <= self.circle_tol

    @property
    def unit_circle_degrees(self):
        return np.degrees(self.unit_circle_angles)


# r_k = sum_j h_j conj(h_{j-k}) for k = -(P-1)..(P-1).
def autocorrelation(h):
    h = np.asarray(h, dtype=complex)
    if h.ndim != 1 or len(h) == 0:
        raise utils.GridfreeError("Autocorrelation needs a nonempty coefficient vector.")
    return np.convolve(h, h[::-1].conj())


def build_p(h):
    r = autocorrelation(h)
    coeffs = -r
    D = len(h) - 1
    coeffs[D] += 1.0
    # Exact Hermitian symmetry, c_{-k} = conj(c_k).
    coeffs = (coeffs + coeffs[::-1].conj()) / 2

    scale = max(1.0, float(np.abs(r).max()))
    degenerate = bool(np.abs(coeffs).max() <= TRIM_TOL * scale)
    p = TrigPolynomial(coeffs, degenerate)

    if not degenerate:
        n_grid = max(1024, 16 * len(coeffs))
        thetas = 2 * np.pi * np.arange(n_grid) / n_grid
        minimum = float(p.evaluate(thetas).real.min())
        if minimum < -NEGATIVITY_TOL:
            logger.warning("poly: p dips to %.3g below zero on the circle; the dual solution "
                           "is less accurate than the rooting assumes (tighten the solver tolerance).",
                           minimum)
    return p


# Roots of an ordinary polynomial given by ascending-power coefficients, via
# the eigenvalues of its companion matrix. LAPACK's geev balances the
# companion before reduction.
def polynomial_roots(ascending):
    a = np.asarray(ascending, dtype=complex)
    if len(a) == 0:
        return np.empty(0, dtype=complex)
    cutoff = TRIM_TOL * np.abs(a).max()
    nonzero = np.flatnonzero(np.abs(a) > cutoff)
    if len(nonzero) == 0:
        return np.empty(0, dtype=complex)
    # Trailing high powers lower the degree; leading low powers are roots at
    # the origin, far from the circle, and are dropped.
    a = a[nonzero[0]:nonzero[-1] + 1]
    if len(a) < 2:
        return np.empty(0, dtype=complex)
    return scipy.linalg.eigvals(scipy.linalg.companion(a[::-1]))


def find_unit_circle_angles(p, circle_tol=DEFAULT_CIRCLE_TOL, cluster_tol_deg=DEFAULT_CLUSTER_TOL_DEG):
    if p.degenerate:
        logger.warning("poly: p is identically zero; no roots to select")
        return RootSet(np.empty(0, dtype=complex), np.empty(0), circle_tol, degenerate=True)

    roots = polynomial_roots(p.ordinary())
    near = roots[np.abs(np.abs(roots) - 1) <= circle_tol]
    angles = cluster_angles(np.angle(near), np.radians(cluster_tol_deg))
    logger.debug("poly: %d roots, %d within %g of the circle, %d distinct angles",
                 len(roots), len(near), circle_tol, len(angles))
    return RootSet(roots, angles, circle_tol)


# Groups angles (radians) whose circular gaps are at most tol and collapses
# each group to its circular mean. Returns sorted angles in (-pi, pi].
def cluster_angles(angles, tol):
    angles = np.sort(utils.wrap_angle(np.atleast_1d(np.asarray(angles, dtype=float))))
    if len(angles) == 0:
        return angles

    groups = [[angles[0]]]
    for angle in angles[1:]:
        if angle - groups[-1][-1] <= tol:
            groups[-1].append(angle)
        else:
            groups.append([angle])

    # The first and last groups may meet across the +-pi seam.
    if len(groups) > 1 and groups[0][0] + 2 * np.pi - groups[-1][-1] <= tol:
        groups[0] = groups.pop() + groups[0]

    means = [np.angle(np.sum(np.exp(1j * np.array(group)))) for group in groups]
    return np.sort(utils.wrap_angle(np.array(means)))


# Debug dump of every root with its distance from the unit circle.
def write_roots_csv(rootset, path, config=None):
    with open(path, 'w', newline='', encoding='utf-8') as file:
        for line in utils.comment_lines(config):
            file.write(line + '\n')
        writer = csv.writer(file)
        writer.writerow(['re', 'im', 'modulus', 'angle_deg', 'distance', 'kept'])
        for root, distance, kept in zip(rootset.roots, rootset.distances, rootset.kept):
            writer.writerow(['%.12g' % root.real, '%.12g' % root.imag, '%.12g' % abs(root),
                             '%.6f' % np.degrees(np.angle(root)), '%.3g' % distance, int(kept)])
