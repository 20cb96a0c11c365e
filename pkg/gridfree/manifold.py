# ------------------------------------------------------------------------------
# Truncated Fourier-series representation of the array manifold.
#
# Each conjugate sensor response a*_m(theta) is 2pi-periodic and effectively
# band-limited, so the dual function S(theta)^H c can be written as a finite
# trigonometric polynomial sum_k h_k e^{jk theta} with h = G^H c. This module
# computes the columns of G^H, chooses the polynomial length P = 2N + 1 and
# evaluates the resulting polynomials.
# ------------------------------------------------------------------------------

import dataclasses
import logging

import numpy as np

from . import geometry
from . import utils


logger = logging.getLogger(__name__)


# Default squared-magnitude cutoff in dB below the spectral peak.
DEFAULT_GAMMA_DB = -160.0

# Length of the reference DFT used for bandwidth scans.
OVERSAMPLE_P = 8192

# Linear fit of the minimum P against radius, valid for gamma = -160 dB and
# radii of at least two wavelengths.
FIT_SLOPE = 15.9
FIT_INTERCEPT = 27.03
FIT_MIN_RADIUS = 2.0


@dataclasses.dataclass(frozen=True)
class ManifoldModel:
    G_hermitian: np.ndarray
    P: int
    N: int
    gamma_db: float = DEFAULT_GAMMA_DB

    def __post_init__(self):
        if self.P != 2 * self.N + 1 or self.P < 1:
            raise utils.GridfreeError("Manifold needs P = 2N + 1 >= 1, got P=%r N=%r." % (self.P, self.N))
        if self.G_hermitian.shape[0] != self.P:
            raise utils.GridfreeError("G^H has %d rows, expected P=%d." % (self.G_hermitian.shape[0], self.P))
        self.G_hermitian.setflags(write=False)

    @property
    def M(self):
        return self.G_hermitian.shape[1]

    # Row index k of G^H, running -N..N top to bottom.
    @property
    def k(self):
        return np.arange(-self.N, self.N + 1)

    # Dual polynomial coefficients h = G^H c.
    def dual_coefficients(self, c):
        c = np.asarray(c, dtype=complex)
        if c.shape != (self.M,):
            raise utils.GridfreeError("Dual vector has shape %s, expected (%d,)." % (c.shape, self.M))
        return self.G_hermitian @ c

    # Evaluates sum_k h_k e^{jk theta} on the given angles (radians).
    def evaluate(self, h, thetas):
        return evaluate_polynomial(h, thetas)


# Evaluates a centred trigonometric polynomial with odd-length coefficients
# indexed k = -N..N at the given angles (radians).
def evaluate_polynomial(h, thetas):
    h = np.asarray(h, dtype=complex)
    N = (len(h) - 1) // 2
    k = np.arange(-N, N + 1)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    return np.exp(1j * np.outer(thetas, k)) @ h


def _check_odd(P):
    if int(P) != P or P < 1 or P % 2 == 0:
        raise utils.GridfreeError("DFT length P must be a positive odd integer, got %r." % P)
    return int(P)


# P-point DFT estimate of the Fourier-series coefficients of a*(theta) for a
# single sensor. Samples are taken at theta_l = 2pi l / P; circular indexing
# lets the FFT run over l = 0..P-1 and fftshift reorders bins to k = -N..N.
def fs_coefficients(s, P):
    P = _check_odd(P)
    thetas = 2 * np.pi * np.arange(P) / P
    samples = np.exp(2j * np.pi * s.radius * np.cos(thetas - s.azimuth))
    return np.fft.fftshift(np.fft.fft(samples)) / P


# Largest Fourier index N whose squared coefficient magnitude lies within
# |gamma_db| of the spectral peak, found with a long reference DFT. The
# reference length need not be odd; its bins are indexed by signed frequency.
def scan_bandwidth(s, gamma_db=DEFAULT_GAMMA_DB, oversample_P=OVERSAMPLE_P):
    L = int(oversample_P)
    if L < 3:
        raise utils.GridfreeError("Reference DFT length must be at least 3, got %r." % oversample_P)
    power = _reference_power(s.radius, L)
    k = np.fft.fftfreq(L, d=1.0 / L).astype(int)
    above = power >= power.max() * 10 ** (-abs(gamma_db) / 10)
    N = int(np.abs(k[above]).max())
    if N >= L // 2 - 1:
        raise utils.GridfreeError(
            "Reference DFT of length %d is too short for radius %g at %g dB: the spectrum "
            "is still above threshold at its edge (|k| = %d). Increase oversample_P or "
            "raise gamma_db." % (L, s.radius, gamma_db, N))
    return N


# Squared magnitudes of a long DFT of a*(theta) for a sensor at azimuth zero.
# The magnitude spectrum does not depend on azimuth.
def _reference_power(radius, L):
    thetas = 2 * np.pi * np.arange(L) / L
    samples = np.exp(2j * np.pi * radius * np.cos(thetas))
    return np.abs(np.fft.fft(samples) / L) ** 2


# Minimum odd DFT length for a sensor at max_radius. Uses the linear fit where
# it is valid and falls back to a direct spectral scan everywhere else.
def min_dft_length(max_radius, gamma_db=DEFAULT_GAMMA_DB):
    if not max_radius >= 0:
        raise utils.GridfreeError("Radius must be >= 0, got %r." % max_radius)
    if gamma_db == DEFAULT_GAMMA_DB and max_radius >= FIT_MIN_RADIUS:
        return utils.next_odd(FIT_SLOPE * max_radius + FIT_INTERCEPT)
    N = scan_bandwidth(geometry.SensorPosition(max_radius), gamma_db)
    return 2 * N + 1


# Builds G^H for a geometry. P is chosen from the farthest sensor unless an
# explicit odd override is given.
def build_manifold(g, gamma_db=DEFAULT_GAMMA_DB, P=None):
    P_min = min_dft_length(g.max_radius, gamma_db)
    if P is None:
        P = P_min
    else:
        P = _check_odd(P)
        if P < P_min:
            logger.warning("P=%d is below the minimum DFT length %d for radius %.4f; "
                           "the dual polynomial will be truncated.", P, P_min, g.max_radius)
    columns = [fs_coefficients(sensor, P) for sensor in g.sensors]
    G_hermitian = np.column_stack(columns)
    logger.debug("manifold: M=%d P=%d (minimum %d) gamma=%g dB", g.M, P, P_min, gamma_db)
    return ManifoldModel(G_hermitian, P, (P - 1) // 2, gamma_db)


# Maximum deviation between the dual polynomial built from G^H c and the
# directly evaluated dual function S(theta)^H c on an n-point grid.
def reconstruction_error(g, model, c, n_grid=None):
    n_grid = n_grid or 10 * model.P
    thetas = 2 * np.pi * np.arange(n_grid) / n_grid - np.pi
    direct = geometry.steering_matrix(g, thetas).conj().T @ np.asarray(c, dtype=complex)
    truncated = model.evaluate(model.dual_coefficients(c), thetas)
    return float(np.max(np.abs(truncated - direct)))


# Per-sensor bandwidth table: (radius, N, P) for every sensor.
def sensor_bandwidths(g, gamma_db=DEFAULT_GAMMA_DB):
    rows = []
    cache = {}
    for sensor in g.sensors:
        if sensor.radius not in cache:
            cache[sensor.radius] = scan_bandwidth(geometry.SensorPosition(sensor.radius), gamma_db)
        N = cache[sensor.radius]
        rows.append((sensor.radius, N, 2 * N + 1))
    return rows


# Squared FS coefficient magnitudes in dB against radius and index k, the
# data behind a bandwidth heat map. Returns (k, table) with one row per radius.
def spectrum_table(radii, k_max, floor_db=-300.0):
    L = OVERSAMPLE_P
    k = np.arange(-k_max, k_max + 1)
    rows = []
    for radius in radii:
        power = _reference_power(radius, L)
        with np.errstate(divide='ignore'):
            db = 10 * np.log10(power[k % L])
        rows.append(np.maximum(db, floor_db))
    return k, np.array(rows)
