# ------------------------------------------------------------------------------
# Single-snapshot measurement synthesis.
#
#   y = sum_l s_l a(theta_l) + n
#
# Sources are coherent: one snapshot, fixed relative phases. Noise is white
# circular complex Gaussian or spatially coloured with a 1/f power profile
# over the sensor-index spectrum. SNR is per sensor, 10 log10(|s|^2 / sigma^2),
# taken against the mean source power.
# ------------------------------------------------------------------------------

import dataclasses
import logging

import numpy as np

from . import geometry
from . import utils


logger = logging.getLogger(__name__)


NOISE_KINDS = ('white', 'one_over_f')


@dataclasses.dataclass(frozen=True)
class Source:
    doa_deg: float
    magnitude: float = 1.0
    phase_deg: float = 0.0

    def __post_init__(self):
        if not self.magnitude > 0:
            raise utils.GridfreeError("Source magnitude must be positive, got %r." % self.magnitude)
        object.__setattr__(self, 'doa_deg', float(utils.wrap_degrees(self.doa_deg)))

    @property
    def amplitude(self):
        return self.magnitude * np.exp(1j * np.radians(self.phase_deg))


@dataclasses.dataclass(frozen=True)
class NoiseSpec:
    kind: str = 'white'
    sigma_n: float = None
    snr_db: float = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise utils.GridfreeError("Unknown noise kind '%s' (expected one of %s)." % (self.kind, ', '.join(NOISE_KINDS)))
        if self.sigma_n is not None and self.snr_db is not None:
            raise utils.GridfreeError("Give either sigma_n or snr_db for the noise, not both.")
        if self.sigma_n is not None and self.sigma_n < 0:
            raise utils.GridfreeError("Noise sigma_n must be >= 0, got %r." % self.sigma_n)


# A complete simulation setup. The geometry is either an ArrayGeometry or a
# generator mapping such as {'uca': {'M': 40, 'radius': 2}} or a CSV path.
@dataclasses.dataclass(frozen=True)
class Scenario:
    geometry: object
    sources: tuple
    noise: NoiseSpec = NoiseSpec(sigma_n=0.0)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'sources', tuple(self.sources))

    def array(self):
        return geometry.from_spec(self.geometry)

    @property
    def doas_deg(self):
        return np.array([source.doa_deg for source in self.sources])

    @property
    def amplitudes(self):
        return np.array([source.amplitude for source in self.sources])

    # Per-sensor noise standard deviation implied by the noise spec.
    def sigma_n(self):
        if self.noise.sigma_n is not None:
            return float(self.noise.sigma_n)
        if self.noise.snr_db is not None:
            if not self.sources:
                raise utils.GridfreeError("An SNR needs at least one source to reference.")
            power = np.mean(np.abs(self.amplitudes) ** 2)
            return float(np.sqrt(power / 10 ** (self.noise.snr_db / 10)))
        return 0.0


def snr_to_sigma(snr_db, magnitude=1.0):
    return float(magnitude / 10 ** (snr_db / 20))


def white_noise(M, sigma_n, seed=None):
    rng = np.random.default_rng(seed)
    return sigma_n / np.sqrt(2) * (rng.standard_normal(M) + 1j * rng.standard_normal(M))


# Spatially coloured noise: white complex Gaussian samples are shaped in the
# sensor-index transform domain so that the expected power in bin f falls
# off as 1/|f| (the DC bin shares the weight of |f| = 1), then scaled so that
# E||n||^2 = M sigma_n^2.
def colored_noise(M, sigma_n, seed=None):
    if int(M) != M or M < 1:
        raise utils.GridfreeError("Sensor count must be a positive integer, got %r." % M)
    M = int(M)
    if sigma_n == 0:
        return np.zeros(M, dtype=complex)
    white = white_noise(M, 1.0, seed)
    f = np.abs(np.fft.fftfreq(M, d=1.0 / M))
    weight = 1.0 / np.sqrt(np.maximum(f, 1.0))
    scale = np.sqrt(M / np.sum(weight ** 2))
    shaped = np.fft.ifft(weight * np.fft.fft(white, norm='ortho'), norm='ortho')
    return sigma_n * scale * shaped


# Builds the snapshot for a scenario. Returns (y, sigma_n). A geometry may be
# passed in to skip regenerating it.
def synth_snapshot(sc, g=None):
    if g is None:
        g = sc.array()
    rng = np.random.default_rng(sc.seed)
    if sc.sources:
        A = geometry.steering_matrix(g, np.radians(sc.doas_deg))
        y = A @ sc.amplitudes
    else:
        y = np.zeros(g.M, dtype=complex)

    sigma_n = sc.sigma_n()
    if sigma_n > 0:
        if sc.noise.kind == 'white':
            y = y + white_noise(g.M, sigma_n, rng)
        else:
            y = y + colored_noise(g.M, sigma_n, rng)
    logger.debug("simulate: M=%d, %d sources, %s noise sigma=%.4g, seed %r",
                 g.M, len(sc.sources), sc.noise.kind, sigma_n, sc.seed)
    return y, sigma_n


# Two DOAs separated by separation_deg with the first uniform on the circle.
def random_pair(rng, separation_deg):
    first = rng.uniform(-180.0, 180.0)
    return float(utils.wrap_degrees(first)), float(utils.wrap_degrees(first + separation_deg))


# Map preset names to scenario builders.
presets = {}


def preset(name):

    def register_preset(func):
        presets[name] = func
        return func

    return register_preset


# Two close sources on a 40-sensor UCA in coloured noise.
@preset('two-close-uca')
def two_close_uca(seed=0):
    return Scenario(
        geometry={'uca': {'M': 40, 'radius': 2.0}},
        sources=(Source(40.0), Source(50.0, phase_deg=30.0)),
        noise=NoiseSpec('one_over_f', snr_db=20.0),
        seed=seed,
    )


# Five equal-magnitude sources at low SNR on a 40-sensor UCA.
@preset('five-source-uca')
def five_source_uca(seed=0):
    doas = (-10.7, 27.5, 40.0, 73.7, -151.1)
    phases = (0.0, 60.0, 120.0, 180.0, 240.0)
    return Scenario(
        geometry={'uca': {'M': 40, 'radius': 2.0}},
        sources=tuple(Source(doa, phase_deg=phase) for doa, phase in zip(doas, phases)),
        noise=NoiseSpec('white', snr_db=5.0),
        seed=seed,
    )


# Two close sources on a 30-sensor random planar array.
@preset('two-close-rpa')
def two_close_rpa(seed=0):
    return Scenario(
        geometry={'rpa': {'M': 30, 'min_spacing': 0.25, 'max_radius': 2.0, 'seed': 7}},
        sources=(Source(60.0), Source(70.0, phase_deg=45.0)),
        noise=NoiseSpec('white', snr_db=20.0),
        seed=seed,
    )


def make_preset(name, seed=0):
    if name not in presets:
        raise utils.GridfreeError("Unknown scenario preset '%s' (known: %s)." % (name, ', '.join(sorted(presets))))
    return presets[name](seed)
