# ------------------------------------------------------------------------------
# Planar array geometries and their steering responses.
#
# Sensor positions are stored in polar form in wavelength units: a radius
# |p|/lambda and an azimuth angle(p) in radians. Frequency and propagation
# speed only ever enter through this ratio so neither is stored.
# ------------------------------------------------------------------------------

import dataclasses
import logging

import numpy as np

from . import utils


logger = logging.getLogger(__name__)


# Map generator names to registered generator functions.
generators = {}


# Decorator function for registering geometry generators.
def register(*names):

    def register_generator(func):
        for name in names:
            generators[name] = func
        return func

    return register_generator


# Builds a geometry using the generator registered under 'name'.
def make(name, *pargs, **kwargs):
    if name not in generators:
        raise utils.GridfreeError("Unrecognized geometry generator '%s'." % name)
    try:
        return generators[name](*pargs, **kwargs)
    except TypeError as err:
        raise utils.GridfreeError("Bad arguments for geometry '%s': %s" % (name, err))


@dataclasses.dataclass(frozen=True)
class SensorPosition:
    radius: float
    azimuth: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.radius) or self.radius < 0:
            raise utils.GridfreeError("Sensor radius must be finite and >= 0, got %r." % self.radius)
        if not np.isfinite(self.azimuth):
            raise utils.GridfreeError("Sensor azimuth must be finite, got %r." % self.azimuth)
        object.__setattr__(self, 'radius', float(self.radius))
        object.__setattr__(self, 'azimuth', utils.wrap_angle(self.azimuth))

    @classmethod
    def from_xy(cls, x, y):
        return cls(float(np.hypot(x, y)), float(np.arctan2(y, x)))

    @property
    def xy(self):
        return self.radius * np.cos(self.azimuth), self.radius * np.sin(self.azimuth)


# An ordered, immutable collection of sensors. The sensor order defines the
# row order of every steering matrix and the column order of the manifold.
@dataclasses.dataclass(frozen=True)
class ArrayGeometry:
    sensors: tuple

    def __post_init__(self):
        sensors = tuple(self.sensors)
        if len(sensors) < 1:
            raise utils.GridfreeError("A geometry needs at least one sensor.")
        for sensor in sensors:
            if not isinstance(sensor, SensorPosition):
                raise utils.GridfreeError("Expected SensorPosition, got %r." % (sensor,))
        object.__setattr__(self, 'sensors', sensors)

    def __len__(self):
        return len(self.sensors)

    def __str__(self):
        lines = ['ArrayGeometry (M=%d, max radius %.4f wavelengths)' % (self.M, self.max_radius)]
        for index, sensor in enumerate(self.sensors):
            lines.append('·  %3d  r=%.6f  az=%+.4f°' % (index, sensor.radius, np.degrees(sensor.azimuth)))
        return '\n'.join(lines)

    @classmethod
    def from_xy(cls, points):
        return cls(tuple(SensorPosition.from_xy(x, y) for x, y in points))

    @property
    def M(self):
        return len(self.sensors)

    @property
    def radii(self):
        return np.array([s.radius for s in self.sensors])

    @property
    def azimuths(self):
        return np.array([s.azimuth for s in self.sensors])

    @property
    def max_radius(self):
        return float(self.radii.max())

    @property
    def xy(self):
        return np.column_stack([self.radii * np.cos(self.azimuths),
                                self.radii * np.sin(self.azimuths)])


# Response of every sensor to a unit plane wave from azimuth theta (radians):
#
#   a_m(theta) = exp(-j 2pi r_m cos(theta - phi_m))
#
def steering_response(g, theta):
    theta = float(theta)
    if not np.isfinite(theta):
        raise utils.GridfreeError("Steering angle must be finite.")
    return np.exp(-2j * np.pi * g.radii * np.cos(theta - g.azimuths))


# Steering matrix with one column per angle (radians), shape (M, len(thetas)).
def steering_matrix(g, thetas):
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    phase = np.cos(thetas[np.newaxis, :] - g.azimuths[:, np.newaxis])
    return np.exp(-2j * np.pi * g.radii[:, np.newaxis] * phase)


# Rotates every sensor counterclockwise by phi radians.
def rotate(g, phi):
    return ArrayGeometry(tuple(SensorPosition(s.radius, s.azimuth + phi) for s in g.sensors))


def _check_count(M):
    if int(M) != M or M < 1:
        raise utils.GridfreeError("Sensor count must be a positive integer, got %r." % M)
    return int(M)


# Uniform circular array centred on the reference point. Sensor 0 sits at
# azimuth 0 and the rest follow counterclockwise at 2pi/M spacing.
@register('uca', 'circular')
def make_uca(M, radius):
    M = _check_count(M)
    if not radius > 0:
        raise utils.GridfreeError("UCA radius must be positive, got %r." % radius)
    azimuths = 2 * np.pi * np.arange(M) / M
    return ArrayGeometry(tuple(SensorPosition(radius, az) for az in azimuths))


# Uniform linear array along the x-axis with the reference at the first sensor.
@register('ula', 'linear')
def make_ula(M, spacing=0.5):
    M = _check_count(M)
    if not spacing > 0:
        raise utils.GridfreeError("ULA spacing must be positive, got %r." % spacing)
    return ArrayGeometry(tuple(SensorPosition(m * spacing, 0.0) for m in range(M)))


# Random planar array: M sensors drawn uniformly in the disk of radius
# max_radius by rejection sampling, keeping only candidates at least
# min_spacing from every sensor already placed. Deterministic for a seed.
@register('rpa', 'random')
def make_rpa(M, min_spacing=0.25, max_radius=2.0, seed=0, max_attempts=None):
    M = _check_count(M)
    if min_spacing < 0 or not max_radius > 0:
        raise utils.GridfreeError("RPA needs min_spacing >= 0 and max_radius > 0.")
    max_attempts = max_attempts or 2000 * M

    rng = np.random.default_rng(seed)
    points = np.empty((0, 2))
    attempts = 0
    while len(points) < M:
        if attempts >= max_attempts:
            raise utils.GridfreeError(
                "Could not pack %d sensors with spacing %g inside radius %g "
                "(placed %d after %d attempts)." % (M, min_spacing, max_radius, len(points), attempts))
        attempts += 1
        r = max_radius * np.sqrt(rng.uniform())
        phi = rng.uniform(-np.pi, np.pi)
        candidate = np.array([r * np.cos(phi), r * np.sin(phi)])
        if len(points) and np.min(np.hypot(*(points - candidate).T)) < min_spacing:
            continue
        points = np.vstack([points, candidate])

    logger.debug("rpa: placed %d sensors in %d attempts (seed %r)", M, attempts, seed)
    return ArrayGeometry.from_xy(points)


# Builds a geometry from a generator mapping like {'uca': {'M': 40, 'radius': 2}},
# a path to an x,y CSV file, or an existing ArrayGeometry.
def from_spec(spec):
    if isinstance(spec, ArrayGeometry):
        return spec
    if isinstance(spec, dict) and len(spec) == 1:
        (name, params), = spec.items()
        return make(name, **(params or {}))
    if isinstance(spec, str):
        return load_geometry(spec)
    raise utils.GridfreeError("Cannot build a geometry from %r." % (spec,))


# Reads sensor positions from a CSV file of x,y rows in wavelengths. A header
# line is allowed.
def load_geometry(path):
    try:
        points = np.loadtxt(path, delimiter=',', comments='#', ndmin=2,
                            skiprows=utils.header_rows(path))
    except ValueError as err:
        raise utils.GridfreeError("Malformed geometry file '%s': %s" % (path, err))
    if points.shape[1] != 2:
        raise utils.GridfreeError("Geometry file '%s' must have two columns (x, y)." % path)
    return ArrayGeometry.from_xy(points)


def save_geometry(g, path, config=None):
    header = '\n'.join(utils.comment_lines(config) + ['x,y'])
    np.savetxt(path, g.xy, delimiter=',', fmt='%.12g', header=header, comments='')


# Explicit sensor coordinates, as written into scenario files.
@register('points')
def make_points(xy):
    points = np.asarray(xy, dtype=float)
    if points.ndim != 2 or points.shape[1] != 2:
        raise utils.GridfreeError("Points must be a list of [x, y] pairs.")
    return ArrayGeometry.from_xy(points)
