# ------------------------------------------------------------------------------
# Tests for the Fourier-series manifold.
# ------------------------------------------------------------------------------

import numpy as np

import helpers
from gridfree import geometry
from gridfree import manifold
from gridfree import utils


def reference_coefficients(s, P, L=8192):
    thetas = 2 * np.pi * np.arange(L) / L
    spectrum = np.fft.fft(np.exp(2j * np.pi * s.radius * np.cos(thetas - s.azimuth))) / L
    N = (P - 1) // 2
    return spectrum[np.arange(-N, N + 1) % L]


def test_origin_sensor_is_impulse():
    alpha = manifold.fs_coefficients(geometry.SensorPosition(0.0), 5)
    assert np.allclose(alpha, [0, 0, 1, 0, 0], atol=1e-15)


def test_matches_long_reference_dft():
    s = geometry.SensorPosition(2.0, 0.4)
    alpha = manifold.fs_coefficients(s, 63)
    assert np.max(np.abs(alpha - reference_coefficients(s, 63))) < 1e-9


def test_shift_theorem():
    P = 63
    k = np.arange(-31, 32)
    base = manifold.fs_coefficients(geometry.SensorPosition(1.0, 0.0), P)
    for phi in (0.3, -1.7, 2.9):
        shifted = manifold.fs_coefficients(geometry.SensorPosition(1.0, phi), P)
        assert np.max(np.abs(shifted - base * np.exp(-1j * k * phi))) < 1e-9


def test_magnitude_depends_only_on_radius():
    a = manifold.fs_coefficients(geometry.SensorPosition(1.5, 0.2), 63)
    b = manifold.fs_coefficients(geometry.SensorPosition(1.5, -2.4), 63)
    assert np.max(np.abs(np.abs(a) - np.abs(b))) < 1e-9


def test_parseval():
    for radius in (0.0, 0.7, 2.0):
        alpha = manifold.fs_coefficients(geometry.SensorPosition(radius, 1.0), 63)
        assert abs(np.sum(np.abs(alpha) ** 2) - 1.0) < 1e-9


def test_even_length_rejected():
    try:
        manifold.fs_coefficients(geometry.SensorPosition(1.0), 64)
    except utils.GridfreeError:
        return
    assert False, "expected GridfreeError"


def test_min_dft_length_fit():
    assert manifold.min_dft_length(2.0) == 59
    assert manifold.min_dft_length(2.0) <= 63
    assert manifold.min_dft_length(0.0) == 1
    assert manifold.min_dft_length(3.0) % 2 == 1


def test_scan_bandwidth_origin():
    assert manifold.scan_bandwidth(geometry.SensorPosition(0.0)) == 0


def test_scan_bandwidth_follows_linear_law():
    for radius in (2.0, 3.0, 4.0, 5.0):
        N = manifold.scan_bandwidth(geometry.SensorPosition(radius))
        assert abs(2 * N + 1 - (15.9 * radius + 27.03)) <= 4, (radius, N)


def test_scan_bandwidth_monotone():
    N2 = manifold.scan_bandwidth(geometry.SensorPosition(2.0))
    N3 = manifold.scan_bandwidth(geometry.SensorPosition(3.0))
    assert N3 >= N2


def test_scan_bandwidth_short_reference():
    try:
        manifold.scan_bandwidth(geometry.SensorPosition(2.0), oversample_P=32)
    except utils.GridfreeError as err:
        assert 'too short' in str(err)
        return
    assert False, "expected GridfreeError"


def test_scan_bandwidth_looser_threshold():
    loose = manifold.scan_bandwidth(geometry.SensorPosition(2.0), gamma_db=-60)
    tight = manifold.scan_bandwidth(geometry.SensorPosition(2.0), gamma_db=-160)
    assert loose < tight
    assert manifold.min_dft_length(2.0, gamma_db=-60) == 2 * loose + 1


def test_build_manifold_uca():
    g = geometry.make_uca(40, 2.0)
    model = manifold.build_manifold(g)
    assert model.P == 59 and model.N == 29
    assert model.G_hermitian.shape == (59, 40)
    model = manifold.build_manifold(g, P=63)
    assert model.P == 63
    assert np.array_equal(model.k, np.arange(-31, 32))
    assert not model.G_hermitian.flags.writeable


def test_build_manifold_origin():
    g = geometry.ArrayGeometry((geometry.SensorPosition(0.0),))
    model = manifold.build_manifold(g)
    assert model.P == 1
    assert np.allclose(model.G_hermitian, [[1.0]])


def test_build_manifold_below_minimum_is_honoured():
    model = manifold.build_manifold(geometry.make_uca(8, 2.0), P=21)
    assert model.P == 21


def test_reconstruction_uca():
    g = geometry.make_uca(40, 2.0)
    model = manifold.build_manifold(g, P=63)
    for seed in range(3):
        c = helpers.random_unit_vector(40, seed)
        assert manifold.reconstruction_error(g, model, c, n_grid=4096) < 1e-6


def test_reconstruction_other_geometries():
    for g in (geometry.make_rpa(30, 0.25, 2.0, seed=7), geometry.make_ula(8, 0.5), geometry.make_uca(12, 0.8)):
        model = manifold.build_manifold(g)
        c = helpers.random_unit_vector(g.M, 5)
        assert manifold.reconstruction_error(g, model, c) < 1e-6


def test_origin_column_is_impulse():
    sensors = (geometry.SensorPosition(0.0), geometry.SensorPosition(1.0, 0.5))
    model = manifold.build_manifold(geometry.ArrayGeometry(sensors))
    column = model.G_hermitian[:, 0]
    expected = np.zeros(model.P)
    expected[model.N] = 1.0
    assert np.allclose(column, expected, atol=1e-14)


def test_dual_coefficients_shape_checked():
    model = manifold.build_manifold(geometry.make_uca(4, 1.0))
    assert model.dual_coefficients(np.ones(4)).shape == (model.P,)
    try:
        model.dual_coefficients(np.ones(5))
    except utils.GridfreeError:
        return
    assert False, "expected GridfreeError"


def test_sensor_bandwidths_and_spectrum_table():
    g = geometry.ArrayGeometry((geometry.SensorPosition(0.0), geometry.SensorPosition(2.0, 1.0)))
    rows = manifold.sensor_bandwidths(g)
    assert rows[0] == (0.0, 0, 1)
    assert rows[1][0] == 2.0 and rows[1][2] == 2 * rows[1][1] + 1
    k, table = manifold.spectrum_table([0.0, 1.0, 2.0], 40)
    assert table.shape == (3, 81)
    assert np.array_equal(k, np.arange(-40, 41))
    assert abs(table[0, 40]) < 1e-9
    assert table[2, 40 + 35] < -160
