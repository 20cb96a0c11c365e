# ------------------------------------------------------------------------------
# Tests for sparse pruning over the augmented dictionary.
# ------------------------------------------------------------------------------

import os
import tempfile

import numpy as np

import helpers
from gridfree import geometry
from gridfree import prune
from gridfree import utils


# Sources at 40 and 120 degrees plus a fixed spread of fill angles at least
# 10 degrees away from both.
def fixed_dictionary(g):
    fill = [a for a in np.arange(-175.0, 180.0, 10.0) if min(abs(a - 40.0), abs(a - 120.0)) >= 10.0]
    angles = np.radians(np.concatenate([[40.0, 120.0], fill]))
    return prune.AugmentedDictionary(angles, geometry.steering_matrix(g, angles), 2)


def two_sources(g, noise=0.0, seed=0):
    y = geometry.steering_matrix(g, np.radians([40.0, 120.0])) @ np.array([1.0, 0.8 * np.exp(1j)])
    return y + noise * np.sqrt(g.M) * helpers.random_unit_vector(g.M, seed)


def test_dictionary_sizes():
    g = geometry.make_uca(8, 1.0)
    d = prune.build_dictionary(g, np.radians([40.0, 50.0]), n_fill=0)
    assert d.D == 2 and d.A.shape == (8, 2)
    d = prune.build_dictionary(g, [], n_fill=100)
    assert d.D == 100 and d.n_candidates == 0
    d = prune.build_dictionary(g, np.radians([10.0 * i for i in range(8)]), n_fill=180)
    assert d.D == 188


def test_dictionary_candidates_once_and_fill_resampled():
    g = geometry.make_uca(8, 1.0)
    candidates = np.radians(np.arange(-180.0, 180.0, 1.0) + 0.5)
    d = prune.build_dictionary(g, candidates, n_fill=50, rng_seed=3, cluster_tol_deg=0.3)
    assert np.allclose(d.angles[:len(candidates)], utils.wrap_angle(candidates))
    fill = d.angles[len(candidates):]
    gaps = utils.angular_distance(fill[:, np.newaxis], candidates[np.newaxis, :]).min(axis=1)
    assert np.all(gaps > np.radians(0.3))
    assert np.allclose(np.abs(d.A), 1.0)


def test_dictionary_deterministic():
    g = geometry.make_uca(8, 1.0)
    a = prune.build_dictionary(g, [0.3], n_fill=20, rng_seed=9)
    b = prune.build_dictionary(g, [0.3], n_fill=20, rng_seed=9)
    assert np.array_equal(a.angles, b.angles)


def test_zero_snapshot():
    g = geometry.make_uca(8, 1.0)
    d = prune.build_dictionary(g, [0.3, 1.2], n_fill=10)
    result = prune.lasso_prune(np.zeros(8), d, 0.5)
    assert np.all(result.x_star == 0)
    assert len(result.support) == 0 and len(result.angles) == 0


def test_exact_support_noiseless():
    g = geometry.make_uca(24, 1.5)
    d = fixed_dictionary(g)
    result = prune.lasso_prune(two_sources(g), d, 0.05)
    assert sorted(result.support.tolist()) == [0, 1]
    assert np.allclose(sorted(result.degrees), [40.0, 120.0])


def test_exact_support_squared_residual():
    g = geometry.make_uca(24, 1.5)
    d = fixed_dictionary(g)
    result = prune.lasso_prune(two_sources(g), d, 0.05, squared=True)
    assert sorted(result.support.tolist()) == [0, 1]


def test_support_shrinks_with_beta():
    g = geometry.make_uca(24, 1.5)
    d = fixed_dictionary(g)
    y = two_sources(g, noise=0.05, seed=1)
    sizes = [len(prune.lasso_prune(y, d, beta).support) for beta in (0.05, 0.5, 1.5, 3.5)]
    assert all(b <= a for a, b in zip(sizes, sizes[1:])), sizes
    assert sizes[-1] == 0


def test_beta_must_be_positive():
    g = geometry.make_uca(8, 1.0)
    d = prune.build_dictionary(g, [0.3], n_fill=5)
    try:
        prune.lasso_prune(np.ones(8), d, 0.0)
    except utils.GridfreeError:
        return
    assert False, "expected GridfreeError"


def test_default_beta():
    assert abs(prune.default_beta(181, 40) - 0.5 * np.sqrt(np.log(181))) < 1e-12
    assert abs(prune.default_beta(181, 40, delta=2.0, squared=True) - 2.0 * np.sqrt(np.log(181))) < 1e-12
    assert abs(prune.default_beta(188, 8) - 0.5 * 0.4 * np.sqrt(8)) < 1e-12
    assert prune.default_beta(188, 8) < prune.default_beta(188, 12) < prune.default_beta(188, 40)
    assert prune.default_beta(1, 1) > 0


def test_write_profile_csv():
    g = geometry.make_uca(24, 1.5)
    d = fixed_dictionary(g)
    result = prune.lasso_prune(two_sources(g), d, 0.05)
    with tempfile.TemporaryDirectory() as directory:
        path = os.path.join(directory, 'profile.csv')
        prune.write_profile_csv(result, path)
        with open(path) as file:
            lines = file.read().splitlines()
    assert lines[0] == 'angle_deg,magnitude,candidate,support'
    assert len(lines) == d.D + 1
    assert sum(line.endswith(',1,1') for line in lines[1:]) == 2
    angles = [float(line.split(',')[0]) for line in lines[1:]]
    assert angles == sorted(angles)


# A pruning result with the given magnitudes placed on chosen dictionary
# columns; candidates come first.
def hand_result(g, candidates_deg, fill_deg, weights):
    angles = np.radians(np.concatenate([candidates_deg, fill_deg]))
    d = prune.AugmentedDictionary(angles, geometry.steering_matrix(g, angles), len(candidates_deg))
    x_star = np.zeros(d.D, dtype=complex)
    for index, weight in weights.items():
        x_star[index] = weight
    support = np.array(sorted(weights), dtype=int)
    return prune.PruneResult(x_star, support, angles[support], 0.5, 0.0, d)


def test_fill_atom_next_to_candidate_is_merged():
    g = geometry.make_uca(40, 2.0)
    result = hand_result(g, [-10.49, 27.48, 38.56], [28.92, -90.0], {0: 1.0, 1: 0.3, 2: 0.7, 3: 0.6})
    survivors = prune.surviving_candidates(result)
    assert list(survivors) == [0, 1, 2]
    assert np.allclose(np.sort(np.degrees(result.dictionary.angles[survivors])), [-10.49, 27.48, 38.56])


def test_orphan_fill_atom_credits_nothing():
    g = geometry.make_uca(40, 2.0)
    result = hand_result(g, [40.0, 120.0], [-90.0], {0: 1.0, 2: 2.0})
    assert list(prune.surviving_candidates(result)) == [0]


def test_unsupported_candidates_dropped():
    g = geometry.make_uca(24, 1.5)
    result = hand_result(g, [40.0, 120.0, -60.0], [], {1: 0.7})
    assert list(prune.surviving_candidates(result)) == [1]
    empty = hand_result(g, [40.0], [], {})
    assert len(prune.surviving_candidates(empty)) == 0


def test_mirror_candidates_on_linear_array():
    g = geometry.make_ula(10, 0.5)
    result = hand_result(g, [50.0, -50.01, 110.0], [], {0: 0.4, 1: 0.6, 2: 1.5})
    survivors = prune.surviving_candidates(result)
    assert list(survivors) == [2, 1]


def test_survivors_capped():
    g = geometry.make_uca(4, 1.0)
    candidates = [-150.0, -90.0, -30.0, 30.0, 90.0, 150.0]
    result = hand_result(g, candidates, [], {i: 1.0 + i for i in range(6)})
    survivors = prune.surviving_candidates(result, max_count=4)
    assert list(survivors) == [5, 4, 3, 2]
