# ------------------------------------------------------------------------------
# Shared helpers for the test modules.
# ------------------------------------------------------------------------------

import os
import sys

import numpy as np


# The test modules import the package from the repository root.
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


# Marks a test as slow. The harness runs these only when given --slow.
def slow(func):
    func.slow = True
    return func


# Largest circular distance (degrees) from each expected angle to the
# nearest found angle.
def worst_miss(found_deg, expected_deg):
    found = np.atleast_1d(np.asarray(found_deg, dtype=float))
    if len(found) == 0:
        return 180.0
    worst = 0.0
    for angle in expected_deg:
        gaps = np.abs((found - angle + 180.0) % 360.0 - 180.0)
        worst = max(worst, float(gaps.min()))
    return worst


def random_unit_vector(M, seed):
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(M) + 1j * rng.standard_normal(M)
    return c / np.linalg.norm(c)
