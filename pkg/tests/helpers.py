"""Shared random generators for the test suite."""

import numpy as np

from milneqed.spin_algebra import sl2c_boost, sl2c_rotation


def rand_null(rng, kmin=0.2, kmax=4.0):
    """Random null future-pointing four-vector, away from the -z axis."""
    while True:
        n = rng.normal(size=3)
        norm = np.linalg.norm(n)
        if norm < 1e-3:
            continue
        n = n / norm
        if n[2] < -0.999:
            continue
        k = rng.uniform(kmin, kmax)
        return np.array([k, *(k * n)])


def rand_sl2c(rng, max_rapidity=1.0, max_angle=2.0):
    """Random SL(2,C) element: moderate boost times rotation."""
    return (sl2c_boost(rng.normal(size=3), rng.uniform(-max_rapidity, max_rapidity))
            @ sl2c_rotation(rng.normal(size=3), rng.uniform(0.0, max_angle)))


def rand_unit_timelike(rng, max_rapidity=1.2):
    eta = rng.uniform(0.0, max_rapidity)
    n = rng.normal(size=3)
    n = n / np.linalg.norm(n)
    return np.array([np.cosh(eta), *(np.sinh(eta) * n)])
