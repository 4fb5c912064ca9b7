"""Loose empirical trends for the asymptotic costs; constants are not checked."""
import time

import numpy as np

from bosonbound.estimator import estimate_amplitude, make_plan
from bosonbound.optics import haar_random_unitary
from bosonbound.permanent import permanent_ryser


def best_of(fn, repeats=3):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def test_ryser_cost_grows_like_m2_2m():
    rng = np.random.default_rng(0)
    A14 = rng.standard_normal((14, 14)) + 0j
    A16 = rng.standard_normal((16, 16)) + 0j
    ratio = best_of(lambda: permanent_ryser(A16)) / best_of(lambda: permanent_ryser(A14))
    expected = 4 * (16 / 14) ** 2
    assert expected / 3 < ratio < expected * 3


def test_estimator_time_linear_in_samples():
    U = haar_random_unitary(5, 1)
    s, t = (2, 1, 0, 1, 1), (1, 1, 1, 1, 1)
    small = make_plan(s, t, 1.0, 0.5, samples=50_000)
    large = make_plan(s, t, 1.0, 0.5, samples=200_000)
    ratio = best_of(lambda: estimate_amplitude(U, s, t, large)) / best_of(lambda: estimate_amplitude(U, s, t, small))
    assert 2 < ratio < 8
