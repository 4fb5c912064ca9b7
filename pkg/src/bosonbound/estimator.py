"""Randomised estimation of transition amplitudes and repeated-index permanents.

Samples are drawn uniformly from the weighted roots-of-unity grid.  Each
sample costs ``O(m^2)``; ``T = ceil(1/(delta eps^2))`` samples put the mean
within ``eps`` times the per-sample magnitude bound with probability at least
``1 - delta`` (Chebyshev).

Sampling is split into fixed-size blocks.  Block ``c`` draws from a Philox
stream keyed by ``(seed, c)`` and block sums are reduced in block order, so
the estimate is bit-identical for any worker count.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

import numpy as np

from .permanent import as_matrix, glynn_term
from ._grid import SamplingDomain, grid_sum, sqrt_factorials, summands
from .amplitude import AmplitudeResult, _prepare, amplitude_exact, default_grid_order
from .errors import DomainError, UnsupportedError
from .fockspace import (OccupationVector, as_occupation, log_v_factor,
                        transition_bound, v_factor)

RNG_NAME = "numpy.random.Philox (4x64, SeedSequence(seed, spawn_key=(block,)))"
SAMPLE_BLOCK = 4096
REFERENCE_CAP = 10
CONVERGENCE_COLUMNS = ("T", "mean_abs_error", "failure_rate", "bound_radius")

__all__ = [
    "SamplingDomain", "EstimatorPlan", "mgen_gly", "gen_gly", "gly",
    "plan_samples", "make_plan", "estimate_amplitude", "estimate_permanent_repeated",
    "spectral_norm", "convergence_study", "convergence_csv", "loglog_slope",
]


@dataclass(frozen=True)
class EstimatorPlan:
    samples: int
    epsilon: float
    delta: float
    orientation: str = "forward"
    seed: int = 0
    grid_order: Optional[int] = None

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError("sample count must be positive")
        if self.orientation not in ("forward", "reversed"):
            raise DomainError(f"orientation must be 'forward' or 'reversed', got {self.orientation!r}")


def plan_samples(epsilon: float, delta: float) -> EstimatorPlan:
    """Chebyshev sample count ``T = ceil(1/(delta eps^2))``."""
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    # tiny slack absorbs float noise such as 1/(0.05*0.01) = 2000.0000000000002
    raw = 1.0 / (delta * epsilon * epsilon)
    T = max(1, math.ceil(raw * (1 - 1e-12)))
    return EstimatorPlan(samples=T, epsilon=epsilon, delta=delta)


def make_plan(s, t, epsilon: float, delta: float, seed: int = 0,
              grid_order: Optional[int] = None, samples: Optional[int] = None,
              orientation: str = "auto") -> EstimatorPlan:
    """Full plan: sample count, orientation, seed and ``d``.

    ``orientation="auto"`` picks the direction with the smaller per-sample
    bound.  With ``samples`` given, ``epsilon`` is ignored and recomputed as
    ``1/sqrt(delta T)``.
    """
    if samples is not None:
        if not 0 < delta < 1:
            raise DomainError(f"delta must lie in (0, 1), got {delta}")
        plan = EstimatorPlan(samples=int(samples), epsilon=1.0 / math.sqrt(delta * samples), delta=delta)
    else:
        plan = plan_samples(epsilon, delta)
    bound = transition_bound(s, t)
    if orientation == "auto":
        orientation = "forward" if bound.forward_is_tighter else "reversed"
    return replace(plan, orientation=orientation, seed=int(seed) & (2**64 - 1), grid_order=grid_order)


def mgen_gly(W, s, t, z) -> complex:
    """``v_s^2 prod_k conj(z_k)^s_k prod_i (sum_j w_ij z_j)^t_i`` at one point ``z``."""
    A = as_matrix(W)
    s, t = as_occupation(s), as_occupation(t)
    z = np.asarray(z, dtype=np.complex128)
    if not (A.shape[0] == s.modes == t.modes == z.shape[0]):
        raise DomainError(
            f"length mismatch: matrix {A.shape[0]}, s {s.modes}, t {t.modes}, z {z.shape[0]}"
        )
    vs2 = v_factor(s) ** 2
    y = A @ z
    return complex(vs2 * np.prod(np.conj(z) ** np.array(s.counts)) * np.prod(y ** np.array(t.counts)))


def gen_gly(W, s, z) -> complex:
    """Generalised Glynn estimator with single-occupied columns, ``t = (1,...,1)``."""
    A = as_matrix(W)
    s = as_occupation(s)
    z = np.asarray(z, dtype=np.complex128)
    return complex(v_factor(s) ** 2 * np.prod(np.conj(z) ** np.array(s.counts)) * np.prod(A @ z))


def gly(W, x) -> complex:
    """Glynn's estimator ``x_1...x_m prod_i (sum_j w_ij x_j)``."""
    return glynn_term(W, x)


def spectral_norm(W, tol: float = 1e-10, max_iter: int = 10_000) -> float:
    """Largest singular value by power iteration on ``W^dag W``."""
    A = as_matrix(W)
    if A.size == 0:
        return 0.0
    M = A.conj().T @ A
    x = np.ones(A.shape[0], dtype=np.complex128) / math.sqrt(A.shape[0])
    # a structured start vector can be orthogonal to the top singular vector
    x += 1e-3 * np.exp(1j * np.arange(A.shape[0]))
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(max_iter):
        y = M @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        new = float(np.real(np.vdot(x, y)))
        x = y / norm
        if abs(new - lam) <= tol * max(new, 1e-300):
            lam = new
            break
        lam = new
    return math.sqrt(max(lam, 0.0))


def _block_stats(W, domain, powers, seed, block, count):
    ss = np.random.SeedSequence(seed, spawn_key=(block,))
    rng = np.random.Generator(np.random.Philox(ss))
    k = rng.integers(0, domain.grid_order, size=(count, domain.modes))
    vals = summands(W, domain, powers, k)
    mean = complex(vals.mean())
    return count, mean, float(np.sum(np.abs(vals - mean) ** 2))


def _sample_mean(W, domain, powers, T, seed, workers):
    blocks = [(b, min(SAMPLE_BLOCK, T - b * SAMPLE_BLOCK)) for b in range((T + SAMPLE_BLOCK - 1) // SAMPLE_BLOCK)]

    def run(item):
        return _block_stats(W, domain, powers, seed, *item)

    workers = max(1, min(int(workers), len(blocks)))
    if workers == 1:
        stats = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, blocks))
    # pairwise merge of (count, mean, centred sum of squares), in block order
    n_acc, mean, m2 = 0, 0j, 0.0
    for n_b, mean_b, m2_b in stats:
        n_new = n_acc + n_b
        delta = mean_b - mean
        mean = mean + delta * (n_b / n_new)
        m2 = m2 + m2_b + abs(delta) ** 2 * n_acc * n_b / n_new
        n_acc = n_new
    return mean, m2 / T


def _oriented(A, s, t, orientation):
    # forward: average of summands over grid(s) with matrix A^T is Perm(A_{s,t});
    # reversed: same for conj(A) over grid(t), giving conj(Perm(A_{s,t}))
    if orientation == "forward":
        return A.T, s, t, False
    return A.conj(), t, s, True


def estimate_amplitude(U, s, t, plan: EstimatorPlan, workers: int = 1,
                       full_grid: bool = False, check_unitary: bool = True) -> AmplitudeResult:
    """Monte Carlo estimate of ``<s|U|t>``.

    ``full_grid`` replaces random draws by systematic enumeration of all
    ``d^m`` grid points, which returns the exact amplitude.
    """
    A, s, t = _prepare(U, s, t, check_unitary)
    bound = transition_bound(s, t)
    d = plan.grid_order or default_grid_order(s)
    W, weights, powers, conjugate = _oriented(A, s, t, plan.orientation)
    domain = SamplingDomain(weights, d)
    ratio = bound.forward_ratio if plan.orientation == "forward" else bound.reverse_ratio
    norm_factor = 1.0 if check_unitary else spectral_norm(A) ** s.total()
    per_sample = ratio * norm_factor
    norm = sqrt_factorials(s, t)
    diag = {"grid_order": d, "orientation": plan.orientation, "seed": plan.seed, "rng": RNG_NAME}

    if s.total() == 0:
        return AmplitudeResult(1 + 0j, "sampled", 0.0, 0.0, {**diag, "samples": plan.samples})
    if full_grid:
        g = grid_sum(W, domain, powers) / domain.size
        value = g.conjugate() if conjugate else g
        return AmplitudeResult(value / norm, "theorem1_enumeration", 0.0, per_sample,
                               {**diag, "samples": domain.size})

    mean, var = _sample_mean(W, domain, powers, plan.samples, plan.seed, workers)
    value = (mean.conjugate() if conjugate else mean) / norm
    diag.update(samples=plan.samples, empirical_variance=var / norm**2)
    return AmplitudeResult(value, "sampled", plan.epsilon * per_sample, per_sample, diag)


def permanent_error_radius(W, s, t, epsilon: float) -> float:
    """``eps ||W||^n v_s^2 prod_k sqrt(s_k^s_k t_k^t_k)``."""
    s, t = as_occupation(s), as_occupation(t)
    log_pow = 0.5 * sum(c * math.log(c) for c in (*s, *t) if c > 0)
    return epsilon * spectral_norm(W) ** s.total() * math.exp(2 * log_v_factor(s) + log_pow)


def estimate_permanent_repeated(W, s, t, plan: EstimatorPlan, workers: int = 1,
                                full_grid: bool = False) -> tuple[complex, float]:
    """Estimate ``Perm(W_{s,t})`` for an arbitrary square ``W``.

    Returns ``(estimate, additive error radius)``; the radius is zero for a
    full-grid evaluation.
    """
    A, s, t = _prepare(W, s, t, check_unitary=False)
    if s.total() == 0:
        return 1 + 0j, 0.0
    d = plan.grid_order or default_grid_order(s)
    domain = SamplingDomain(s, d)
    if full_grid:
        return grid_sum(A.T, domain, t) / domain.size, 0.0
    mean, _ = _sample_mean(A.T, domain, t, plan.samples, plan.seed, workers)
    return mean, permanent_error_radius(A, s, t, plan.epsilon)


@dataclass(frozen=True)
class ConvergenceRow:
    T: int
    mean_abs_error: float
    failure_rate: float
    bound_radius: float


def _repeat_seed(seed: int, row: int, rep: int) -> int:
    ss = np.random.SeedSequence(seed, spawn_key=(row, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def convergence_study(U, s, t, T_values: Sequence[int], repeats: int, seed: int = 0,
                      delta: float = 0.1, grid_order: Optional[int] = None,
                      workers: int = 1, orientation: str = "auto") -> list[ConvergenceRow]:
    """Empirical error of the estimator against the exact amplitude.

    For each ``T`` the tolerance is ``eps_T * ratio`` with
    ``eps_T = 1/sqrt(delta T)`` and ``ratio`` the per-sample bound of the
    chosen orientation, i.e. the Chebyshev radius at confidence ``1 - delta``;
    ``failure_rate`` should therefore stay below ``delta``.
    """
    A, s, t = _prepare(U, s, t, check_unitary=True)
    if repeats < 1:
        raise DomainError("repeats must be at least 1")
    if not T_values:
        raise DomainError("need at least one sample count")
    if s.total() > REFERENCE_CAP:
        raise UnsupportedError(
            f"no exact reference for n={s.total()} (cap {REFERENCE_CAP})"
        )
    exact = amplitude_exact(A, s, t).value
    rows = []
    for i, T in enumerate(T_values):
        base = make_plan(s, t, 1.0, delta, grid_order=grid_order, samples=int(T),
                         orientation=orientation)
        bound = transition_bound(s, t)
        ratio = bound.forward_ratio if base.orientation == "forward" else bound.reverse_ratio
        radius = base.epsilon * ratio
        errors = np.empty(repeats)
        for r in range(repeats):
            plan = replace(base, seed=_repeat_seed(seed, i, r))
            errors[r] = abs(estimate_amplitude(A, s, t, plan, workers=workers).value - exact)
        rows.append(ConvergenceRow(int(T), float(errors.mean()),
                                   float(np.mean(errors > radius)), radius))
    return rows


def convergence_csv(rows: Iterable[ConvergenceRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CONVERGENCE_COLUMNS)
    for r in rows:
        writer.writerow([r.T, repr(r.mean_abs_error), repr(r.failure_rate), repr(r.bound_radius)])
    return buf.getvalue()


def loglog_slope(rows: Sequence[ConvergenceRow]) -> float:
    """Least-squares slope of ``log(mean_abs_error)`` against ``log(T)``."""
    x = np.log([r.T for r in rows])
    y = np.log([r.mean_abs_error for r in rows])
    return float(np.polyfit(x, y, 1)[0])
