"""Weighted roots-of-unity grid and the vectorised summand over it.

Each grid point is encoded by integer exponents ``k_j`` in ``[0, d)`` with
``z_j = sqrt(w_j) * omega**k_j`` and ``omega = exp(-2 pi i / d)``.  Summands
are formed in log-magnitude/phase form; the prefactor ``v**2 prod w_j**(w_j/2)``
and the row products overflow doubles long before the summand itself does.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SizeError
from .fockspace import OccupationVector, log_v_factor

GRID_CAP = 10**7
GRID_CHUNK = 1 << 14


@dataclass(frozen=True)
class SamplingDomain:
    """Per-mode support ``{sqrt(s_j) omega**k : k = 0..d-1}``."""

    weights: OccupationVector
    grid_order: int

    def __post_init__(self):
        n = self.weights.total()
        if self.grid_order <= n:
            raise DomainError(
                f"grid order d={self.grid_order} must exceed the boson number n={n} "
                "(degree condition of the roots-of-unity expansion)"
            )

    @property
    def modes(self) -> int:
        return self.weights.modes

    @property
    def omega(self) -> complex:
        return complex(np.exp(-2j * np.pi / self.grid_order))

    @property
    def mode_weights(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.weights.counts, dtype=float))

    @property
    def size(self) -> int:
        return self.grid_order**self.modes

    def support(self, j: int) -> np.ndarray:
        k = np.arange(self.grid_order)
        return self.mode_weights[j] * np.exp(-2j * np.pi * k / self.grid_order)

    def points(self, k: np.ndarray) -> np.ndarray:
        """Complex grid points for an ``(B, m)`` array of exponents."""
        k = np.asarray(k)
        return self.mode_weights * np.exp(-2j * np.pi * k / self.grid_order)

    def exponents(self, start: int, stop: int) -> np.ndarray:
        """Exponent rows for flat indices ``start..stop-1`` (mode 0 most significant)."""
        flat = np.arange(start, stop, dtype=np.int64)
        out = np.empty((flat.size, self.modes), dtype=np.int64)
        for j in range(self.modes - 1, -1, -1):
            out[:, j] = flat % self.grid_order
            flat //= self.grid_order
        return out


def summands(W: np.ndarray, domain: SamplingDomain, powers: OccupationVector, k: np.ndarray) -> np.ndarray:
    """``v**2 prod_j conj(z_j)**w_j prod_i (sum_j W_ij z_j)**p_i`` for each exponent row.

    ``w`` are the domain weights and ``p`` the row powers.
    """
    s = np.asarray(domain.weights.counts, dtype=np.int64)
    p = np.asarray(powers.counts, dtype=np.int64)
    d = domain.grid_order
    k = np.atleast_2d(k)
    z = domain.points(k)
    y = z @ W.T

    occupied = s > 0
    log_pref = 2.0 * log_v_factor(domain.weights) + 0.5 * float(
        np.sum(s[occupied] * np.log(s[occupied]))
    )
    # conj(omega**k)**s = exp(+2 pi i k s / d); reduce mod d in integers
    phase = 2.0 * np.pi * ((k * s).sum(axis=1) % d) / d

    active = p > 0
    ya = y[:, active]
    pa = p[active].astype(float)
    with np.errstate(divide="ignore"):
        log_abs = log_pref + (pa * np.log(np.abs(ya))).sum(axis=1)
    phase = phase + (pa * np.angle(ya)).sum(axis=1)
    return np.exp(log_abs) * np.exp(1j * phase)


def grid_sum(W: np.ndarray, domain: SamplingDomain, powers: OccupationVector,
             grid_cap: int = GRID_CAP, collect_abs_max: bool = False):
    """Exhaustive sum of :func:`summands` over the whole grid.

    Returns the sum, or ``(sum, max |summand|)`` with ``collect_abs_max``.
    """
    total_points = domain.size
    if total_points > grid_cap:
        raise SizeError(f"grid of d^m = {total_points} points exceeds cap {grid_cap}")
    acc = 0j
    peak = 0.0
    for start in range(0, total_points, GRID_CHUNK):
        vals = summands(W, domain, powers, domain.exponents(start, min(start + GRID_CHUNK, total_points)))
        acc += complex(vals.sum())
        if collect_abs_max:
            peak = max(peak, float(np.abs(vals).max()))
    if collect_abs_max:
        return acc, peak
    return acc


def sqrt_factorials(s: OccupationVector, t: OccupationVector) -> float:
    """``sqrt(prod s_k! prod t_k!)`` evaluated through lgamma."""
    return math.exp(0.5 * sum(math.lgamma(c + 1) for c in (*s, *t)))
