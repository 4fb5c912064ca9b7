"""Transition amplitudes ``<s|U|t>`` between Fock states.

Two exact routes: the permanent of the repeated-row/column submatrix, and
full enumeration of the weighted roots-of-unity grid.  They share no code
path beyond input validation, so each checks the other.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .permanent import as_matrix, permanent
from ._grid import SamplingDomain, grid_sum, sqrt_factorials, GRID_CAP
from .errors import DomainError
from .fockspace import (DEFAULT_LIMITS, Limits, OccupationVector, as_occupation,
                        check_compatible, transition_bound)
from .optics import as_unitary

METHODS = ("exact_permanent", "theorem1_enumeration", "sampled")


@dataclass(frozen=True)
class FockSubmatrix:
    base: np.ndarray
    s: OccupationVector
    t: OccupationVector
    realized: np.ndarray

    @property
    def n(self) -> int:
        return self.realized.shape[0]


@dataclass
class AmplitudeResult:
    value: complex
    method: str
    error_radius: float = 0.0
    per_sample_bound: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def probability(self) -> float:
        return abs(self.value) ** 2


def _prepare(U, s, t, check_unitary: bool):
    s, t = as_occupation(s), as_occupation(t)
    check_compatible(s, t)
    A = np.asarray(as_unitary(U) if check_unitary else as_matrix(U), dtype=np.complex128)
    if A.shape[0] != s.modes:
        raise DomainError(f"matrix has {A.shape[0]} modes but occupation vectors have {s.modes}")
    return A, s, t


def build_submatrix(U, s, t) -> FockSubmatrix:
    """Repeat row ``k`` of ``U`` ``s_k`` times and column ``j`` ``t_j`` times.

    Repetitions are laid out in ascending mode order.
    """
    A, s, t = _prepare(U, s, t, check_unitary=False)
    rows = np.repeat(np.arange(s.modes), s.counts)
    cols = np.repeat(np.arange(t.modes), t.counts)
    realized = A[np.ix_(rows, cols)]
    return FockSubmatrix(base=A, s=s, t=t, realized=realized)


def raw_g(U, s, t, algo: str = "ryser", check_unitary: bool = False) -> complex:
    """``Perm(U_{s,t})``, the amplitude before factorial normalisation."""
    if check_unitary:
        U = as_unitary(U)
    return permanent(build_submatrix(U, s, t).realized, algo=algo)


def amplitude_exact(U, s, t, algo: str = "ryser", check_unitary: bool = True,
                    limits: Limits = DEFAULT_LIMITS) -> AmplitudeResult:
    """``Perm(U_{s,t}) / sqrt(prod s_k! t_k!)``."""
    A, s, t = _prepare(U, s, t, check_unitary)
    limits.check(s)
    if s.total() == 0:
        return AmplitudeResult(1 + 0j, "exact_permanent")
    g = raw_g(A, s, t, algo=algo)
    return AmplitudeResult(g / sqrt_factorials(s, t), "exact_permanent",
                           diagnostics={"algorithm": algo})


def default_grid_order(s) -> int:
    return as_occupation(s).total() + 1


def amplitude_theorem1(U, s, t, d: Optional[int] = None, check_unitary: bool = True,
                       grid_cap: int = GRID_CAP) -> AmplitudeResult:
    """Exact amplitude by summing over every point of the roots-of-unity grid.

    The grid summand is built from ``U.T`` so that its average reproduces
    ``Perm(U_{s,t})`` with rows of the submatrix following ``s``.
    """
    A, s, t = _prepare(U, s, t, check_unitary)
    d = default_grid_order(s) if d is None else int(d)
    domain = SamplingDomain(s, d)
    if s.total() == 0:
        return AmplitudeResult(1 + 0j, "theorem1_enumeration", diagnostics={"grid_order": d})
    g = grid_sum(A.T, domain, t, grid_cap=grid_cap) / domain.size
    return AmplitudeResult(g / sqrt_factorials(s, t), "theorem1_enumeration",
                           diagnostics={"grid_order": d, "grid_points": domain.size})


def probability_exact(U, s, t, **kwargs) -> float:
    return amplitude_exact(U, s, t, **kwargs).probability


def within_bound(result: AmplitudeResult, s, t, slack: float = 1e-12) -> bool:
    return abs(result.value) <= transition_bound(s, t).value + result.error_radius + slack
