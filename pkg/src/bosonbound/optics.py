"""Linear-optical networks: elements, composition, Haar sampling, scenarios.

Matrices are indexed ``U[out, in]``: amplitudes are permanents of submatrices
whose rows follow the output occupation.  Networks compose in list order,
each later element multiplying from the left.  Mode labels at this API are
1-based.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DomainError, SizeError, ValidationError
from .fockspace import (OccupationVector, p_max_add_one, p_max_hom_merge,
                        transition_bound)

UNITARY_TOL = 1e-10
SCENARIO_CAP = 500
# exact permanent is used for scenario checks up to this many bosons
SCENARIO_PERMANENT_LIMIT = 12


def unitarity_defect(U) -> float:
    U = np.asarray(U, dtype=np.complex128)
    return float(np.abs(U.conj().T @ U - np.eye(U.shape[0])).max()) if U.size else 0.0


@dataclass(frozen=True)
class UnitaryMatrix:
    matrix: np.ndarray
    unitarity_defect: float

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def modes(self) -> int:
        return self.matrix.shape[0]


def as_unitary(U, tol: float = UNITARY_TOL) -> UnitaryMatrix:
    """Wrap ``U`` after checking ``max|U^dag U - I| <= tol``."""
    if isinstance(U, UnitaryMatrix):
        return U
    A = np.asarray(U, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite")
    defect = unitarity_defect(A)
    if defect > tol:
        raise ValidationError(f"matrix is not unitary: max|U^dag U - I| = {defect:.3e} > {tol:.1e}")
    A = A.copy()
    A.setflags(write=False)
    return UnitaryMatrix(A, defect)


@dataclass(frozen=True)
class BeamSplitter:
    theta: float
    modes: tuple[int, int]
    kind: str = field(default="beamsplitter", init=False)

    def matrix(self, m: int) -> np.ndarray:
        return beamsplitter_matrix(self.theta, *self.modes, m)

    def inverse(self) -> "BeamSplitter":
        return BeamSplitter(-self.theta, self.modes)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "theta": self.theta, "modes": list(self.modes)}


@dataclass(frozen=True)
class PhaseShifter:
    phi: float
    mode: int
    kind: str = field(default="phase_shifter", init=False)

    def matrix(self, m: int) -> np.ndarray:
        _check_mode(self.mode, m)
        U = np.eye(m, dtype=np.complex128)
        U[self.mode - 1, self.mode - 1] = np.exp(1j * self.phi)
        return U

    def inverse(self) -> "PhaseShifter":
        return PhaseShifter(-self.phi, self.mode)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "phi": self.phi, "modes": [self.mode]}


OpticalElement = Union[BeamSplitter, PhaseShifter]


def _check_mode(j: int, m: int) -> None:
    if not 1 <= j <= m:
        raise DomainError(f"mode {j} outside 1..{m}")


def beamsplitter_matrix(theta: float, j: int, k: int, m: int) -> np.ndarray:
    _check_mode(j, m)
    _check_mode(k, m)
    if not j < k:
        raise DomainError(f"beamsplitter modes must satisfy j < k, got ({j}, {k})")
    U = np.eye(m, dtype=np.complex128)
    c, s = math.cos(theta), math.sin(theta)
    a, b = j - 1, k - 1
    U[a, a], U[a, b] = c, s
    U[b, a], U[b, b] = -s, c
    return U


def beamsplitter_unitary(theta: float, j: int = 1, k: int = 2, m: int = 2) -> UnitaryMatrix:
    """Real rotation by ``theta`` on modes ``(j, k)``: block ``[[c, s], [-s, c]]``."""
    return as_unitary(beamsplitter_matrix(theta, j, k, m))


def phase_shifter_unitary(phi: float, j: int, m: int) -> UnitaryMatrix:
    return as_unitary(PhaseShifter(phi, j).matrix(m))


def compose_network(elements: Sequence[OpticalElement], m: int) -> UnitaryMatrix:
    """Product of element matrices; ``elements[0]`` acts first."""
    U = np.eye(m, dtype=np.complex128)
    for el in elements:
        U = el.matrix(m) @ U
    return as_unitary(U)


def invert_network(elements: Sequence[OpticalElement]) -> list[OpticalElement]:
    return [el.inverse() for el in reversed(elements)]


def network_to_json(elements: Sequence[OpticalElement]) -> str:
    return json.dumps([el.to_dict() for el in elements])


def network_from_json(text: str) -> list[OpticalElement]:
    out: list[OpticalElement] = []
    for item in json.loads(text):
        kind = item.get("kind")
        modes = item.get("modes", [])
        if kind == "beamsplitter":
            if len(modes) != 2:
                raise DomainError("beamsplitter needs two modes")
            out.append(BeamSplitter(float(item["theta"]), (int(modes[0]), int(modes[1]))))
        elif kind == "phase_shifter":
            if len(modes) != 1:
                raise DomainError("phase shifter needs one mode")
            out.append(PhaseShifter(float(item["phi"]), int(modes[0])))
        else:
            raise DomainError(f"unknown optical element kind {kind!r}")
    return out


def haar_random_unitary(m: int, seed=None) -> UnitaryMatrix:
    """Haar-distributed unitary from QR of a complex Ginibre matrix.

    The diagonal of ``R`` is rotated to the positive reals so that the
    distribution is exactly Haar.
    """
    if m < 1:
        raise DomainError("need at least one mode")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    return as_unitary(q, tol=1e-12)


@dataclass(frozen=True)
class Scenario:
    name: str
    input: OccupationVector
    target: OccupationVector
    optimal_network: tuple
    predicted_p_max: float

    @property
    def modes(self) -> int:
        return self.input.modes

    def unitary(self) -> UnitaryMatrix:
        return compose_network(self.optimal_network, self.modes)

    def bound_probability(self) -> float:
        return transition_bound(self.target, self.input).value ** 2

    def achieved(self):
        """Amplitude ``<target|U|input>`` through the optimal network.

        Small cases go through the exact permanent, larger ones through full
        enumeration of the roots-of-unity grid (exact up to rounding).
        """
        from .amplitude import amplitude_exact, amplitude_theorem1

        U = self.unitary()
        if self.input.total() <= SCENARIO_PERMANENT_LIMIT:
            return amplitude_exact(U, self.target, self.input)
        return amplitude_theorem1(U, self.target, self.input)

    def achieved_probability(self) -> float:
        return abs(self.achieved().value) ** 2


def _scenario_cap(total: int) -> None:
    if total > SCENARIO_CAP:
        raise SizeError(f"scenario needs {total} bosons, cap is {SCENARIO_CAP}")


def scenario_hom_merge(n: int) -> Scenario:
    """Merge ``(n, n)`` into ``(2n, 0)`` with a 50:50 beamsplitter."""
    if n < 1:
        raise DomainError("n must be at least 1")
    _scenario_cap(2 * n)
    return Scenario(
        name="hom-merge",
        input=OccupationVector((n, n)),
        target=OccupationVector((2 * n, 0)),
        optimal_network=(BeamSplitter(math.pi / 4, (1, 2)),),
        predicted_p_max=p_max_hom_merge(n),
    )


def scenario_add_one(n: int) -> Scenario:
    """Add one boson to a mode holding ``n``; ``sin(theta)**2 = 1/(n+1)``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    _scenario_cap(n + 1)
    theta = math.asin(1.0 / math.sqrt(n + 1))
    return Scenario(
        name="add-one",
        input=OccupationVector((n, 1)),
        target=OccupationVector((n + 1, 0)),
        optimal_network=(BeamSplitter(theta, (1, 2)),),
        predicted_p_max=p_max_add_one(n),
    )


SCENARIOS = {"hom-merge": scenario_hom_merge, "add-one": scenario_add_one}
