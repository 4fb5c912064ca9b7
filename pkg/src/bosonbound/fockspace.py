"""Occupation vectors, the v-factor and the universal transition bound.

Closed-form maximal probabilities for the two-mode merging scenarios live
here as well; they are plain arithmetic on occupation numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError, SizeError

# exact rational evaluation below this total, log-domain above
EXACT_TOTAL_LIMIT = 20


@dataclass(frozen=True)
class Limits:
    """Caps applied by kernels whose cost grows exponentially."""

    max_modes: int = 64
    max_bosons: int = 30

    def check(self, s: "OccupationVector") -> None:
        if s.modes > self.max_modes:
            raise SizeError(f"mode count {s.modes} exceeds cap {self.max_modes}")
        if s.total() > self.max_bosons:
            raise SizeError(f"boson number {s.total()} exceeds cap {self.max_bosons}")


DEFAULT_LIMITS = Limits()


@dataclass(frozen=True)
class OccupationVector:
    """Bosons per mode, e.g. ``OccupationVector((2, 1, 0))``."""

    counts: tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        counts = tuple(counts)
        if len(counts) < 1:
            raise DomainError("occupation vector needs at least one mode")
        for c in counts:
            if isinstance(c, bool) or int(c) != c or c < 0:
                raise DomainError(f"occupation numbers must be non-negative integers, got {c!r}")
        object.__setattr__(self, "counts", tuple(int(c) for c in counts))

    @classmethod
    def parse(cls, text: str) -> "OccupationVector":
        try:
            return cls(int(x) for x in text.replace(" ", "").split(","))
        except ValueError as exc:
            raise DomainError(f"cannot parse occupation vector {text!r}: {exc}") from None

    @property
    def modes(self) -> int:
        return len(self.counts)

    def total(self) -> int:
        return sum(self.counts)

    def __iter__(self):
        return iter(self.counts)

    def __len__(self) -> int:
        return len(self.counts)

    def __getitem__(self, k: int) -> int:
        return self.counts[k]

    def factorial_product(self) -> int:
        return math.prod(math.factorial(c) for c in self.counts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.counts)) + ")"


def as_occupation(s) -> OccupationVector:
    return s if isinstance(s, OccupationVector) else OccupationVector(s)


def check_compatible(s: OccupationVector, t: OccupationVector) -> None:
    if s.modes != t.modes:
        raise DomainError(f"mode counts differ: s has {s.modes}, t has {t.modes}")
    if s.total() != t.total():
        raise DomainError(f"boson totals differ: s has {s.total()}, t has {t.total()}")


def v_factor_squared_exact(s) -> Fraction:
    """Exact ``prod_k s_k!/s_k**s_k`` as a fraction (``0**0 = 1``)."""
    s = as_occupation(s)
    out = Fraction(1)
    for c in s:
        out *= Fraction(math.factorial(c), c**c)
    return out


def log_v_factor(s) -> float:
    """Natural log of the v-factor, accumulated term by term."""
    s = as_occupation(s)
    acc = 0.0
    for c in s:
        if c > 0:
            acc += math.lgamma(c + 1) - c * math.log(c)
    return 0.5 * acc


def v_factor(s) -> float:
    """``sqrt(prod_k s_k!/s_k**s_k)``, always in ``(0, 1]``."""
    s = as_occupation(s)
    if s.total() <= EXACT_TOTAL_LIMIT:
        return math.sqrt(v_factor_squared_exact(s))
    return math.exp(log_v_factor(s))


@dataclass(frozen=True)
class BoundValue:
    value: float
    forward_ratio: float
    reverse_ratio: float

    @property
    def forward_is_tighter(self) -> bool:
        return self.forward_ratio <= self.reverse_ratio


def transition_bound(s, t) -> BoundValue:
    """Upper bound on ``|<s|U|t>|`` valid for every linear-optical ``U``."""
    s, t = as_occupation(s), as_occupation(t)
    check_compatible(s, t)
    log_fwd = log_v_factor(s) - log_v_factor(t)
    if s.total() <= EXACT_TOTAL_LIMIT:
        sq = v_factor_squared_exact(s) / v_factor_squared_exact(t)
        fwd = math.sqrt(sq)
        rev = math.sqrt(1 / sq)
    else:
        fwd, rev = math.exp(log_fwd), math.exp(-log_fwd)
    return BoundValue(value=min(fwd, rev), forward_ratio=fwd, reverse_ratio=rev)


def p_max_single_mode(n: int) -> float:
    """Largest probability of sending ``n`` single photons into one mode, ``n!/n**n``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return float(Fraction(math.factorial(n), n**n))


def p_max_collision(p: int, q: int) -> float:
    """Bound on merging ``p`` and ``q`` bosons from two modes into one."""
    if p < 0 or q < 0 or p + q < 1:
        raise DomainError("need p, q >= 0 and p + q >= 1")
    n = p + q
    return float(Fraction(math.comb(n, p) * p**p * q**q, n**n))


def p_max_hom_merge(n: int) -> float:
    """``(2n)!/((n!)**2 4**n)``: two modes of ``n`` bosons into one."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return float(Fraction(math.comb(2 * n, n), 4**n))


def p_max_add_one(n: int) -> float:
    """``(n/(n+1))**n``: one extra boson joining a mode holding ``n``."""
    if n < 1:
        raise DomainError("n must be at least 1")
    return float(Fraction(n, n + 1) ** n)


def single_mode(n: int, m: int) -> OccupationVector:
    return OccupationVector((n,) + (0,) * (m - 1))


def ones(m: int) -> OccupationVector:
    return OccupationVector((1,) * m)


def all_occupations(n: int, m: int) -> list[OccupationVector]:
    """Every occupation vector with total ``n`` over ``m`` modes."""
    out: list[OccupationVector] = []

    def rec(prefix: list[int], left: int, k: int) -> None:
        if k == m - 1:
            out.append(OccupationVector(prefix + [left]))
            return
        for c in range(left, -1, -1):
            rec(prefix + [c], left - c, k + 1)

    rec([], n, 0)
    return out
