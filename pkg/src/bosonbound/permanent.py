"""Exact matrix permanents.

Three independent routes: brute-force permutation enumeration (the oracle),
Ryser's inclusion-exclusion formula and Glynn's formula.  The two
exponential-time routes split the column subsets into a low block, tabulated
once, and a high block walked in Gray-code order so every step changes a
single column.  Partial sums are stored per high-block subset and reduced in
index order, which makes the result independent of the worker count.
"""
from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import DomainError, SizeError

NAIVE_CAP = 10
EXACT_CAP = 28
LOW_BITS = 10
HIGH_CHUNK = 64


def as_matrix(W) -> np.ndarray:
    """Validate and convert to a square complex128 array."""
    A = np.asarray(W, dtype=np.complex128)
    if A.size == 0:
        return A.reshape(0, 0)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise DomainError("matrix entries must be finite")
    return A


def _check_cap(m: int, cap: int, name: str) -> None:
    if m > cap:
        raise SizeError(f"{name}: dimension {m} exceeds cap {cap}")


def permanent_naive(W) -> complex:
    """Sum over all ``m!`` permutations.  Ground truth for small matrices."""
    A = as_matrix(W)
    m = A.shape[0]
    _check_cap(m, NAIVE_CAP, "permanent_naive")
    if m == 0:
        return 1 + 0j
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.intp)
    terms = A[np.arange(m), perms].prod(axis=1)
    return complex(terms.sum())


def _gray(g: int) -> int:
    return g ^ (g >> 1)


def _low_table(A: np.ndarray, b: int, signed_columns: bool) -> tuple[np.ndarray, np.ndarray]:
    """Row-sum vectors and parities for every subset of the first ``b`` columns.

    With ``signed_columns`` a set bit means ``x_j = -1`` (Glynn); otherwise it
    means column ``j`` is included (Ryser).
    """
    m = A.shape[0]
    if signed_columns:
        table = A[:, :b].sum(axis=1)[None, :].copy()
    else:
        table = np.zeros((1, m), dtype=np.complex128)
    parity = np.zeros(1, dtype=np.int64)
    for j in range(b):
        step = -2.0 * A[:, j] if signed_columns else A[:, j]
        table = np.concatenate([table, table + step[None, :]])
        parity = np.concatenate([parity, parity + 1])
    sign = np.where(parity % 2 == 0, 1.0, -1.0)
    return table, sign


def _high_partials(A, b, low, low_sign, signed_columns, lo, hi) -> np.ndarray:
    m = A.shape[0]
    cols = A[:, b:]
    code = _gray(lo)
    mask = np.array([(code >> k) & 1 for k in range(m - b)], dtype=bool)
    if signed_columns:
        vec = (cols * np.where(mask, -1.0, 1.0)).sum(axis=1)
    else:
        vec = cols[:, mask].sum(axis=1)
    weight = int(mask.sum())
    out = np.empty(hi - lo, dtype=np.complex128)
    for g in range(lo, hi):
        if g > lo:
            k = (g & -g).bit_length() - 1  # column flipped between gray(g-1) and gray(g)
            if (_gray(g) >> k) & 1:
                vec = vec - 2.0 * cols[:, k] if signed_columns else vec + cols[:, k]
                weight += 1
            else:
                vec = vec + 2.0 * cols[:, k] if signed_columns else vec - cols[:, k]
                weight -= 1
        total = np.dot(low_sign, (low + vec[None, :]).prod(axis=1))
        out[g - lo] = -total if weight % 2 else total
    return out


def _blocked_sum(A: np.ndarray, signed_columns: bool, workers: int) -> complex:
    m = A.shape[0]
    b = min(m, LOW_BITS)
    low, low_sign = _low_table(A, b, signed_columns)
    n_high = 1 << (m - b)
    # fixed chunking: the reduction tree does not depend on `workers`
    spans = [(lo, min(lo + HIGH_CHUNK, n_high)) for lo in range(0, n_high, HIGH_CHUNK)]

    def run(span):
        return _high_partials(A, b, low, low_sign, signed_columns, *span)

    workers = max(1, min(int(workers), len(spans)))
    if workers == 1:
        parts = [run(sp) for sp in spans]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, spans))
    return complex(np.concatenate(parts).sum())


def permanent_ryser(W, workers: int = 1, cap: int = EXACT_CAP) -> complex:
    """Ryser's formula, ``(-1)^m sum_S (-1)^|S| prod_i sum_{j in S} w_ij``."""
    A = as_matrix(W)
    m = A.shape[0]
    _check_cap(m, cap, "permanent_ryser")
    if m == 0:
        return 1 + 0j
    total = _blocked_sum(A, signed_columns=False, workers=workers)
    return -total if m % 2 else total


def permanent_glynn(W, workers: int = 1, cap: int = EXACT_CAP) -> complex:
    """Glynn's formula averaged over all ``2^m`` sign strings."""
    A = as_matrix(W)
    m = A.shape[0]
    _check_cap(m, cap, "permanent_glynn")
    if m == 0:
        return 1 + 0j
    return _blocked_sum(A, signed_columns=True, workers=workers) / 2.0**m


def glynn_term(W, x) -> complex:
    """Single summand ``x_1...x_m prod_i (sum_j w_ij x_j)`` of Glynn's formula."""
    A = as_matrix(W)
    x = np.asarray(x, dtype=np.complex128)
    return complex(np.prod(x) * np.prod(A @ x))


ALGORITHMS = {
    "naive": permanent_naive,
    "ryser": permanent_ryser,
    "glynn": permanent_glynn,
}


def permanent(W, algo: str = "ryser", **kwargs) -> complex:
    try:
        fn = ALGORITHMS[algo]
    except KeyError:
        raise DomainError(f"unknown permanent algorithm {algo!r}; choose from {sorted(ALGORITHMS)}") from None
    return fn(W, **kwargs)


def relative_error(a: complex, b: complex) -> float:
    scale = max(abs(a), abs(b), 1e-300)
    return abs(a - b) / scale


__all__ = [
    "as_matrix", "permanent", "permanent_naive", "permanent_ryser",
    "permanent_glynn", "glynn_term", "relative_error", "NAIVE_CAP", "EXACT_CAP",
]
