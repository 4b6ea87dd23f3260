"""Dense linear algebra over F_p on numpy arrays.

For p < 2^26 matrices are stored as float64 holding integers in [0, p):
products of two entries stay below 2^52, and matrix products are taken in
inner-dimension chunks short enough that every partial sum stays below 2^53,
so BLAS computes them exactly. Larger primes use int64 storage and split the
right factor into 16-bit halves before the float products.
"""
from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

_EXACT = 2 ** 53
_FLOAT_LIMIT = 1 << 26
_BASE_ROWS = 8


class SliceTooLarge(MemoryError):
    pass


def storage_dtype(p: int):
    return np.float64 if p < _FLOAT_LIMIT else np.int64


def as_mod(a, p: int) -> np.ndarray:
    """Array reduced into [0, p) in the storage dtype for p."""
    a = np.mod(np.asarray(a, dtype=np.int64), p)
    return a.astype(storage_dtype(p), copy=False)


def _rem(a: np.ndarray, p: int) -> np.ndarray:
    """Remainder of a non-negative array."""
    return np.fmod(a, p, out=a) if a.dtype == np.float64 else np.remainder(a, p, out=a)


def _fmm(a: np.ndarray, b: np.ndarray, p: int, bound: int) -> np.ndarray:
    """Exact (a @ b) mod p as float64, entries of a below p and of b below bound."""
    n = a.shape[1]
    step = max(1, _EXACT // ((p - 1) * max(bound - 1, 1)))
    if step >= n:
        return np.fmod(a @ b, p)
    out = np.zeros((a.shape[0], b.shape[1]))
    for s in range(0, n, step):
        out += np.fmod(a[:, s:s + step] @ b[s:s + step], p)
        np.fmod(out, p, out=out)
    return out


def matmul_mod(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """(a @ b) mod p, returned in the storage dtype for p."""
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=storage_dtype(p))
    if p < _FLOAT_LIMIT:
        return _fmm(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64), p, p)
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    af = a.astype(np.float64)
    hi = _fmm(af, (b >> 16).astype(np.float64), p, 1 << 15).astype(np.int64)
    lo = _fmm(af, (b & 0xFFFF).astype(np.float64), p, 1 << 16).astype(np.int64)
    return (hi * 65536 % p + lo) % p


def _rref_base(m: np.ndarray, p: int, rows_out: Optional[List[int]] = None) -> Tuple[np.ndarray, List[int]]:
    """Row-by-row elimination for short blocks (m is modified).

    A row is kept when it survives elimination by the pivots before it; the
    kept row indices are appended to ``rows_out`` when given.
    """
    rows = m.shape[0]
    piv: List[int] = []
    keep: List[int] = []
    for i in range(rows):
        row = m[i]
        nz = np.flatnonzero(row)
        if nz.size == 0:
            continue
        c = int(nz[0])
        inv = pow(int(row[c]), p - 2, p)
        if inv != 1:
            row = _rem(row * inv, p)
            m[i] = row
        f = m[:, c].copy()
        f[i] = 0
        hit = np.flatnonzero(f)
        if hit.size:
            # keep everything non-negative so fmod is a true remainder
            m[hit] = _rem(m[hit] + (p - _rem(np.outer(f[hit], row), p)), p)
        piv.append(c)
        keep.append(i)
    if rows_out is not None:
        rows_out.extend(keep)
    return m[keep], piv


def rref(m: np.ndarray, p: int) -> Tuple[np.ndarray, List[int]]:
    """Reduced row echelon data: E (rank x cols) and its pivot columns.

    ``E[:, pivots]`` is the identity; pivots follow the row order and are not
    sorted. Recursive on rows: reduce the top half, clear its pivots from the
    bottom half with one product, reduce the bottom, then back-substitute.
    """
    m = as_mod(m, p) if m.dtype != storage_dtype(p) else m
    rows, cols = m.shape
    if rows == 0 or cols == 0:
        return np.zeros((0, cols), dtype=m.dtype), []
    if rows <= _BASE_ROWS:
        return _rref_base(m.copy(), p)
    h = rows // 2
    e1, p1 = rref(m[:h], p)
    bottom = m[h:]
    if p1:
        bottom = _rem(bottom + (p - matmul_mod(bottom[:, p1], e1, p)), p)
    bottom = bottom[np.any(bottom != 0, axis=1)]
    e2, p2 = rref(bottom, p)
    if not p2:
        return e1, p1
    if p1:
        e1 = _rem(e1 + (p - matmul_mod(e1[:, p2], e2, p)), p)
    return np.vstack([e1, e2]), p1 + p2


def rank_mod(m, p: int, max_entries: int = 0) -> int:
    """Rank over F_p. ``max_entries`` > 0 bounds the size after trimming."""
    m = np.asarray(m)
    if m.size == 0:
        return 0
    rows = np.any(m != 0, axis=1)
    if not rows.all():
        m = m[rows]
    if m.size == 0:
        return 0
    cols = np.any(m != 0, axis=0)
    if not cols.all():
        m = m[:, cols]
    if m.shape[0] > m.shape[1]:
        m = m.T
    if max_entries and m.size > max_entries:
        raise SliceTooLarge(f"slice of shape {m.shape} exceeds the budget of {max_entries} entries")
    if m.dtype != storage_dtype(p):
        m = as_mod(m, p)
    return len(rref(np.ascontiguousarray(m), p)[1])


def nullspace_mod(m, p: int) -> np.ndarray:
    """Basis of {v : m v = 0} as rows of the returned int64 array."""
    m = np.asarray(m)
    cols = m.shape[1]
    e, piv = rref(as_mod(m, p), p)
    e = e.astype(np.int64)
    pset = set(piv)
    free = [c for c in range(cols) if c not in pset]
    out = np.zeros((len(free), cols), dtype=np.int64)
    for k, c in enumerate(free):
        out[k, c] = 1
        for row, pc in enumerate(piv):
            out[k, pc] = (-e[row, c]) % p
    return out



def independent_rows(m, p: int, basis=None) -> List[int]:
    """Indices of rows of m, taken greedily in order, that are independent
    of each other and of the row space of ``basis``."""
    m = as_mod(m, p)
    if m.shape[0] == 0:
        return []
    if basis is not None and np.asarray(basis).size:
        e, piv = rref(as_mod(basis, p), p)
        if piv:
            m = _rem(m + (p - matmul_mod(m[:, piv], e, p)), p)
    keep: List[int] = []
    _rref_base(np.ascontiguousarray(m), p, keep)
    return keep


class Echelon:
    """Row space over F_p grown block by block; keeps the reduced echelon form."""

    def __init__(self, width: int, p: int):
        self.p = p
        self.e = np.zeros((0, width), dtype=storage_dtype(p))
        self.piv: List[int] = []

    @property
    def rank(self) -> int:
        return len(self.piv)

    def add(self, rows) -> None:
        p = self.p
        m = as_mod(rows, p)
        if m.shape[0] == 0 or len(self.piv) == m.shape[1]:
            return
        if self.piv:
            m = _rem(m + (p - matmul_mod(m[:, self.piv], self.e, p)), p)
        m = m[np.any(m != 0, axis=1)]
        if m.shape[0] == 0:
            return
        e2, p2 = rref(np.ascontiguousarray(m), p)
        if not p2:
            return
        e1 = self.e
        if self.piv:
            e1 = _rem(e1 + (p - matmul_mod(e1[:, p2], e2, p)), p)
        self.e = np.vstack([e1, e2])
        self.piv = self.piv + p2
