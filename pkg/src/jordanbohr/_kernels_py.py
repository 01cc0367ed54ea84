"""Numpy fallback for the compiled series/majorant kernels (same signatures)."""
import numpy as np


def series_mul(a, b):
    a = np.ascontiguousarray(a, dtype=complex)
    b = np.ascontiguousarray(b, dtype=complex)
    n = a.shape[1]
    out = np.zeros_like(a)
    for k in range(n):
        out[:, k] = np.einsum("ij,ij->i", a[:, : k + 1], b[:, k::-1])
    return out


def series_recip(d):
    d = np.ascontiguousarray(d, dtype=complex)
    n = d.shape[1]
    out = np.zeros_like(d)
    inv0 = 1.0 / d[:, 0]
    out[:, 0] = inv0
    for k in range(1, n):
        out[:, k] = -inv0 * np.einsum("ij,ij->i", d[:, 1 : k + 1], out[:, k - 1 :: -1][:, :k])
    return out


def _horner(mags, r):
    acc = mags[:, -1].copy()
    for k in range(mags.shape[1] - 2, -1, -1):
        acc = acc * r + mags[:, k]
    return acc


def _search(value_at, m, r_grid):
    lo = np.zeros(m, dtype=np.int64)
    hi = np.full(m, len(r_grid), dtype=np.int64)
    active = lo < hi
    while np.any(active):
        mid = (lo + hi) // 2
        r = r_grid[np.minimum(mid, len(r_grid) - 1)]
        above = value_at(r) > 1.0
        hi = np.where(active & above, mid, hi)
        lo = np.where(active & ~above, mid + 1, lo)
        active = lo < hi
    return lo


def majorant_crossings(mags, tail, r_grid):
    mags = np.asarray(mags, dtype=float)
    tail = np.asarray(tail, dtype=float)
    r_grid = np.asarray(r_grid, dtype=float)
    kp1 = mags.shape[1]
    m = mags.shape[0]
    lower = _search(lambda r: _horner(mags, r), m, r_grid)
    upper = _search(lambda r: _horner(mags, r) + tail * r ** kp1 / (1.0 - r), m, r_grid)
    return lower, upper
