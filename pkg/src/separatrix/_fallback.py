"""Pure-Python (numpy) versions of the compiled kernels in ``_core``.

Same signatures and return conventions.  Threads are ignored; every row is
summed in a fixed order, so output is reproducible, though not bit-equal to
the compiled backend (numpy's pairwise summation replaces Neumaier blocks).
"""

import numpy as np

ZERO_EXP = -(2**62)
EXP_CAP = 2**62
BLOCK = 256

STATUS_OK = 0
STATUS_NONPOSITIVE = 1
STATUS_OVERFLOW = 2


def _horner(c, x):
    acc = np.zeros_like(x)
    for ck in c[::-1]:
        acc = acc * x + ck
    return acc


def run_recurrence(coeffs, y, pmax, symmetric, threads=1, deterministic=True, mirror=None):
    c = np.ascontiguousarray(coeffs, dtype=float)
    r = None if mirror is None or len(mirror) == 0 else np.ascontiguousarray(mirror, dtype=float)
    m = np.zeros(pmax + 1)
    e = np.full(pmax + 1, ZERO_EXP, dtype=np.int64)
    if pmax < 1:
        return m, e, STATUS_OK, 0
    fm, ex = np.frexp(y)
    if fm == 0:
        return m, e, STATUS_NONPOSITIVE, 1
    m[1] = 2.0 * fm
    e[1] = ex - 1
    for p in range(1, pmax):
        n = p + 1
        count = (n - 1) // 2 if symmetric else p
        q = np.arange(1, count + 1)
        ee = e[q] + e[n - q]
        even_mid = symmetric and n % 2 == 0
        E = ee.max() if count else 2 * ZERO_EXP
        if even_mid:
            E = max(E, 2 * e[n // 2])
        d = E - ee
        if symmetric:
            fv = _horner(c, ((2 * q - n) / (2.0 * n)) ** 2)
        elif r is None:
            fv = _horner(c, q / n)
        else:
            fv = np.where(2 * q > n, _horner(r, (n - q) / n), _horner(c, q / n))
        v = fv * m[q] * m[n - q]
        v = np.where(d > 1100, 0.0, np.ldexp(v, -np.minimum(d, 1100).astype(np.int32)))
        total = float(np.sum(v))
        if even_mid:
            h = n // 2
            dm = E - 2 * e[h]
            if dm <= 1100:
                total += 0.5 * float(np.ldexp(c[0] * m[h] * m[h], -int(dm)))
        total /= p
        if not total > 0:
            return m, e, STATUS_NONPOSITIVE, n
        fm, ex = np.frexp(total)
        m[n] = 2.0 * fm
        e[n] = E + ex - 1
        if abs(e[n]) >= EXP_CAP:
            return m, e, STATUS_OVERFLOW, n
    return m, e, STATUS_OK, 0


def linearized_residual(b, f3, pmax, threads=1):
    b = np.asarray(b, dtype=float)
    c = np.asarray(f3, dtype=float)
    out = np.full(pmax + 1, np.nan)
    for p in range(2, pmax):
        q = np.arange(2, p + 1)
        out[p] = b[p + 1] - np.sum(b[q] * _horner(c, q / p)) / p
    return out


def a_recurrence_residual(lna, f2, pmax, threads=1):
    lna = np.asarray(lna, dtype=float)
    c = np.asarray(f2, dtype=float)
    out = np.full(pmax + 1, np.nan)
    for p in range(2, pmax):
        q = np.arange(1, p + 1)
        s = np.sum((q / p) * _horner(c, q / (p + 1)) * np.expm1(lna[p] - lna[q]))
        out[p] = (p + 1) * np.expm1(lna[p + 1] - lna[p]) + s / (p - 1)
    return out
