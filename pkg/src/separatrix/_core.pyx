# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the recurrence and the residual checks.

Row sums are split into fixed-size blocks (independent of the worker
count), each block is summed with Neumaier compensation, and block sums
are folded with a fixed-shape pairwise tree.  The result is therefore
bit-identical for every thread count when ``deterministic`` is set.
"""

import numpy as np
from cython.parallel cimport prange
from libc.math cimport ldexp, frexp, fabs, expm1
from libc.stdint cimport int64_t

cdef enum:
    BLOCK = 256
cdef int64_t ZERO_EXP = -(<int64_t>1 << 62)
cdef int64_t EXP_CAP = (<int64_t>1 << 62)

STATUS_OK = 0
STATUS_NONPOSITIVE = 1
STATUS_OVERFLOW = 2


cdef inline double horner(const double* c, Py_ssize_t nc, double x) noexcept nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t k
    for k in range(nc - 1, -1, -1):
        acc = acc * x + c[k]
    return acc


cdef double row_block(const double* c, Py_ssize_t nc, const double* r, Py_ssize_t nr, bint centered,
                      const double* m, const int64_t* e,
                      Py_ssize_t n, Py_ssize_t lo, Py_ssize_t hi, int64_t E) noexcept nogil:
    cdef double s = 0.0, comp = 0.0, t, v
    cdef double dn = <double>n
    cdef int64_t d
    cdef Py_ssize_t q
    for q in range(lo, hi):
        d = E - (e[q] + e[n - q])
        if d > 1100:
            continue
        if centered:
            # even polynomial in u = (x - 1/2)^2, x = q/n
            v = (2 * q - n) / (2.0 * dn)
            v = horner(c, nc, v * v)
        elif r != NULL and 2 * q > n:
            v = horner(r, nr, (n - q) / dn)
        else:
            v = horner(c, nc, q / dn)
        v = v * m[q] * m[n - q]
        v = ldexp(v, <int>(-d))
        t = s + v
        if fabs(s) >= fabs(v):
            comp = comp + ((s - t) + v)
        else:
            comp = comp + ((v - t) + s)
        s = t
    return s + comp


cdef double pairwise(const double* x, Py_ssize_t lo, Py_ssize_t hi) noexcept nogil:
    cdef Py_ssize_t mid
    if hi - lo <= 0:
        return 0.0
    if hi - lo == 1:
        return x[lo]
    mid = lo + (hi - lo) // 2
    return pairwise(x, lo, mid) + pairwise(x, mid, hi)


def run_recurrence(const double[::1] coeffs, double y, Py_ssize_t pmax, bint symmetric,
                   int threads=1, bint deterministic=True, const double[::1] mirror=None):
    """Fill Lambda_1..Lambda_pmax starting from Lambda_1 = y.

    With ``symmetric`` the half-sum over q <= n/2 is used and ``coeffs``
    hold f1 as an even polynomial in u = (x - 1/2)^2; otherwise ``coeffs``
    are the raw kernel's coefficients in x.
    ``mirror``, if given, holds the coefficients of the kernel's reflection
    g(x) = f(1 - x); nodes q/n > 1/2 are then evaluated as g((n - q)/n),
    which keeps Horner accurate where an expanded f nearly vanishes.
    Returns ``(mantissa, exponent, status, status_p)``.
    """
    mant_arr = np.zeros(pmax + 1)
    expo_arr = np.full(pmax + 1, ZERO_EXP, dtype=np.int64)
    cdef double[::1] mv = mant_arr
    cdef int64_t[::1] ev = expo_arr
    cdef Py_ssize_t nb_cap = pmax // BLOCK + 2
    if threads > nb_cap:
        nb_cap = threads + 1
    bs_arr = np.zeros(nb_cap)
    cdef double[::1] bsv = bs_arr
    cdef double* m = &mv[0]
    cdef int64_t* e = &ev[0]
    cdef double* bs = &bsv[0]
    cdef const double* c = &coeffs[0]
    cdef Py_ssize_t nc = coeffs.shape[0]
    cdef const double* r = NULL
    cdef Py_ssize_t nr = 0
    cdef Py_ssize_t p, n, q, count, block, nb, blk, lo, hi
    cdef int64_t E, s_e
    cdef double total, fm
    cdef int ex
    cdef int status = 0
    cdef Py_ssize_t status_p = 0

    if mirror is not None and mirror.shape[0] > 0:
        r = &mirror[0]
        nr = mirror.shape[0]
    if pmax < 1:
        return mant_arr, expo_arr, 0, 0
    fm = frexp(y, &ex)
    if fm == 0.0:
        return mant_arr, expo_arr, STATUS_NONPOSITIVE, 1
    m[1] = 2.0 * fm
    e[1] = ex - 1

    with nogil:
        for p in range(1, pmax):
            n = p + 1
            if symmetric:
                count = (n - 1) // 2
            else:
                count = p
            E = ZERO_EXP * 2
            for q in range(1, count + 1):
                s_e = e[q] + e[n - q]
                if s_e > E:
                    E = s_e
            if symmetric and n % 2 == 0:
                s_e = e[n // 2] * 2
                if s_e > E:
                    E = s_e
            if deterministic or threads <= 1:
                block = BLOCK
            else:
                block = (count + threads - 1) // threads
                if block < 1:
                    block = 1
            nb = (count + block - 1) // block
            if threads > 1 and nb > 1:
                for blk in prange(nb, num_threads=threads, schedule="static"):
                    lo = 1 + blk * block
                    hi = lo + block
                    if hi > count + 1:
                        hi = count + 1
                    bs[blk] = row_block(c, nc, r, nr, symmetric, m, e, n, lo, hi, E)
            else:
                for blk in range(nb):
                    lo = 1 + blk * block
                    hi = lo + block
                    if hi > count + 1:
                        hi = count + 1
                    bs[blk] = row_block(c, nc, r, nr, symmetric, m, e, n, lo, hi, E)
            total = pairwise(bs, 0, nb)
            if symmetric and n % 2 == 0:
                total = total + 0.5 * row_block(c, nc, r, nr, symmetric, m, e, n, n // 2, n // 2 + 1, E)
            total = total / p
            if not (total > 0.0):
                status = 1
                status_p = n
                break
            fm = frexp(total, &ex)
            m[n] = 2.0 * fm
            e[n] = E + ex - 1
            if e[n] >= EXP_CAP or e[n] <= -EXP_CAP:
                status = 2
                status_p = n
                break
    return mant_arr, expo_arr, status, status_p


cdef double linearized_row(const double* b, const double* c, Py_ssize_t nc, Py_ssize_t p) noexcept nogil:
    cdef double s = 0.0, comp = 0.0, t, v
    cdef double dp = <double>p
    cdef Py_ssize_t q
    for q in range(2, p + 1):
        v = b[q] * horner(c, nc, q / dp)
        t = s + v
        if fabs(s) >= fabs(v):
            comp = comp + ((s - t) + v)
        else:
            comp = comp + ((v - t) + s)
        s = t
    return b[p + 1] - (s + comp) / dp


cdef double arec_row(const double* lna, const double* c, Py_ssize_t nc, Py_ssize_t p) noexcept nogil:
    cdef double s = 0.0, comp = 0.0, t, v
    cdef double dp = <double>p
    cdef double dp1 = <double>(p + 1)
    cdef Py_ssize_t q
    for q in range(1, p + 1):
        v = (q / dp) * horner(c, nc, q / dp1) * expm1(lna[p] - lna[q])
        t = s + v
        if fabs(s) >= fabs(v):
            comp = comp + ((s - t) + v)
        else:
            comp = comp + ((v - t) + s)
        s = t
    return dp1 * expm1(lna[p + 1] - lna[p]) + (s + comp) / (dp - 1.0)


def linearized_residual(const double[::1] b, const double[::1] f3, Py_ssize_t pmax, int threads=1):
    """r_p = b_{p+1} - (1/p) sum_{q=2}^{p} b_q f3(q/p) for 2 <= p < pmax."""
    out_arr = np.full(pmax + 1, np.nan)
    cdef double[::1] out = out_arr
    cdef const double* bp = &b[0]
    cdef const double* c = &f3[0]
    cdef Py_ssize_t nc = f3.shape[0]
    cdef Py_ssize_t p
    cdef int nt = threads if threads > 1 else 1
    if pmax < 3:
        return out_arr
    for p in prange(2, pmax, nogil=True, num_threads=nt, schedule="dynamic", chunksize=64):
        out[p] = linearized_row(bp, c, nc, p)
    return out_arr


def a_recurrence_residual(const double[::1] lna, const double[::1] f2, Py_ssize_t pmax, int threads=1):
    """Residual of (p+1)(a_{p+1}-a_p)/a_p against the weighted sum with f2."""
    out_arr = np.full(pmax + 1, np.nan)
    cdef double[::1] out = out_arr
    cdef const double* lp = &lna[0]
    cdef const double* c = &f2[0]
    cdef Py_ssize_t nc = f2.shape[0]
    cdef Py_ssize_t p
    cdef int nt = threads if threads > 1 else 1
    if pmax < 3:
        return out_arr
    for p in prange(2, pmax, nogil=True, num_threads=nt, schedule="dynamic", chunksize=64):
        out[p] = arec_row(lp, c, nc, p)
    return out_arr
