"""Recurrence engine: Lambda_p(1) in scaled arithmetic, then a_p and b_p.

The compiled backend (``separatrix._core``) is used when importable; set
``SEPARATRIX_BACKEND=python`` to force the numpy fallback.
"""

from __future__ import annotations

import logging
import os
from fractions import Fraction
from math import comb
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AssumptionError, ExponentOverflow, NonPositiveLambda
from .kernels import Kernels, check_positivity
from .polyalg import Poly, reflect
from .scaled import LN2, ScaledArray

log = logging.getLogger(__name__)


def _load_backend(name=None):
    name = name or os.environ.get("SEPARATRIX_BACKEND", "auto")
    if name in ("auto", "cython"):
        try:
            from . import _core

            return _core, "cython"
        except ImportError:
            if name == "cython":
                raise
    from . import _fallback

    return _fallback, "python"


_backend, BACKEND = _load_backend()


def centered_even(f: Poly) -> np.ndarray:
    """Coefficients d with f(x) + f(1 - x) = sum_m d_m u^m, u = (x - 1/2)^2.

    Computed from f in exact rationals and rounded once.  Unlike the
    expanded x-coefficients of f1, these do not cancel near x = 1/2.
    """
    c = [Fraction(v) for v in f.coeffs]
    n = len(c) - 1
    # f(1/2 + t) = sum_j e_j t^j; odd powers cancel in f(1/2+t) + f(1/2-t)
    e = [sum(c[k] * comb(k, j) / 2 ** (k - j) for k in range(j, n + 1)) for j in range(n + 1)]
    d = [float(2 * e[j]) for j in range(0, n + 1, 2)]
    return np.array(d if d else [0.0])


def use_backend(name: str) -> str:
    """Switch the kernel backend at runtime ('cython', 'python' or 'auto')."""
    global _backend, BACKEND
    _backend, BACKEND = _load_backend(name)
    return BACKEND


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("SEPARATRIX_THREADS")
        threads = int(env) if env else 0
    if threads < 0:
        raise ValueError("threads must be >= 0")
    return threads if threads > 0 else (os.cpu_count() or 1)


def _coeff_array(p: Poly) -> np.ndarray:
    c = np.asarray(p.coeffs, dtype=float)
    return c if c.size else np.zeros(1)


def _run(coeffs, y, pmax, symmetric, threads, deterministic, mirror=None):
    if mirror is not None:
        mirror = np.ascontiguousarray(mirror, dtype=float)
    return _backend.run_recurrence(
        np.ascontiguousarray(coeffs, dtype=float), float(y), int(pmax), bool(symmetric),
        resolve_threads(threads), bool(deterministic), mirror,
    )


@dataclass(frozen=True)
class SequenceTable:
    """Per-p columns, index-aligned so that ``a[p]`` is a_p (index 0 unused)."""

    pmax: int
    lambda_: ScaledArray
    log_lambda: np.ndarray
    a: np.ndarray
    b: np.ndarray
    log_a: np.ndarray

    @property
    def p(self) -> np.ndarray:
        return np.arange(self.pmax + 1)


def _derived_columns(mant, expo, pmax):
    lam = ScaledArray(mant, expo)
    ell = lam.log()
    ell[0] = np.nan
    p = np.arange(pmax + 1, dtype=float)
    log_a = np.full(pmax + 1, np.nan)
    log_a[1:] = -ell[1:] / p[1:]
    a = np.exp(log_a)
    b = np.full(pmax + 1, np.nan)
    if pmax >= 2:
        # log(Lambda_p / Lambda_{p-1}) straight from the scaled pairs
        step = np.log(mant[2:] / mant[1:-1]) + (expo[2:] - expo[1:-1]).astype(float) * LN2
        pp = p[2:]
        delta = (ell[1:-1] / (pp - 1) - step) / pp
        b[2:] = pp * pp * np.expm1(delta)
    return lam, ell, a, b, log_a


def compute_sequence(k: Kernels, pmax: int, *, threads: int | None = 1, deterministic: bool = True,
                     force: bool = False) -> SequenceTable:
    """Run the symmetrized recurrence from Lambda_1 = 1 up to ``pmax``.

    Raises AssumptionError when f1 is not certified positive unless
    ``force`` is set; positivity of every Lambda_p is then checked as the
    rows are produced.
    """
    if pmax < 2:
        raise ValueError("pmax must be >= 2")
    if not force:
        rep = check_positivity(k.f1)
        if not rep.passed:
            raise AssumptionError(f"f1 positivity not certified ({rep.status}, min {rep.min_value:.6g})")
    mant, expo, status, sp = _run(centered_even(k.f), 1.0, pmax, True, threads, deterministic)
    if status == 1:
        raise NonPositiveLambda(sp)
    if status == 2:
        raise ExponentOverflow(sp)
    lam, ell, a, b, log_a = _derived_columns(mant, expo, pmax)
    return SequenceTable(pmax=pmax, lambda_=lam, log_lambda=ell, a=a, b=b, log_a=log_a)


def lambda_direct(k: Kernels, y: float, pmax: int, *, symmetric: bool = True, kernel: Poly | None = None,
                  threads: int | None = 1, deterministic: bool = True) -> ScaledArray:
    """Run the recurrence with Lambda_1 = y.

    With ``symmetric=False`` the raw sum with ``kernel`` (default: the
    normalized f) is used instead of f1/2.  Hitting the exponent cap or a
    non-positive row stops the run and sets ``saturated``; later entries
    are left at zero.
    """
    if not y > 0:
        raise ValueError("y must be positive")
    if pmax < 1:
        raise ValueError("pmax must be >= 1")
    if symmetric:
        coeffs, mirror = centered_even(k.f), None
    else:
        g = kernel if kernel is not None else k.f
        # nodes past 1/2 go through g(1 - x) so Horner never works near a root at x = 1
        coeffs, mirror = _coeff_array(g), _coeff_array(reflect(g))
    mant, expo, status, _ = _run(coeffs, y, pmax, symmetric, threads, deterministic, mirror)
    return ScaledArray(mant, expo, saturated=status != 0)


class Classification(str, Enum):
    SUBCRITICAL = "Subcritical"
    SUPERCRITICAL = "Supercritical"
    INDETERMINATE = "Indeterminate"


def classify_y(t: SequenceTable, y: float) -> Classification:
    """Which side of the separating value ``y`` falls on, judged from the tail of a_p."""
    tail = t.a[max(t.pmax // 2, 1):]
    lo, hi = float(np.min(tail)), float(np.max(tail))
    margin = 3.0 * 0.5 * (hi - lo)
    if y < lo - margin:
        return Classification.SUBCRITICAL
    if y > hi + margin:
        return Classification.SUPERCRITICAL
    return Classification.INDETERMINATE
