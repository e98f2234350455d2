"""Kernel normalization, the derived kernels f1, f2, f3, and a certified
positivity check for f1 on [0, 1]."""

from __future__ import annotations

import heapq
import logging
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateKernel, NonPositiveIntegral
from .polyalg import Poly, derivative, evaluate, integral_01, reflect

log = logging.getLogger(__name__)

_EPS = sys.float_info.epsilon


@dataclass(frozen=True)
class Kernels:
    f: Poly
    K: float
    f1: Poly
    f2: Poly
    f3: Poly
    basis: str = "f1"

    @property
    def f_raw(self) -> Poly:
        return self.f * self.K


def _integrated_weight(g: Poly) -> Poly:
    """f3 from f2 in closed form: -(1/x^2) * int_0^x t g(t) dt."""
    return Poly([-e / (k + 2) for k, e in enumerate(g.coeffs)])


def build_kernels(f_raw: Poly, basis: str = "f1") -> Kernels:
    """Normalize ``f_raw`` to unit mass and derive f1, f2, f3.

    ``basis`` selects what f2 and f3 are built from: the symmetrized kernel
    f1 (default) or the normalized f itself.
    """
    if basis not in ("f1", "f"):
        raise ValueError(f"basis must be 'f1' or 'f', got {basis!r}")
    if f_raw.is_zero:
        raise DegenerateKernel("kernel is the zero polynomial")
    K = integral_01(f_raw)
    if not K > 0:
        raise NonPositiveIntegral(f"integral of f over [0,1] is {K!r}, must be positive")
    f = f_raw / K
    f1 = f + reflect(f)
    src = f1 if basis == "f1" else f
    f2 = -derivative(Poly((0.0,) + src.coeffs))
    f3 = _integrated_weight(f2)
    if abs(evaluate(f, 1.0)) > 1e-12:
        log.warning("f(1) = %.6g is nonzero; only f1 enters the recurrence", evaluate(f, 1.0))
    return Kernels(f=f, K=K, f1=f1, f2=f2, f3=f3, basis=basis)


@dataclass(frozen=True)
class PositivityReport:
    min_value: float
    min_location: float
    passed: bool
    status: str  # "positive", "nonpositive" or "inconclusive"
    lower_bound: float


def _local_minimum(p: Poly) -> tuple[float, float]:
    """Best sampled minimum over endpoints and real critical points."""
    cands = [0.0, 1.0]
    d = derivative(p)
    if d.degree >= 1:
        for r in np.roots(d.coeffs[::-1]):
            if abs(r.imag) <= 1e-9 * max(1.0, abs(r.real)) and -1e-12 <= r.real <= 1 + 1e-12:
                cands.append(min(max(r.real, 0.0), 1.0))
    vals = [evaluate(p, x) for x in cands]
    k = int(np.argmin(vals))
    return vals[k], cands[k]


def check_positivity(f1: Poly, width_floor: float = 1e-12, max_nodes: int = 200_000) -> PositivityReport:
    """Certify the sign of min f1 on [0, 1] by branch and bound.

    Each subinterval of half-width r around c gets the lower bound
    max(f(c) - L1 r, f(c) - |f'(c)| r - L2 r^2 / 2) with L1 = sum k|c_k| and
    L2 = sum k(k-1)|c_k|, minus a Horner rounding allowance.
    """
    c = np.asarray(f1.coeffs, dtype=float)
    if c.size == 0:
        return PositivityReport(0.0, 0.0, False, "nonpositive", 0.0)
    k = np.arange(c.size)
    L1 = float(np.sum(k * np.abs(c)))
    L2 = float(np.sum(k * (k - 1) * np.abs(c)))
    round_err = 4 * c.size * _EPS * float(np.sum(np.abs(c)))
    d1 = derivative(f1)

    min_val, min_loc = _local_minimum(f1)

    def lower(a, b):
        mid = 0.5 * (a + b)
        r = 0.5 * (b - a)
        fc = evaluate(f1, mid)
        lb1 = fc - L1 * r
        lb2 = fc - abs(evaluate(d1, mid)) * r - 0.5 * L2 * r * r
        return fc, max(lb1, lb2) - round_err, mid

    heap = []
    fc, lb, mid = lower(0.0, 1.0)
    heapq.heappush(heap, (lb, 0.0, 1.0, fc, mid))
    certified_lb = np.inf
    for x in (0.0, 1.0):
        if evaluate(f1, x) <= 0:
            return PositivityReport(min(min_val, evaluate(f1, x)), x, False, "nonpositive", -np.inf)
    nodes = 0
    while heap:
        lb, a, b, fc, mid = heapq.heappop(heap)
        if fc <= 0:
            if fc < min_val:
                min_val, min_loc = fc, mid
            return PositivityReport(min_val, min_loc, False, "nonpositive", -np.inf)
        if lb > 0:
            certified_lb = min(certified_lb, lb)
            # smallest remaining bound is positive, so all of them are
            for item in heap:
                certified_lb = min(certified_lb, item[0])
            return PositivityReport(min_val, min_loc, True, "positive", certified_lb)
        nodes += 1
        if b - a < width_floor or nodes > max_nodes:
            return PositivityReport(min_val, min_loc, False, "inconclusive", lb)
        for lo, hi in ((a, mid), (mid, b)):
            fc2, lb2, m2 = lower(lo, hi)
            heapq.heappush(heap, (lb2, lo, hi, fc2, m2))
    return PositivityReport(min_val, min_loc, False, "inconclusive", -np.inf)
