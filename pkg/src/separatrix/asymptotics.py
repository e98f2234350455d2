"""Checks on a computed sequence: the inductive inequalities, residuals of the
derived a- and b-recurrences, log-periodic fits of b_p, and the limit a_inf."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import engine
from .errors import DegenerateFit
from .kernels import Kernels
from .spectrum import Spectrum


@dataclass(frozen=True)
class Violation:
    p: int
    which: str  # "LowerBoundB" or "DecayA"
    lhs: float
    rhs: float


@dataclass(frozen=True)
class VerificationReport:
    A: float
    B: float
    delta: float
    p0: int
    violations: list
    passed: bool
    minimal_A: float
    argmax_p: int


def _abs_diff_a(t: engine.SequenceTable) -> np.ndarray:
    """|a_p - a_{p-1}| for p >= 2, computed as a_{p-1} |b_p| / p^2."""
    p = np.arange(t.pmax + 1, dtype=float)
    out = np.full(t.pmax + 1, np.nan)
    out[2:] = t.a[1:-1] * np.abs(t.b[2:]) / p[2:] ** 2
    return out


def verify_inductive(t: engine.SequenceTable, A: float, B: float, delta: float) -> VerificationReport:
    """Check B <= a_p and |a_p - a_{p-1}| <= A / p^(2+delta) over the table.

    ``p0`` is the largest p up to which both inequalities hold without a
    break; ``minimal_A`` is the smallest A that makes the decay inequality
    hold at every computed p.
    """
    if not (A > 1 > B > 0):
        raise ValueError(f"need A > 1 > B > 0, got A={A}, B={B}")
    if not (0 < delta < 0.5):
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    p = np.arange(t.pmax + 1, dtype=float)
    diff = _abs_diff_a(t)
    bound = A / p[2:] ** (2 + delta)
    violations = []
    first_bad = t.pmax + 1
    for q in range(1, t.pmax + 1):
        if t.a[q] < B:
            violations.append(Violation(q, "LowerBoundB", float(B), float(t.a[q])))
            first_bad = min(first_bad, q)
    bad = np.nonzero(diff[2:] > bound)[0]
    for i in bad:
        q = int(i) + 2
        violations.append(Violation(q, "DecayA", float(diff[q]), float(bound[i])))
        first_bad = min(first_bad, q)
    violations.sort(key=lambda v: (v.p, v.which))
    scaled = diff[2:] * p[2:] ** (2 + delta)
    if scaled.size:
        i = int(np.argmax(scaled))
        minimal_A, argmax_p = float(scaled[i]), i + 2
    else:
        minimal_A, argmax_p = 0.0, 1
    return VerificationReport(
        A=A, B=B, delta=delta, p0=first_bad - 1, violations=violations,
        passed=not violations, minimal_A=minimal_A, argmax_p=argmax_p,
    )


@dataclass(frozen=True)
class ResidualSeries:
    kind: str  # "Linearized" or "ARecurrence"
    p: np.ndarray
    values: np.ndarray
    block_starts: np.ndarray
    block_medians: np.ndarray
    fitted_decay_exponent: float
    fit_from: int = 64

    def median_at(self, p: int) -> float:
        """Median |residual| of the dyadic block containing ``p``."""
        i = int(np.searchsorted(self.block_starts, p, side="right")) - 1
        return float(self.block_medians[i])


def _summarize(kind: str, r: np.ndarray, pmax: int, fit_from: int = 64) -> ResidualSeries:
    p = np.arange(2, pmax)
    vals = r[2:pmax]
    starts, meds, centers = [], [], []
    lo = 2
    while lo < pmax:
        hi = min(2 * lo, pmax)
        seg = np.abs(vals[lo - 2:hi - 2])
        starts.append(lo)
        meds.append(float(np.median(seg)))
        centers.append(np.sqrt(lo * (hi - 1)))
        lo = 2 * lo
    starts, meds, centers = np.array(starts), np.array(meds), np.array(centers)
    use = (starts >= fit_from) & (meds > 0)
    if use.sum() >= 2:
        slope = float(np.polyfit(np.log(centers[use]), np.log(meds[use]), 1)[0])
    else:
        slope = float("nan")
    return ResidualSeries(kind, p, vals, starts, meds, slope, fit_from)


def residual_linearized(t: engine.SequenceTable, k: Kernels, threads: int | None = 1) -> ResidualSeries:
    """r_p = b_{p+1} - (1/p) sum_{q=2}^{p} b_q f3(q/p), 2 <= p < pmax."""
    if t.pmax < 64:
        raise ValueError("residual checks need pmax >= 64")
    b = np.where(np.isnan(t.b), 0.0, t.b)
    r = engine._backend.linearized_residual(
        np.ascontiguousarray(b), engine._coeff_array(k.f3), t.pmax, engine.resolve_threads(threads)
    )
    return _summarize("Linearized", r, t.pmax)


def residual_a_recurrence(t: engine.SequenceTable, k: Kernels, threads: int | None = 1) -> ResidualSeries:
    """(p+1)(a_{p+1}-a_p)/a_p + sum_{p1<=p} (p1/p) f2(p1/(p+1)) (a_p-a_p1)/a_p1 / (p-1)."""
    if t.pmax < 64:
        raise ValueError("residual checks need pmax >= 64")
    lna = np.where(np.isnan(t.log_a), 0.0, t.log_a)
    r = engine._backend.a_recurrence_residual(
        np.ascontiguousarray(lna), engine._coeff_array(k.f2), t.pmax, engine.resolve_threads(threads)
    )
    return _summarize("ARecurrence", r, t.pmax)


@dataclass(frozen=True)
class AsymptoticFit:
    sigma: complex
    amplitude: float
    phase: float
    rms_error: float
    zero_interlacing: bool
    p_lo: int
    p_hi: int
    p: np.ndarray = field(repr=False)
    b_rescaled: np.ndarray = field(repr=False)
    cos_ref: np.ndarray = field(repr=False)
    zeros_b: list = field(default_factory=list)
    zeros_ref: list = field(default_factory=list)


def default_p_lo(pmax: int) -> int:
    return max(100, pmax // 100)


def _sign_changes(y: np.ndarray, p: np.ndarray) -> list:
    s = np.sign(y)
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    # linear interpolation of the crossing between p[i] and p[i+1]
    return [float(p[i] + y[i] / (y[i] - y[i + 1]) * (p[i + 1] - p[i])) for i in idx]


def _alternate(z1: list, z2: list) -> bool:
    if not z1 or not z2:
        return False
    merged = sorted([(z, 0) for z in z1] + [(z, 1) for z in z2])
    return all(a[1] != b[1] for a, b in zip(merged, merged[1:]))


def fit_log_periodic(t: engine.SequenceTable, s: Spectrum, p_lo: int | None = None,
                     p_hi: int | None = None) -> AsymptoticFit:
    """Fit b_p p^(-Re sigma1) ~ c1 cos(nu ln p) + c2 sin(nu ln p), nu = Im sigma1.

    Amplitude and phase describe amplitude * cos(nu ln p + phase).
    ``zero_interlacing`` holds when the sign changes of the rescaled b_p and
    of the reference cos(nu ln p) alternate over the window.
    """
    sigma = s.dominant
    if sigma is None:
        raise DegenerateFit("Sigma' is empty; no oscillatory mode to fit")
    p_lo = default_p_lo(t.pmax) if p_lo is None else p_lo
    p_hi = t.pmax if p_hi is None else min(p_hi, t.pmax)
    if p_lo < 16:
        raise ValueError("p_lo must be >= 16")
    if p_hi - p_lo < 8:
        raise ValueError("fit window too short")
    p = np.arange(p_lo, p_hi + 1)
    pf = p.astype(float)
    y = t.b[p_lo:p_hi + 1] * pf ** (-sigma.real)
    L = np.log(pf)
    X = np.column_stack([np.cos(sigma.imag * L), np.sin(sigma.imag * L)])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    amplitude = float(np.hypot(coef[0], coef[1]))
    if amplitude < 1e-12 or not np.any(np.abs(y) > 1e-12):
        raise DegenerateFit("rescaled b_p is identically ~0")
    phase = float(np.arctan2(-coef[1], coef[0]))
    rms = float(np.sqrt(np.mean((y - X @ coef) ** 2)))
    ref = X[:, 0]
    zb = _sign_changes(y, pf)
    zr = _sign_changes(ref, pf)
    return AsymptoticFit(
        sigma=sigma, amplitude=amplitude, phase=phase, rms_error=rms,
        zero_interlacing=_alternate(zb, zr), p_lo=p_lo, p_hi=p_hi,
        p=p, b_rescaled=y, cos_ref=ref, zeros_b=zb, zeros_ref=zr,
    )


@dataclass(frozen=True)
class LimitEstimate:
    raw: float
    extrapolated: float
    uncertainty: float
    model: str
    window: tuple


EMPTY_SPECTRUM_EXPONENT = -1.5


def estimate_a_inf(t: engine.SequenceTable, s: Spectrum) -> LimitEstimate:
    """Extrapolate a_p over the top half of the table.

    Model a_inf + p^(sigma1-1) (c1 cos(nu ln p) + c2 sin(nu ln p)) with the
    dominant characteristic exponent; a_inf + c p^(-3/2) when Sigma' is empty.
    """
    lo = max(t.pmax // 2, 2)
    p = np.arange(lo, t.pmax + 1).astype(float)
    y = t.a[lo:]
    sigma = s.dominant
    if sigma is None:
        X = np.column_stack([np.ones_like(p), p ** EMPTY_SPECTRUM_EXPONENT])
        model = "a_inf + c*p^(-3/2)"
    elif sigma.imag == 0:
        X = np.column_stack([np.ones_like(p), p ** (sigma.real - 1)])
        model = f"a_inf + c*p^({sigma.real:.6g}-1)"
    else:
        w = p ** (sigma.real - 1)
        L = np.log(p)
        X = np.column_stack([np.ones_like(p), w * np.cos(sigma.imag * L), w * np.sin(sigma.imag * L)])
        model = f"a_inf + p^({sigma.real:.6g}-1)*(c1*cos({sigma.imag:.6g}*ln p)+c2*sin(...))"
    # center the constant column for conditioning
    ref = float(np.mean(y))
    coef, *_ = np.linalg.lstsq(X, y - ref, rcond=None)
    extrapolated = ref + float(coef[0])
    raw = float(t.a[t.pmax])
    dec = t.a[max(int(0.9 * t.pmax), 1):]
    spread = float(np.max(dec) - np.min(dec))
    return LimitEstimate(
        raw=raw, extrapolated=extrapolated, uncertainty=max(abs(raw - extrapolated), spread),
        model=model, window=(lo, t.pmax),
    )
