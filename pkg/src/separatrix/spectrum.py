"""Characteristic exponents: moments of f1 as rational functions of sigma,
the characteristic polynomial, its complex roots, and Assumption 3."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .errors import NoConvergence
from .kernels import Kernels
from .polyalg import Poly, evaluate

ROOT_TOL = 1e-10
BOUNDARY_BAND = 1e-9
STRIP_EDGE = -1.0


@dataclass(frozen=True)
class RationalFunction:
    num: Poly
    den: Poly

    def __call__(self, s):
        return evaluate(self.num, s) / evaluate(self.den, s)


class MomentFunctions(NamedTuple):
    F1: RationalFunction
    F3: RationalFunction


def _linear(k: float) -> Poly:
    """The polynomial sigma + k."""
    return Poly([k, 1.0])


def _moment_rational(d: Poly) -> RationalFunction:
    """sum_k d_k / (sigma + k + 1) over the common denominator prod (sigma + k + 1)."""
    n = d.degree
    den = Poly([1.0])
    for k in range(n + 1):
        den = den * _linear(k + 1)
    num = Poly()
    for k, dk in enumerate(d.coeffs):
        if dk == 0:
            continue
        part = Poly([dk])
        for j in range(n + 1):
            if j != k:
                part = part * _linear(j + 1)
        num = num + part
    return RationalFunction(num, den)


def moment_functions(k: Kernels) -> MomentFunctions:
    F1 = _moment_rational(k.f1)
    sigma = Poly([0.0, 1.0])
    top = sigma * F1.num - F1.den
    q, _ = top.divide_linear(1.0)
    return MomentFunctions(F1, RationalFunction(q, F1.den))


def char_poly(k: Kernels) -> Poly:
    F1 = moment_functions(k).F1
    return F1.den - F1.num


def moment_f1(k: Kernels, s: complex) -> tuple[complex, complex]:
    """F1(s) and F1'(s) from f's coefficients, free of binomial cancellation.

    int t^s f(t) dt contributes c_j/(s+j+1) and int t^s f(1-t) dt
    contributes c_j j!/((s+1)...(s+j+1)).
    """
    val = 0j
    der = 0j
    t = 1.0 / (s + 1.0)
    logd = 1.0 / (s + 1.0)
    for j, cj in enumerate(k.f.coeffs):
        if j > 0:
            t = t * j / (s + j + 1.0)
            logd = logd + 1.0 / (s + j + 1.0)
        if cj == 0:
            continue
        inv = 1.0 / (s + j + 1.0)
        val += cj * (inv + t)
        der += cj * (-inv * inv - t * logd)
    return val, der


@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int
    residual: float

    @property
    def re(self) -> float:
        return self.value.real

    @property
    def im(self) -> float:
        return self.value.imag


def _aberth(c: np.ndarray, logderiv=None, max_iter: int = 500, tol: float = 1e-12):
    """Simultaneous Aberth-Ehrlich iteration on coefficients (lowest first).

    ``logderiv`` evaluates p'/p on an array; by default it is computed from
    the coefficients, which is only trustworthy for modest degrees.
    """
    n = len(c) - 1
    a = c / c[-1]
    # Fujiwara bound for the initial circle
    radius = 2.0 * max(abs(a[n - k]) ** (1.0 / k) for k in range(1, n + 1))
    radius = max(radius, 1e-3)
    z = radius * np.exp(2j * np.pi * (np.arange(n) + 0.25) / n)
    if logderiv is None:
        dc = np.array([k * a[k] for k in range(1, n + 1)])

        def logderiv(x):
            return np.polynomial.polynomial.polyval(x, dc) / np.polynomial.polynomial.polyval(x, a)

    converged = False
    for _ in range(max_iter):
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            L = logderiv(z)
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            w = 1.0 / (L - inv.sum(axis=1))
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= tol * np.maximum(np.abs(z), 1.0)):
            converged = True
            break
    return z, converged


def _pair_conjugates(z: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    z = z.copy()
    used = np.zeros(len(z), dtype=bool)
    for i in range(len(z)):
        if used[i]:
            continue
        scale = max(1.0, abs(z[i]))
        if abs(z[i].imag) <= tol * scale:
            z[i] = complex(z[i].real, 0.0)
            used[i] = True
            continue
        cand = [j for j in range(len(z)) if not used[j] and j != i]
        if not cand:
            used[i] = True
            continue
        j = min(cand, key=lambda j: abs(z[j] - np.conj(z[i])))
        m = 0.5 * (z[i] + np.conj(z[j]))
        z[i], z[j] = m, np.conj(m)
        used[i] = used[j] = True
    return z


def _cluster(z: np.ndarray, tol: float = 1e-6):
    groups: list[list[complex]] = []
    for v in z:
        for g in groups:
            if abs(g[0] - v) <= tol * max(1.0, abs(v)):
                g.append(v)
                break
        else:
            groups.append([v])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def find_roots(
    p: Poly,
    polish: Callable[[complex], tuple[complex, complex]] | None = None,
    *,
    logderiv: Callable[[np.ndarray], np.ndarray] | None = None,
    max_iter: int = 500,
    tol: float = ROOT_TOL,
) -> list[Root]:
    """All complex roots of ``p``.

    ``polish`` optionally maps s to (g(s), g'(s)) for a function sharing the
    roots of p; simple roots are Newton-refined against it and residuals are
    reported as |g|.  Without it the residual is |p(s)| / max|coeff|.
    ``logderiv`` replaces p'/p inside the iteration when the expanded
    coefficients are too ill-conditioned to evaluate directly.
    """
    if p.degree < 1:
        raise ValueError("find_roots needs degree >= 1")
    c = np.asarray(p.coeffs, dtype=float)
    norm = float(np.max(np.abs(c)))
    if p.degree == 1:
        z, converged = np.array([complex(-c[0] / c[1])]), True
    else:
        z, converged = _aberth(c, logderiv=logderiv, max_iter=max_iter)

    def resid(s):
        if polish is not None:
            return abs(polish(s)[0])
        return abs(evaluate(p, s)) / norm

    roots = []
    for val, mult in _cluster(z):
        if polish is not None and mult == 1:
            for _ in range(50):
                g, dg = polish(val)
                if dg == 0 or not cmath.isfinite(g / dg):
                    break
                step = g / dg
                val = val - step
                if abs(step) <= 1e-16 * max(1.0, abs(val)):
                    break
        roots.append([val, mult])
    vals = _pair_conjugates(np.array([r[0] for r in roots]))
    out = [Root(complex(v), m, float(resid(complex(v)))) for v, (_, m) in zip(vals, roots)]
    out.sort(key=lambda r: (-r.re, r.im))
    # the Aberth step test can stall at rounding level; residuals decide
    bad = [r for r in out if r.residual > tol]
    if bad:
        raise NoConvergence(
            f"root iteration did not reach residual {tol:g}",
            roots=[r.value for r in out],
            residuals=[r.residual for r in out],
        )
    return out


@dataclass(frozen=True)
class Spectrum:
    char_poly: Poly
    all_roots: list
    sigma_prime: list
    sigma1: float
    delta: float | None
    assumption3: str
    trivial_root: Root | None = None
    delta_rule: str = "delta = min(1/4, -sigma1/2); -1/2 and 1/4 when Sigma' is empty"
    notes: list = field(default_factory=list)

    @property
    def dominant(self) -> complex | None:
        """Element of Sigma' with the largest real part and Im >= 0."""
        if not self.sigma_prime:
            return None
        best = max(self.sigma_prime, key=lambda r: (r.re, r.im))
        return complex(best.re, abs(best.im))


def build_spectrum(k: Kernels) -> Spectrum:
    P = char_poly(k)

    def g(s):
        v, d = moment_f1(k, s)
        return v - 1.0, d

    n1 = k.f1.degree

    def logderiv(s):
        # P = D (1 - F1), so P'/P = D'/D - F1'/(1 - F1)
        v, d = moment_f1(k, s)
        dd = sum(1.0 / (s + j + 1.0) for j in range(n1 + 1))
        return dd - d / (1.0 - v)

    roots = find_roots(P, polish=g, logderiv=logderiv)
    trivial = min(roots, key=lambda r: abs(r.value - 1.0))
    notes = []
    if abs(trivial.value - 1.0) > 1e-6:
        notes.append("no root at sigma = 1")
        trivial = None
    others = [r for r in roots if r is not trivial]
    sigma_prime = [r for r in others if r.re > STRIP_EDGE]
    if sigma_prime:
        sigma1 = max(r.re for r in sigma_prime)
    else:
        sigma1 = -0.5
    if not sigma_prime:
        delta = 0.25
    elif sigma1 < 0:
        delta = min(0.25, -sigma1 / 2.0)
    else:
        delta = None
        notes.append("sigma1 >= 0: no admissible delta")
    if any(r.re > BOUNDARY_BAND for r in others):
        verdict = "Fails"
    elif all(r.re < -BOUNDARY_BAND for r in others):
        verdict = "Holds"
    else:
        verdict = "Boundary"
    return Spectrum(
        char_poly=P, all_roots=roots, sigma_prime=sigma_prime, sigma1=sigma1, delta=delta,
        assumption3=verdict, trivial_root=trivial, notes=notes,
    )
