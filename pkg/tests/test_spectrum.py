import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import CONSTANT, REFERENCE_KERNELS, kernels_for, spectrum_for
from separatrix.errors import NoConvergence
from separatrix.kernels import build_kernels, check_positivity
from separatrix.polyalg import Poly, evaluate, integral_01, parse_poly
from separatrix.spectrum import build_spectrum, char_poly, find_roots, moment_f1, moment_functions

SQRT15_2 = math.sqrt(15) / 2

# random kernels with certified-positive f1
positive_kernels = (
    st.lists(st.integers(-5, 9), min_size=1, max_size=9)
    .map(Poly)
    .filter(lambda p: integral_01(p) > 0.1)
    .map(build_kernels)
    .filter(lambda k: check_positivity(k.f1).passed)
)


def random_sigmas(rng, n, radius=5.0):
    out = []
    while len(out) < n:
        s = complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))
        # stay away from the poles at -1, -2, ...
        if abs(s) <= radius and min(abs(s + k) for k in range(1, 20)) > 0.1 and abs(s - 1) > 0.1:
            out.append(s)
    return out


def test_moment_examples():
    F1 = moment_functions(kernels_for(CONSTANT)).F1
    for s in (0.0, 1.0, 2.5, 1 + 2j):
        assert cmath.isclose(F1(s), 2 / (s + 1), rel_tol=1e-15)
    F1 = moment_functions(kernels_for(REFERENCE_KERNELS["quadratic"])).F1
    assert F1.num == Poly([12, 8, 4])
    assert F1.den == Poly([6, 11, 6, 1])
    for text in (CONSTANT, *REFERENCE_KERNELS.values()):
        assert math.isclose(moment_functions(kernels_for(text)).F1(1.0).real, 1.0, abs_tol=1e-12)


@pytest.mark.parametrize("text", REFERENCE_KERNELS.values())
def test_moments_against_quadrature(text):
    k = kernels_for(text)
    F1 = moment_functions(k).F1
    rng = np.random.default_rng(7)
    for _ in range(8):
        s = complex(rng.uniform(-0.5, 4), rng.uniform(-3, 3))
        ref = oracles.moment_quad(k.f1.coeffs, s)
        assert cmath.isclose(moment_f1(k, s)[0], ref, rel_tol=1e-9, abs_tol=1e-12)
        assert cmath.isclose(F1(s), ref, rel_tol=1e-9, abs_tol=1e-12)


def test_moment_f1_derivative():
    k = kernels_for(REFERENCE_KERNELS["x8"])
    s, h = 0.3 + 0.7j, 1e-6
    v, d = moment_f1(k, s)
    fd = (moment_f1(k, s + h)[0] - moment_f1(k, s - h)[0]) / (2 * h)
    assert cmath.isclose(d, fd, rel_tol=1e-7)


def test_char_poly_examples():
    assert char_poly(kernels_for(CONSTANT)) == Poly([-1, 1])
    assert char_poly(kernels_for(REFERENCE_KERNELS["quadratic"])) == Poly([-6, 3, 2, 1])
    assert char_poly(kernels_for(REFERENCE_KERNELS["x8"])).degree == 9


def test_find_roots_examples():
    roots = find_roots(Poly([-6, 3, 2, 1]))
    vals = sorted((r.value for r in roots), key=lambda z: (z.real, z.imag))
    assert cmath.isclose(vals[0], complex(-1.5, -SQRT15_2), abs_tol=1e-12)
    assert cmath.isclose(vals[1], complex(-1.5, SQRT15_2), abs_tol=1e-12)
    assert cmath.isclose(vals[2], 1.0, abs_tol=1e-12)
    assert math.isclose(SQRT15_2, 1.9364917, abs_tol=1e-7)
    (one,) = find_roots(Poly([-1, 1]))
    assert one.value == 1 and one.multiplicity == 1


def test_find_roots_multiplicity():
    roots = find_roots(Poly([1, -2, 1]))  # (s-1)^2
    assert len(roots) == 1 and roots[0].multiplicity == 2
    assert cmath.isclose(roots[0].value, 1.0, abs_tol=1e-6)


def test_find_roots_reports_nonconvergence():
    with pytest.raises(NoConvergence) as exc:
        find_roots(char_poly(kernels_for(REFERENCE_KERNELS["x12"])), max_iter=1)
    assert len(exc.value.roots) == len(exc.value.residuals) > 0


@pytest.mark.parametrize("text", [CONSTANT, *REFERENCE_KERNELS.values()])
def test_roots_against_companion_matrix(text):
    P = char_poly(kernels_for(text))
    ref = np.roots(P.coeffs[::-1])
    got = np.array([r.value for r in spectrum_for(text).all_roots for _ in range(r.multiplicity)])
    assert len(got) == len(ref)
    for z in ref:
        assert np.min(np.abs(got - z)) <= 1e-7 * max(1, abs(z))


@pytest.mark.parametrize("text", [CONSTANT, *REFERENCE_KERNELS.values()])
def test_spectrum_invariants(text):
    k = kernels_for(text)
    s = spectrum_for(text)
    P, F = s.char_poly, moment_functions(k)
    assert abs(evaluate(P, 1.0)) <= 1e-9 * max(abs(c) for c in P.coeffs)
    assert s.trivial_root is not None and abs(s.trivial_root.value - 1) <= 1e-10
    for r in s.all_roots:
        assert abs(moment_f1(k, r.value)[0] - 1) <= 1e-10
        assert abs(r.value) > 1e-3  # F1(0) = 2, so 0 is never a root
    # the expanded num/den form is only well conditioned inside the strip
    for r in s.sigma_prime:
        assert abs(F.F1(r.value) - 1) <= 1e-10
    assert math.isclose(F.F3(0.0).real, 1.0, abs_tol=1e-12)
    expected = [r for r in s.all_roots if r is not s.trivial_root and r.re > -1]
    assert s.sigma_prime == expected
    assert len(s.sigma_prime) <= k.f1.degree
    if s.sigma_prime and s.sigma1 < 0:
        assert s.delta < -s.sigma1
    # conjugate pairs
    vals = [r.value for r in s.all_roots]
    for z in vals:
        assert min(abs(w - z.conjugate()) for w in vals) <= 1e-12 * max(1, abs(z))


@pytest.mark.parametrize("text", REFERENCE_KERNELS.values())
def test_f1_f3_relation(text):
    F = moment_functions(kernels_for(text))
    for s in random_sigmas(np.random.default_rng(11), 20):
        lhs = s / (s - 1) * F.F1(s) - 1 / (s - 1)
        assert cmath.isclose(lhs, F.F3(s), rel_tol=1e-10, abs_tol=1e-12)


def test_f3_moment_against_f3_kernel():
    # F3(s) is also the moment of the polynomial f3 itself
    k = kernels_for(REFERENCE_KERNELS["x8"])
    F3 = moment_functions(k).F3
    for s in (0.0, 0.5, 1.5 + 1j, -0.5 + 2j):
        assert cmath.isclose(F3(s), oracles.moment_quad(k.f3.coeffs, s), rel_tol=1e-9)


@pytest.mark.parametrize("K", [0.01, 3.0, 250.0])
def test_roots_invariant_under_scaling(K):
    base = spectrum_for(REFERENCE_KERNELS["x8"])
    s = build_spectrum(build_kernels(parse_poly("9x^8") * K))
    for r, q in zip(sorted(base.all_roots, key=lambda r: (r.re, r.im)), sorted(s.all_roots, key=lambda r: (r.re, r.im))):
        assert abs(r.value - q.value) <= 1e-8


def test_spectrum_quadratic():
    s = spectrum_for(REFERENCE_KERNELS["quadratic"])
    assert s.sigma_prime == [] and s.dominant is None
    assert s.sigma1 == -0.5 and s.delta == 0.25 and s.assumption3 == "Holds"
    assert any(cmath.isclose(r.value, complex(-1.5, SQRT15_2), abs_tol=1e-9) for r in s.all_roots)


def test_spectrum_x8():
    s = spectrum_for(REFERENCE_KERNELS["x8"])
    target = complex(-0.234067, 2.11581)
    assert any(abs(r.value - target) <= 1e-5 for r in s.sigma_prime)
    assert abs(s.dominant - target) <= 1e-5
    assert math.isclose(s.sigma1, -0.234067, abs_tol=1e-6)
    assert math.isclose(s.delta, 0.117, abs_tol=1e-3)
    assert s.assumption3 == "Holds"


def test_spectrum_x12():
    s = spectrum_for(REFERENCE_KERNELS["x12"])
    target = complex(0.105896, 1.97567)
    assert any(abs(r.value - target) <= 1e-5 for r in s.sigma_prime)
    assert s.assumption3 == "Fails" and s.delta is None


def test_high_degree_kernel():
    k = build_kernels(Poly.monomial(40))
    s = build_spectrum(k)
    assert sum(r.multiplicity for r in s.all_roots) == s.char_poly.degree == 41
    assert max(r.residual for r in s.all_roots) <= 1e-10


@given(positive_kernels)
@settings(max_examples=25, deadline=None)
def test_random_kernels(k):
    s = build_spectrum(k)
    assert sum(r.multiplicity for r in s.all_roots) == s.char_poly.degree
    assert s.trivial_root is not None
    assert all(r.residual <= 1e-10 for r in s.all_roots)
    assert math.isclose(moment_functions(k).F3(0.0).real, 1.0, abs_tol=1e-12)
    assert s.assumption3 in ("Holds", "Fails", "Boundary")
