"""Acceptance gate.  Each test records a PASS/FAIL line that is printed in
the 'acceptance criteria' section at the end of the pytest run."""

import cmath
import math
import subprocess
import sys
import time

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import CONSTANT, REFERENCE_KERNELS, kernels_for, record, spectrum_for, table_for
from separatrix import asymptotics, engine
from separatrix.kernels import build_kernels
from separatrix.polyalg import Poly, evaluate, integral_01, parse_poly, reflect
from separatrix.spectrum import build_spectrum, char_poly, moment_functions

Q, X8, X12 = REFERENCE_KERNELS["quadratic"], REFERENCE_KERNELS["x8"], REFERENCE_KERNELS["x12"]
CLI = [sys.executable, "-m", "separatrix.cli"]


def check(criterion, ok, detail):
    record(criterion, bool(ok), detail)
    assert ok, f"{criterion}: {detail}"


def timed_limit(threads):
    t0 = time.perf_counter()
    res = subprocess.run([*CLI, "limit", "--f", Q, "--pmax", "20000", "--threads", str(threads)],
                         capture_output=True, text=True, check=True)
    elapsed = time.perf_counter() - t0
    line = next(l for l in res.stdout.splitlines() if l.startswith("a_inf (extrapolated)"))
    return float(line.split(":")[1]), elapsed


# 1 -------------------------------------------------------------------------

def test_ac1_flagship_limit_single_thread():
    value, elapsed = timed_limit(1)
    ok = abs(value - 1.412729) <= 1e-5 and elapsed <= 120
    check("AC1 flagship limit", ok, f"a_inf = {value:.9f} (target 1.412729 +- 1e-5), 1 thread {elapsed:.1f} s (<= 120 s)")


def test_ac1_flagship_limit_eight_threads():
    value, elapsed = timed_limit(8)
    ok = abs(value - 1.412729) <= 1e-5 and elapsed <= 15
    check("AC1 flagship limit", ok, f"8 threads {elapsed:.1f} s (<= 15 s)")


# 2 -------------------------------------------------------------------------

def test_ac2_oscillatory_limit():
    est = asymptotics.estimate_a_inf(table_for(X8, 20000), spectrum_for(X8))
    ok = abs(est.extrapolated - 2.95072) <= 5e-4
    check("AC2 oscillatory case", ok,
          f"a_inf = {est.extrapolated:.6f} (raw a_20000 = {est.raw:.6f}; target 2.95072 +- 5e-4)")


def test_ac2_oscillatory_root():
    s = spectrum_for(X8)
    dist = min(abs(r.value - complex(-0.234067, 2.11581)) for r in s.all_roots)
    check("AC2 oscillatory case", dist <= 1e-4, f"root -0.234067+2.11581i found within {dist:.1e}")


def test_ac2_zero_interlacing():
    fit = asymptotics.fit_log_periodic(table_for(X8, 20000), spectrum_for(X8), p_lo=1000, p_hi=20000)
    check("AC2 oscillatory case", fit.zero_interlacing,
          f"zero_interlacing = {fit.zero_interlacing} on [1000, 20000]")


# 3 -------------------------------------------------------------------------

def test_ac3_beyond_theorem():
    s = spectrum_for(X12)
    dist = min(abs(r.value - complex(0.105896, 1.97567)) for r in s.all_roots)
    est = asymptotics.estimate_a_inf(table_for(X12, 20000), s)
    ok = dist <= 1e-4 and s.assumption3 == "Fails" and abs(est.extrapolated - 3.688371) <= 1e-2
    check("AC3 beyond-theorem case", ok,
          f"root within {dist:.1e}, Assumption 3 {s.assumption3}, a_inf = {est.extrapolated:.6f} (3.688371 +- 1e-2)")


# 4 -------------------------------------------------------------------------

def test_ac4_empty_sigma_prime():
    s = spectrum_for(Q)
    pair = [r for r in s.all_roots if cmath.isclose(r.value.real, -1.5, abs_tol=1e-9)
            and math.isclose(abs(r.im), math.sqrt(15) / 2, abs_tol=1e-9)]
    t = table_for(Q, 8192)
    pb = abs(8192 * t.b[8192])
    ok = s.sigma_prime == [] and len(pair) == 2 and all(r.re <= -1 for r in pair) and pb < 0.05
    check("AC4 empty Sigma'", ok, f"|Sigma'| = {len(s.sigma_prime)}, pair at -1.5+-i sqrt(15)/2 listed "
          f"{len(pair) == 2}, |p b_p| at 8192 = {pb:.4f} (< 0.05)")


# 5 -------------------------------------------------------------------------

def test_ac5_oracle_equivalence():
    t0 = time.perf_counter()
    worst = {}
    for text in (CONSTANT, Q, X8, X12):
        k = build_kernels(parse_poly(text))
        t = engine.compute_sequence(k, 512)
        oracles.log_lambda_mpfr.cache_clear()
        ref = oracles.log_lambda_mpfr(tuple(parse_poly(text).coeffs), 512)
        ref = ref - (np.arange(513) - 1) * math.log(k.K)
        worst[text] = float(np.max(np.abs(t.log_lambda[1:] - ref[1:])))
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-10 and elapsed <= 60
    check("AC5 oracle equivalence", ok,
          f"max |l_p - ref| = {max(worst.values()):.1e} over 4 kernels, p <= 512 (<= 1e-10), {elapsed:.1f} s (<= 60 s)")


# 6 -------------------------------------------------------------------------

KERNEL_TEXTS = st.sampled_from([CONSTANT, Q, X8, X12])


def timed(criterion, label, fn):
    t0 = time.perf_counter()
    try:
        fn()
    except Exception:
        record(criterion, False, f"{label} violated")
        raise
    elapsed = time.perf_counter() - t0
    check(criterion, elapsed <= 10, f"{label} ok in {elapsed:.1f} s")


def test_ac6_homogeneity():
    @given(KERNEL_TEXTS, st.sampled_from([0.5, 1.5, 3.0]))
    @settings(max_examples=12, deadline=None)
    def prop(text, y):
        k = kernels_for(text)
        base = engine.lambda_direct(k, 1.0, 200).log()
        lam = engine.lambda_direct(k, y, 200).log()
        p = np.arange(201)
        assert np.max(np.abs(np.expm1(lam[1:] - base[1:] - p[1:] * math.log(y)))) <= 1e-10

    timed("AC6 invariant suite", "homogeneity", prop)


def test_ac6_symmetrization():
    @given(KERNEL_TEXTS)
    @settings(max_examples=4, deadline=None)
    def prop(text):
        k = kernels_for(text)
        sym = engine.lambda_direct(k, 1.0, 512).log()[1:]
        raw = engine.lambda_direct(k, 1.0, 512, symmetric=False).log()[1:]
        refl = engine.lambda_direct(k, 1.0, 512, symmetric=False, kernel=reflect(k.f)).log()[1:]
        assert np.max(np.abs(np.expm1(raw - sym))) <= 1e-12
        assert np.max(np.abs(np.expm1(refl - sym))) <= 1e-12

    timed("AC6 invariant suite", "symmetrization", prop)


positive_raw = st.lists(st.integers(-5, 9), min_size=1, max_size=9).map(Poly).filter(
    lambda p: integral_01(p) > 0.1
)


def test_ac6_f3_mass():
    @given(positive_raw)
    @settings(max_examples=50, deadline=None)
    def prop(f):
        k = build_kernels(f)
        assert abs(integral_01(k.f3) - 1) <= 1e-12
        assert abs(moment_functions(k).F3(0.0) - 1) <= 1e-12

    timed("AC6 invariant suite", "int f3 = F3(0) = 1", prop)


def test_ac6_char_poly_at_one():
    @given(positive_raw)
    @settings(max_examples=50, deadline=None)
    def prop(f):
        P = char_poly(build_kernels(f))
        assert abs(evaluate(P, 1.0)) <= 1e-9 * max(abs(c) for c in P.coeffs)

    timed("AC6 invariant suite", "char_poly(1) = 0", prop)


def test_ac6_f1_f3_relation():
    poles = [-k for k in range(1, 20)] + [1]

    @given(positive_raw, st.lists(st.complex_numbers(max_magnitude=5).filter(
        lambda s: min(abs(s - q) for q in poles) > 0.1), min_size=20, max_size=20))
    @settings(max_examples=20, deadline=None)
    def prop(f, sigmas):
        F = moment_functions(build_kernels(f))
        for s in sigmas:
            lhs = s / (s - 1) * F.F1(s) - 1 / (s - 1)
            assert abs(lhs - F.F3(s)) <= 1e-10 * max(1.0, abs(F.F3(s)))

    timed("AC6 invariant suite", "F1/F3 relation", prop)


def test_ac6_normalization_invariance():
    @given(KERNEL_TEXTS, st.floats(1e-3, 1e3))
    @settings(max_examples=8, deadline=None)
    def prop(text, K):
        t1 = table_for(text, 512)
        t2 = engine.compute_sequence(build_kernels(parse_poly(text) * K), 512)
        for name in ("log_lambda", "a", "b"):
            x, y = getattr(t1, name)[1:], getattr(t2, name)[1:]
            assert np.allclose(x, y, rtol=1e-12, atol=1e-12, equal_nan=True), name

    timed("AC6 invariant suite", "normalization invariance", prop)


# 7 -------------------------------------------------------------------------

def test_ac7_residual_decay():
    rl = asymptotics.residual_linearized(table_for(X8, 8192), kernels_for(X8))
    top, early = rl.block_medians[-1], rl.median_at(256)
    zero = asymptotics.residual_linearized(table_for(CONSTANT, 8192), kernels_for(CONSTANT))
    ok = top < early and np.all(zero.values == 0.0)
    check("AC7 residual decay", ok, f"block median {early:.3g} at p~256 -> {top:.3g} at the top block; "
          f"constant kernel max |r| = {np.max(np.abs(zero.values))}")


# 8 -------------------------------------------------------------------------

def test_ac8_determinism(tmp_path):
    outputs = {}
    for n in (1, 2, 8):
        out = tmp_path / f"t{n}"
        subprocess.run([*CLI, "report", "--f", X8, "--pmax", "4096", "--threads", str(n), "--deterministic",
                        "--outdir", str(out)], check=True, capture_output=True)
        outputs[n] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    same = outputs[1] == outputs[2] == outputs[8]
    check("AC8 determinism", same and len(outputs[1]) == 11,
          f"{len(outputs[1])} report files byte-identical across threads 1, 2, 8: {same}")
