import functools
import logging

import pytest

from separatrix import engine
from separatrix.kernels import build_kernels
from separatrix.polyalg import parse_poly
from separatrix.spectrum import build_spectrum

REFERENCE_KERNELS = {"quadratic": "6x^2-10x+4", "x8": "9x^8", "x12": "13x^12"}
CONSTANT = "coeffs:1"


@pytest.fixture(autouse=True)
def _quiet_kernel_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="separatrix.kernels")


@functools.lru_cache(maxsize=None)
def kernels_for(text, basis="f1"):
    return build_kernels(parse_poly(text), basis=basis)


@functools.lru_cache(maxsize=None)
def table_for(text, pmax):
    return engine.compute_sequence(kernels_for(text), pmax)


@functools.lru_cache(maxsize=None)
def spectrum_for(text):
    return build_spectrum(kernels_for(text))


# acceptance summary: one line per criterion, printed at the end of the run
ACCEPTANCE = {}


def record(criterion, ok, detail):
    prev = ACCEPTANCE.get(criterion)
    ACCEPTANCE[criterion] = (ok and (prev is None or prev[0]), detail if prev is None else prev[1] + "; " + detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda s: (int(s.split()[0][2:]), s)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
