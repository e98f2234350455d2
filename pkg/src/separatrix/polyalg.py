"""Real-coefficient polynomials in one variable.

Coefficients are stored lowest power first and kept in canonical form
(no trailing zeros).  The same type is used for kernels on [0, 1] and for
the characteristic polynomial in the complex exponent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import comb
from typing import NamedTuple, Sequence

from .errors import DegreeTooHigh, PolySyntaxError

MAX_REFLECT_DEGREE = 64

_BINOM = [[comb(n, k) for k in range(n + 1)] for n in range(MAX_REFLECT_DEGREE + 1)]


def _canonical(coeffs) -> tuple:
    c = [float(v) if not isinstance(v, complex) else v for v in coeffs]
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Poly:
    coeffs: tuple

    def __init__(self, coeffs: Sequence[float] = ()):
        object.__setattr__(self, "coeffs", _canonical(coeffs))

    @classmethod
    def constant(cls, c: float) -> "Poly":
        return cls([c])

    @classmethod
    def monomial(cls, k: int, c: float = 1.0) -> "Poly":
        return cls([0.0] * k + [c])

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        return evaluate(self, x)

    def __len__(self):
        return len(self.coeffs)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Poly([(a[i] if i < len(a) else 0.0) + (b[i] if i < len(b) else 0.0) for i in range(n)])

    def __neg__(self) -> "Poly":
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly([c * other for c in self.coeffs])
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly()
        out = [0.0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return Poly(out)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Poly":
        return Poly([c / scalar for c in self.coeffs])

    def divide_linear(self, root: float) -> tuple["Poly", float]:
        """Synthetic division by (x - root); returns (quotient, remainder)."""
        c = self.coeffs
        if len(c) < 2:
            return Poly(), (c[0] if c else 0.0)
        q = [0.0] * (len(c) - 1)
        acc = c[-1]
        for k in range(len(c) - 2, -1, -1):
            q[k] = acc
            acc = c[k] + acc * root
        return Poly(q), acc

    def to_list(self) -> list:
        return list(self.coeffs)

    def __str__(self):
        return render(self)


def evaluate(p: Poly, x):
    """Horner evaluation; works for real, complex and numpy-array arguments."""
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


def derivative(p: Poly) -> Poly:
    return Poly([k * c for k, c in enumerate(p.coeffs)][1:])


def antiderivative(p: Poly) -> Poly:
    """Antiderivative with zero constant term."""
    return Poly([0.0] + [c / (k + 1) for k, c in enumerate(p.coeffs)])


def reflect(p: Poly) -> Poly:
    """Coefficients of p(1 - x)."""
    n = p.degree
    if n > MAX_REFLECT_DEGREE:
        raise DegreeTooHigh(f"degree {n} exceeds the reflection cap {MAX_REFLECT_DEGREE}")
    out = [0.0] * (n + 1)
    for j, cj in enumerate(p.coeffs):
        if cj == 0:
            continue
        row = _BINOM[j]
        for k in range(j + 1):
            term = cj * row[k]
            out[k] += -term if k & 1 else term
    return Poly(out)


def integral_01(p: Poly) -> float:
    return sum(c / (k + 1) for k, c in enumerate(p.coeffs))


class Calculus(NamedTuple):
    derivative: Poly
    antiderivative: Poly
    reflect: Poly
    definite_integral_01: float


def poly_calculus(p: Poly) -> Calculus:
    return Calculus(derivative(p), antiderivative(p), reflect(p), integral_01(p))


def _fmt_coeff(c: float) -> str:
    if c == int(c) and abs(c) < 1e16:
        return str(int(c))
    return repr(c)


def render(p: Poly, var: str = "x") -> str:
    """Canonical text: descending powers, explicit signs, no '*'."""
    if p.is_zero:
        return "0"
    parts = []
    for k in range(len(p.coeffs) - 1, -1, -1):
        c = p.coeffs[k]
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if k == 0:
            body = _fmt_coeff(mag)
        else:
            body = "" if mag == 1 else _fmt_coeff(mag)
            if body and ("e" in body or "inf" in body):
                body += "*"
            body += var if k == 1 else f"{var}^{k}"
        parts.append((sign, body))
    first_sign, first_body = parts[0]
    text = ("-" if first_sign == "-" else "") + first_body
    for sign, body in parts[1:]:
        text += sign + body
    return text


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<op>[-+*^])|(?P<var>x))"
)
_PREFIX = re.compile(r"\s*f\s*\(\s*x\s*\)\s*=")


def _tokenize(text: str):
    pos = 0
    m = _PREFIX.match(text)
    if m:
        pos = m.end()
    tokens = []
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def _parse_coeff_list(body: str, base: int) -> Poly:
    items = body.split(",")
    out = []
    offset = base
    for item in items:
        s = item.strip()
        if not s:
            raise PolySyntaxError("empty coefficient", offset)
        try:
            out.append(float(s))
        except ValueError:
            raise PolySyntaxError(f"bad coefficient {s!r}", offset) from None
        offset += len(item) + 1
    return Poly(out)


def parse_poly(text: str) -> Poly:
    """Parse ``6x^2-10x+4``-style text or a ``coeffs:c0,c1,...`` list."""
    if text is None or not text.strip():
        raise PolySyntaxError("empty input", 0)
    stripped = text.lstrip()
    if stripped.startswith("coeffs:"):
        base = len(text) - len(stripped) + len("coeffs:")
        return _parse_coeff_list(stripped[len("coeffs:"):], base)

    tokens = _tokenize(text)
    i = 0
    terms: dict[int, float] = {}

    def peek():
        return tokens[i]

    while True:
        sign = 1.0
        kind, val, pos = peek()
        if kind == "op" and val in "+-":
            sign = -1.0 if val == "-" else 1.0
            i += 1
        elif terms:
            raise PolySyntaxError("expected '+' or '-'", pos)
        kind, val, pos = peek()
        coef = None
        power = 0
        if kind == "num":
            coef = float(val)
            i += 1
            kind, val, pos = peek()
            if kind == "op" and val == "*":
                i += 1
                kind, val, pos = peek()
                if kind != "var":
                    raise PolySyntaxError("expected 'x' after '*'", pos)
        if kind == "var":
            i += 1
            power = 1
            kind, val, pos = peek()
            if kind == "op" and val == "^":
                i += 1
                kind, val, pos = peek()
                if kind != "num" or not val.isdigit():
                    raise PolySyntaxError("exponent must be a non-negative integer", pos)
                power = int(val)
                i += 1
        elif coef is None:
            raise PolySyntaxError("expected a term", pos)
        terms[power] = terms.get(power, 0.0) + sign * (1.0 if coef is None else coef)
        if peek()[0] == "end":
            break

    deg = max(terms)
    coeffs = [0.0] * (deg + 1)
    for k, c in terms.items():
        coeffs[k] = c
    return Poly(coeffs)
