"""Mantissa/exponent numbers that do not underflow.

A value is ``mantissa * 2**exponent`` with ``1 <= |mantissa| < 2`` or an
exact zero.  Zero is stored with exponent ``ZERO_EXPONENT`` so that it never
wins a max-exponent rebase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

EXPONENT_CAP = 2**62
ZERO_EXPONENT = -(2**62)
LN2 = math.log(2.0)


@dataclass(frozen=True)
class ScaledReal:
    mantissa: float
    exponent: int

    @classmethod
    def from_float(cls, x: float) -> "ScaledReal":
        if x == 0:
            return cls(0.0, ZERO_EXPONENT)
        if not math.isfinite(x):
            raise ValueError(f"cannot scale non-finite {x!r}")
        m, e = math.frexp(x)
        return cls(2.0 * m, e - 1)

    @classmethod
    def normalize(cls, m: float, e: int) -> "ScaledReal":
        if m == 0:
            return cls(0.0, ZERO_EXPONENT)
        mm, de = math.frexp(m)
        e = e + de - 1
        if abs(e) >= EXPONENT_CAP:
            raise OverflowError("ScaledReal exponent cap exceeded")
        return cls(2.0 * mm, e)

    @property
    def is_zero(self) -> bool:
        return self.mantissa == 0

    def __mul__(self, other: "ScaledReal") -> "ScaledReal":
        if self.is_zero or other.is_zero:
            return ScaledReal(0.0, ZERO_EXPONENT)
        return ScaledReal.normalize(self.mantissa * other.mantissa, self.exponent + other.exponent)

    def __add__(self, other: "ScaledReal") -> "ScaledReal":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        e = max(self.exponent, other.exponent)
        s = math.ldexp(self.mantissa, max(self.exponent - e, -1100)) + math.ldexp(
            other.mantissa, max(other.exponent - e, -1100)
        )
        return ScaledReal.normalize(s, e)

    def scale(self, c: float) -> "ScaledReal":
        return ScaledReal.normalize(self.mantissa * c, self.exponent) if not self.is_zero else self

    def log(self) -> float:
        """Natural log of a positive value."""
        if self.mantissa <= 0:
            raise ValueError("log of a non-positive ScaledReal")
        return math.log(self.mantissa) + self.exponent * LN2

    def to_float(self) -> float:
        if self.is_zero:
            return 0.0
        try:
            return math.ldexp(self.mantissa, self.exponent)
        except OverflowError:
            return math.copysign(math.inf, self.mantissa)


@dataclass(frozen=True)
class ScaledArray:
    """Array-of-structs view over mantissa and exponent columns.

    Index ``p`` holds the p-th value; index 0 is unused padding.
    """

    mantissa: np.ndarray
    exponent: np.ndarray
    saturated: bool = False

    def __len__(self):
        return len(self.mantissa)

    def __getitem__(self, p: int) -> ScaledReal:
        return ScaledReal(float(self.mantissa[p]), int(self.exponent[p]))

    def log(self) -> np.ndarray:
        """Natural logs, index-aligned; non-positive entries map to nan."""
        m = self.mantissa
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.log(m) + self.exponent.astype(float) * LN2
        out[m <= 0] = np.nan
        return out

    def to_float(self) -> np.ndarray:
        e = np.clip(self.exponent, -2000, 2000).astype(np.int32)
        with np.errstate(over="ignore"):
            out = np.ldexp(self.mantissa, e)
        out[self.mantissa == 0] = 0.0
        return out
