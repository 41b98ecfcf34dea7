"""Rotation angles with an exact rational-multiple-of-pi fast path.

Angles are normalized to [0, 2*pi) on construction.  When an angle is known
to be a rational multiple of pi it additionally carries that fraction, and
the arithmetic used by the renormalization steps (adding pi/2, negation)
stays exact.  Cosines and sines of exact multiples of pi/2 are returned as
exact 0.0 / +-1.0, which is what lets theta = pi/2 take the zero branches in
the sparse and planar engines instead of leaving 6e-17 residues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

_TWO = Fraction(2)
_HALF = Fraction(1, 2)

# cos(k * pi/2) and sin(k * pi/2) for k = 0..3
_COS_QUARTER = (1.0, 0.0, -1.0, 0.0)
_SIN_QUARTER = (0.0, 1.0, 0.0, -1.0)


@dataclass(frozen=True)
class Angle:
    """An angle in radians, optionally exact as ``pi_frac * pi``."""

    rad: float
    pi_frac: Fraction | None = None

    @staticmethod
    def from_radians(value: float) -> "Angle":
        return Angle(rad=math.fmod(value, 2.0 * math.pi) % (2.0 * math.pi))

    @staticmethod
    def from_pi_fraction(num: int, den: int = 1) -> "Angle":
        """Exact angle ``num * pi / den``, normalized modulo 2*pi."""
        frac = Fraction(num, den) % _TWO
        return Angle(rad=float(frac) * math.pi, pi_frac=frac)

    @staticmethod
    def zero() -> "Angle":
        return Angle.from_pi_fraction(0)

    @property
    def is_exact(self) -> bool:
        return self.pi_frac is not None

    def _quarter_index(self) -> int | None:
        """k such that the angle is exactly k*pi/2, else None."""
        if self.pi_frac is None:
            return None
        doubled = self.pi_frac * 2
        if doubled.denominator != 1:
            return None
        return doubled.numerator % 4

    def plus_half_pi(self) -> "Angle":
        if self.pi_frac is not None:
            return Angle.from_pi_fraction(
                (self.pi_frac + _HALF).numerator, (self.pi_frac + _HALF).denominator
            )
        return Angle.from_radians(self.rad + math.pi / 2.0)

    def negated(self) -> "Angle":
        if self.pi_frac is not None:
            frac = -self.pi_frac
            return Angle.from_pi_fraction(frac.numerator, frac.denominator)
        return Angle.from_radians(-self.rad)

    def cos(self) -> float:
        k = self._quarter_index()
        if k is not None:
            return _COS_QUARTER[k]
        return math.cos(self.rad)

    def sin(self) -> float:
        k = self._quarter_index()
        if k is not None:
            return _SIN_QUARTER[k]
        return math.sin(self.rad)

    def sort_key(self) -> tuple[float, int, int]:
        """Deterministic ordering key (exact angles break float ties)."""
        if self.pi_frac is not None:
            return (self.rad, self.pi_frac.numerator, self.pi_frac.denominator)
        return (self.rad, -1, 0)

    def __str__(self) -> str:
        if self.pi_frac is not None:
            if self.pi_frac == 0:
                return "0"
            num, den = self.pi_frac.numerator, self.pi_frac.denominator
            head = "pi" if num == 1 else f"{num}*pi"
            return head if den == 1 else f"{head}/{den}"
        return repr(self.rad)


def as_angle(value: "Angle | float | int") -> Angle:
    """Coerce plain numbers to Angle; integers 0 stay exact."""
    if isinstance(value, Angle):
        return value
    if isinstance(value, int):
        return Angle.from_pi_fraction(0) if value == 0 else Angle.from_radians(float(value))
    return Angle.from_radians(float(value))
