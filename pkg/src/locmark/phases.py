"""Unit-circle phases kept exact as rational multiples of pi when possible.

A :class:`Phase` is normalized to ``[0, 2*pi)``. Exact phases store the
multiple of pi as a :class:`fractions.Fraction` in ``[0, 2)``; float phases
store radians only. Arithmetic between two exact phases stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

TWO_PI = 2.0 * math.pi

_SQRT3_2 = math.sqrt(3.0) / 2.0
_SQRT2_2 = math.sqrt(2.0) / 2.0
# cos of first-quadrant multiples of 15 degrees that have a closed form we use
_COS_FIRST_QUADRANT = {0: 1.0, 30: _SQRT3_2, 45: _SQRT2_2, 60: 0.5, 90: 0.0}


def _cos_degrees(deg: int) -> float | None:
    deg %= 360
    sign = 1.0
    if deg > 180:
        deg = 360 - deg
    if deg > 90:
        deg = 180 - deg
        sign = -1.0
    value = _COS_FIRST_QUADRANT.get(deg)
    if value is None:
        return None
    return sign * value if value else 0.0


@lru_cache(maxsize=4096)
def cos_pi(frac: Fraction) -> float:
    """cos(pi * frac), exact (correctly rounded) on multiples of 30 and 45 degrees."""
    deg = frac * 180
    if deg.denominator == 1:
        value = _cos_degrees(int(deg))
        if value is not None:
            return value
    return math.cos(math.pi * float(frac))


@lru_cache(maxsize=4096)
def sin_pi(frac: Fraction) -> float:
    return cos_pi(Fraction(1, 2) - frac)


def _normalize_frac(frac: Fraction) -> Fraction:
    return frac - 2 * (frac // 2)


def _normalize_rad(x: float) -> float:
    y = math.fmod(x, TWO_PI)
    if y < 0.0:
        y += TWO_PI
    if y >= TWO_PI:
        y = 0.0
    return y


@dataclass(frozen=True, eq=False)
class Phase:
    """An angle on the unit circle.

    ``pi_frac`` is the exact multiple of pi (``None`` for float phases);
    ``radians`` is always populated.
    """

    radians: float
    pi_frac: Fraction | None = None

    @classmethod
    def pi(cls, num: int | Fraction, den: int = 1) -> "Phase":
        frac = _normalize_frac(Fraction(num) / den)
        return cls(math.pi * float(frac), frac)

    @classmethod
    def rad(cls, x: float) -> "Phase":
        if not math.isfinite(x):
            raise ValueError(f"phase must be finite, got {x!r}")
        return cls(_normalize_rad(float(x)), None)

    @classmethod
    def coerce(cls, value) -> "Phase":
        if isinstance(value, Phase):
            return value
        if isinstance(value, Fraction):
            return cls.pi(value)
        if isinstance(value, int) and value == 0:
            return cls.pi(0)
        return cls.rad(float(value))

    @property
    def is_exact(self) -> bool:
        return self.pi_frac is not None

    def cos(self) -> float:
        return cos_pi(self.pi_frac) if self.is_exact else math.cos(self.radians)

    def sin(self) -> float:
        return sin_pi(self.pi_frac) if self.is_exact else math.sin(self.radians)

    def unit(self) -> complex:
        return complex(self.cos(), self.sin())

    def __add__(self, other: "Phase") -> "Phase":
        if self.is_exact and other.is_exact:
            return Phase.pi(self.pi_frac + other.pi_frac)
        return Phase.rad(self.radians + other.radians)

    def __sub__(self, other: "Phase") -> "Phase":
        return self + (-other)

    def __neg__(self) -> "Phase":
        if self.is_exact:
            return Phase.pi(-self.pi_frac)
        return Phase.rad(-self.radians)

    def key(self):
        if self.is_exact:
            return ("q", self.pi_frac)
        return ("f", round(self.radians, 12))

    def sort_key(self):
        if self.is_exact:
            return (float(self.pi_frac) * math.pi, self.pi_frac)
        return (self.radians, Fraction(0))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Phase):
            return NotImplemented
        # exact and float phases never compare equal; keeps __hash__ consistent
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def __lt__(self, other: "Phase") -> bool:
        return self.sort_key() < other.sort_key()

    def __repr__(self) -> str:
        if self.is_exact:
            return f"Phase.pi({self.pi_frac.numerator}, {self.pi_frac.denominator})"
        return f"Phase.rad({self.radians!r})"

    def to_json(self) -> dict:
        if self.is_exact:
            return {"pi_frac": [self.pi_frac.numerator, self.pi_frac.denominator]}
        return {"rad": self.radians}


@dataclass(frozen=True)
class PhaseSet:
    """A multiset of phases; ``source`` records which operator produced it."""

    phases: tuple[Phase, ...]
    source: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(Phase.coerce(p) for p in self.phases))

    @classmethod
    def of(cls, values: Iterable, source: str = "") -> "PhaseSet":
        return cls(tuple(Phase.coerce(v) for v in values), source)

    @property
    def is_exact(self) -> bool:
        return all(p.is_exact for p in self.phases)

    def radians(self) -> np.ndarray:
        return np.array([p.radians for p in self.phases], dtype=float)

    def points(self) -> np.ndarray:
        return np.array([p.unit() for p in self.phases], dtype=complex)

    def sorted(self) -> "PhaseSet":
        return PhaseSet(tuple(sorted(self.phases)), self.source)

    def multiset_key(self):
        return tuple(sorted(p.key() for p in self.phases))

    def __len__(self) -> int:
        return len(self.phases)

    def __iter__(self) -> Iterator[Phase]:
        return iter(self.phases)

    def __getitem__(self, i) -> Phase:
        return self.phases[i]

    def to_json(self) -> list:
        return [p.to_json() for p in self.phases]


def phase_from_json(obj) -> Phase:
    if "pi_frac" in obj:
        num, den = obj["pi_frac"]
        return Phase.pi(int(num), int(den))
    return Phase.rad(float(obj["rad"]))


def exact_cos_expr(frac: Fraction) -> str:
    """Closed-form string for cos(pi * frac), via sympy."""
    import sympy

    return str(sympy.nsimplify(sympy.cos(sympy.pi * sympy.Rational(frac.numerator, frac.denominator))))
