"""Scalar arithmetic in exact-rational and floating-point mode.

Exact mode uses :class:`fractions.Fraction` for real scalars and
:class:`GaussianRational` (a pair of Fractions) for complex ones.  Floating mode
uses the built-in ``float`` and ``complex``.  Plain ``int`` values are accepted
everywhere and coerced to the mode of the surrounding computation.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Any, Union

from .errors import ScalarModeError


class ScalarMode(Enum):
    """How scalars are represented."""

    EXACT = "exact"
    FLOAT = "float"

    @property
    def epsilon(self) -> float:
        """Machine epsilon used by comparisons (zero in exact mode)."""
        return 0.0 if self is ScalarMode.EXACT else sys.float_info.epsilon


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @staticmethod
    def _lift(other: Any) -> GaussianRational | None:
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(Fraction(other))
        return None

    def __add__(self, other: Any) -> GaussianRational:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> GaussianRational:
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: Any) -> GaussianRational:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: Any) -> GaussianRational:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: Any) -> GaussianRational:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> GaussianRational:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        d = o.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other: Any) -> GaussianRational:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> GaussianRational:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return GaussianRational(1) / (self ** (-n))
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def conjugate(self) -> GaussianRational:
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> Fraction | float:
        if self.im == 0:
            return abs(self.re)
        if self.re == 0:
            return abs(self.im)
        root = exact_root(self.abs2(), 2)
        return root if root is not None else math.sqrt(self.abs2())

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        return f"{self.re}+{self.im}i" if self.im >= 0 else f"{self.re}{self.im}i"


Scalar = Union[int, Fraction, GaussianRational, float, complex]
Real = Union[Fraction, float]


def scalar_mode(value: Scalar) -> ScalarMode | None:
    """Return the mode a scalar belongs to, or ``None`` for mode-neutral ints."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return None
    if isinstance(value, (Fraction, GaussianRational)):
        return ScalarMode.EXACT
    if isinstance(value, (float, complex)):
        return ScalarMode.FLOAT
    raise TypeError(f"Unsupported scalar type: {type(value).__name__}")


def to_scalar(value: Any, mode: ScalarMode) -> Scalar:
    """Coerce ``value`` into ``mode``.

    Floats entering exact mode are read through their shortest decimal repr,
    so ``0.1`` becomes ``1/10`` rather than the binary expansion.  Strings such
    as ``"3/4"`` are accepted in both modes.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if mode is ScalarMode.EXACT:
        if isinstance(value, GaussianRational):
            return value if value.im != 0 else value.re
        if isinstance(value, (int, Rational)):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"Non-finite scalar {value!r}")
            return Fraction(repr(value))
        if isinstance(value, complex):
            gr = GaussianRational(to_scalar(value.real, mode), to_scalar(value.imag, mode))
            return gr if gr.im != 0 else gr.re
        if isinstance(value, str):
            return Fraction(value.strip())
    else:
        if isinstance(value, GaussianRational):
            return complex(value) if value.im != 0 else float(value.re)
        if isinstance(value, complex):
            return value if value.imag != 0 else float(value.real)
        if isinstance(value, (int, float, Rational)):
            return float(value)
        if isinstance(value, str):
            return float(Fraction(value.strip()))
    raise TypeError(f"Cannot convert {value!r} to a {mode.value} scalar")


def coerce_pair_mode(a: ScalarMode | None, b: ScalarMode | None) -> ScalarMode | None:
    """Combine two modes, rejecting exact/float mixtures."""
    if a is None:
        return b
    if b is None or a is b:
        return a
    raise ScalarModeError(f"Cannot mix {a.value} and {b.value} scalars")


def _integer_root(a: int, n: int) -> int | None:
    if a < 0:
        return None
    if n == 1 or a in (0, 1):
        return a
    if n == 2:
        r = math.isqrt(a)
        return r if r * r == a else None
    r = round(a ** (1.0 / n)) if a.bit_length() < 1000 else _newton_root(a, n)
    for candidate in (r - 1, r, r + 1):
        if candidate >= 0 and candidate**n == a:
            return candidate
    return None


def _newton_root(a: int, n: int) -> int:
    x = 1 << ((a.bit_length() + n - 1) // n)
    while True:
        y = ((n - 1) * x + a // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def exact_root(x: Fraction, n: int) -> Fraction | None:
    """Return the exact non-negative ``n``-th root of ``x`` if it is rational."""
    if x < 0:
        return None
    num = _integer_root(x.numerator, n)
    den = _integer_root(x.denominator, n)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def modulus(value: Scalar) -> Real:
    """|value|, exact whenever the modulus is rational."""
    if isinstance(value, int):
        return Fraction(abs(value))
    return abs(value)


def modulus_power(value: Scalar, p: int) -> Real:
    """|value|**p for integer p, exact in exact mode."""
    if isinstance(value, GaussianRational):
        if p % 2 == 0:
            return value.abs2() ** (p // 2)
        m = abs(value)
        return m**p
    if isinstance(value, int):
        return Fraction(abs(value)) ** p
    return abs(value) ** p


def reciprocal(value: Scalar) -> Scalar:
    """1/value in the scalar's own mode."""
    if isinstance(value, int):
        return Fraction(1, value)
    return 1 / value


def round_down(value: Real) -> Real:
    """Round a float toward zero by one ulp; exact values pass through."""
    if isinstance(value, float) and value > 0:
        return math.nextafter(value, 0.0)
    return value


def scalar_to_json(value: Scalar) -> Any:
    """Deterministic JSON form of a scalar."""
    if isinstance(value, GaussianRational):
        return {"re": str(value.re), "im": str(value.im)}
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return value
    raise TypeError(f"Unsupported scalar type: {type(value).__name__}")


def scalar_from_json(obj: Any, mode: ScalarMode) -> Scalar:
    """Inverse of :func:`scalar_to_json`."""
    if isinstance(obj, dict):
        re = to_scalar(obj["re"], mode)
        im = to_scalar(obj["im"], mode)
        if mode is ScalarMode.EXACT:
            gr = GaussianRational(re, im)
            return gr if gr.im != 0 else gr.re
        return complex(re, im)
    if obj == "inf":
        return math.inf
    return to_scalar(obj, mode)
