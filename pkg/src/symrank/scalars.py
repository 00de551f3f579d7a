"""Scalar fields behind the toolkit: exact Gaussian rationals and complex floats.

Every other module is generic over a ``field`` tag, either ``"exact"``
(:class:`GaussianRational`, pairs of ``fractions.Fraction``) or ``"float"``
(built-in ``complex``).  Exact scalars make rank decisions decidable; the
float field exists for finite-difference oracles and numeric cross-checks.

All values are immutable and safe to share between threads.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

EXACT = "exact"
FLOAT = "float"
FIELDS = (EXACT, FLOAT)


class NumericFailure(RuntimeError):
    """A floating-point computation overflowed or failed to converge."""


def normalize_rational(numerator: int, denominator: int = 1) -> Fraction:
    """Reduced rational with positive denominator; rejects a zero denominator."""
    if denominator == 0:
        raise ValueError("zero denominator")
    return Fraction(numerator, denominator)


def render_rational(r: Fraction) -> str:
    return f"{r.numerator}/{r.denominator}"


def parse_rational(text: str) -> Fraction:
    """Inverse of :func:`render_rational`; also accepts a bare integer string."""
    body = text.strip()
    if "/" in body:
        num, _, den = body.partition("/")
        try:
            return normalize_rational(int(num), int(den))
        except ValueError as exc:
            raise ValueError(f"bad rational {text!r}: {exc}") from None
    try:
        return Fraction(int(body))
    except ValueError:
        raise ValueError(f"bad rational {text!r}") from None


_RationalLike = Union[int, Fraction]


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot coerce {value!r} to an exact rational")


@dataclass(frozen=True, slots=True)
class GaussianRational:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction
    im: Fraction

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, an exact rational."""
        return self.re * self.re + self.im * self.im

    @property
    def is_zero(self) -> bool:
        return not self.re and not self.im

    def __bool__(self) -> bool:
        return not self.is_zero

    def __add__(self, other):
        if type(other) is GaussianRational:
            return GaussianRational(self.re + other.re, self.im + other.im)
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        if type(other) is GaussianRational:
            return GaussianRational(self.re - other.re, self.im - other.im)
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaussianRational(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        if type(other) is not GaussianRational:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        # real-only operands dominate in practice; skip the cross terms
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re, self.im)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if type(other) is not GaussianRational:
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if not other.im:
            if not other.re:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational(self.re / other.re, self.im / other.re)
        denom = other.abs2()
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / denom,
            (self.im * other.re - self.re * other.im) / denom,
        )

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __pow__(self, exponent: int) -> "GaussianRational":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        out = GQ_ONE
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __repr__(self) -> str:
        return f"gq({self.re!r}, {self.im!r})"

    def __str__(self) -> str:
        if not self.im:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else ''}{self.im}i"


def _coerce(value):
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(Fraction(value), Fraction(0))
    return NotImplemented


def gq(re=0, im=0) -> GaussianRational:
    """Convenience constructor accepting ints, Fractions, or "p/q" strings."""
    return GaussianRational(_as_fraction(re), _as_fraction(im))


GQ_ZERO = gq(0)
GQ_ONE = gq(1)
GQ_I = gq(0, 1)


def to_complex(x) -> complex:
    if isinstance(x, GaussianRational):
        return complex(float(x.re), float(x.im))
    return complex(x)


def ensure_finite(z: complex) -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise NumericFailure(f"non-finite float scalar {z!r}")
    return z


def approx_eq(a, b, tol: float) -> bool:
    """|a - b| <= tol * max(1, |a|, |b|); symmetric normalized comparison."""
    if tol < 0:
        raise ValueError("tolerance must be non-negative")
    a = complex(a)
    b = complex(b)
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def field_of(x) -> str:
    if isinstance(x, GaussianRational):
        return EXACT
    if isinstance(x, complex):
        return FLOAT
    raise TypeError(f"{x!r} is not a field scalar")


def field_zero(field: str):
    return GQ_ZERO if field == EXACT else 0j


def field_one(field: str):
    return GQ_ONE if field == EXACT else complex(1.0)


def scalar_from_int(field: str, k: int):
    return gq(k) if field == EXACT else complex(k)


def coerce_scalar(value, field: str):
    """Coerce a loose value (int, Fraction, float, complex) into a field scalar."""
    if field == EXACT:
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return gq(value)
        raise TypeError(f"cannot place {value!r} in the exact field")
    if field == FLOAT:
        if isinstance(value, GaussianRational):
            return ensure_finite(to_complex(value))
        if isinstance(value, (int, float, complex)):
            return ensure_finite(complex(value))
        raise TypeError(f"cannot place {value!r} in the float field")
    raise ValueError(f"unknown field {field!r}")


def scalar_to_json(x):
    """Exact scalars encode as ["p/q", "r/s"]; floats as [re, im] numbers."""
    if isinstance(x, GaussianRational):
        return [render_rational(x.re), render_rational(x.im)]
    z = complex(x)
    return [z.real, z.imag]


def scalar_from_json(obj, field: str):
    if not isinstance(obj, (list, tuple)) or len(obj) != 2:
        raise ValueError(f"scalar encoding must be a 2-element list, got {obj!r}")
    re, im = obj
    if field == EXACT:
        if not isinstance(re, str) or not isinstance(im, str):
            raise ValueError(f"exact scalar parts must be 'p/q' strings, got {obj!r}")
        return GaussianRational(parse_rational(re), parse_rational(im))
    if field == FLOAT:
        if isinstance(re, str) or isinstance(im, str):
            raise ValueError(f"float scalar parts must be numbers, got {obj!r}")
        return ensure_finite(complex(float(re), float(im)))
    raise ValueError(f"unknown field {field!r}")


def parse_eigenvalue(text: str) -> GaussianRational:
    """Parse shorthand exact eigenvalues: "2", "-1", "1/2", "i", "-i", "1+2i"."""
    body = text.strip().replace(" ", "")
    if not body:
        raise ValueError("empty eigenvalue")
    if body in ("i", "+i"):
        return GQ_I
    if body == "-i":
        return -GQ_I
    if body.endswith("i"):
        head = body[:-1]
        for split in range(len(head) - 1, 0, -1):
            if head[split] in "+-" and head[split - 1] not in "+-/":
                re_part, im_part = head[:split], head[split:]
                if im_part in ("+", "-"):
                    im_part += "1"
                return gq(parse_rational(re_part), parse_rational(im_part))
        if head in ("", "+"):
            head = "1"
        elif head == "-":
            head = "-1"
        return gq(0, parse_rational(head))
    return gq(parse_rational(body))


def format_eigenvalue(x: GaussianRational) -> str:
    """Shorthand accepted by :func:`parse_eigenvalue`: "2", "1/2", "i", "1+2i"."""
    if not x.im:
        return str(x.re)
    if x.im == 1:
        im = "i"
    elif x.im == -1:
        im = "-i"
    else:
        im = f"{x.im}i"
    if not x.re:
        return im
    return f"{x.re}{'+' if not im.startswith('-') else ''}{im}"


def random_rational(rng: random.Random, magnitude: int = 9) -> Fraction:
    return Fraction(rng.randint(-magnitude, magnitude), rng.randint(1, magnitude))


def random_gaussian_rational(rng: random.Random, magnitude: int = 9) -> GaussianRational:
    return GaussianRational(random_rational(rng, magnitude), random_rational(rng, magnitude))
