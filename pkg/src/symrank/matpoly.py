"""Matrices, polynomials, and the symmetrization map.

The symmetrization map sends an n-by-n matrix M to the coefficient tuple
(sigma_1, ..., sigma_n) of its characteristic polynomial

    det(tI - M) = sum_j (-1)^j sigma_j(M) t^(n-j),    sigma_0 = 1,

i.e. to the elementary symmetric functions of the eigenvalues.  The
characteristic polynomial is computed by the Faddeev-LeVerrier recursion,
which only ever divides by the integers 1..n and therefore stays exact over
the Gaussian rationals.  The recursion simultaneously produces the adjugate
polynomial adj(tI - M), the source of exact first derivatives of det.

Everything here is pure and immutable; functions are safe to call in
parallel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .scalars import (
    EXACT,
    FLOAT,
    GaussianRational,
    NumericFailure,
    coerce_scalar,
    ensure_finite,
    field_of,
    field_one,
    field_zero,
    gq,
    scalar_from_int,
    scalar_from_json,
    scalar_to_json,
    to_complex,
)

#: A point of the symmetrized space: tuple (sigma_1, ..., sigma_n) of scalars.
SymPoint = tuple


def _infer_field(values: Iterable) -> str:
    for v in values:
        if isinstance(v, GaussianRational):
            return EXACT
        if isinstance(v, (float, complex)):
            return FLOAT
    return EXACT


@dataclass(frozen=True)
class SquareMatrix:
    """Immutable n-by-n matrix over one scalar field."""

    n: int
    field: str
    entries: tuple

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], field: str | None = None) -> "SquareMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0 or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and non-empty")
        if field is None:
            field = _infer_field(x for r in rows for x in r)
        coerced = tuple(tuple(coerce_scalar(x, field) for x in r) for r in rows)
        return cls(n, field, coerced)

    @classmethod
    def zeros(cls, n: int, field: str = EXACT) -> "SquareMatrix":
        z = field_zero(field)
        return cls(n, field, tuple(tuple(z for _ in range(n)) for _ in range(n)))

    @classmethod
    def identity(cls, n: int, field: str = EXACT) -> "SquareMatrix":
        z, o = field_zero(field), field_one(field)
        return cls(n, field, tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)))

    @classmethod
    def basis(cls, n: int, i: int, j: int, field: str = EXACT) -> "SquareMatrix":
        """Elementary direction with a single 1 at row i, column j (0-based)."""
        z, o = field_zero(field), field_one(field)
        return cls(n, field, tuple(
            tuple(o if (a, b) == (i, j) else z for b in range(n)) for a in range(n)
        ))

    def at(self, i: int, j: int):
        return self.entries[i][j]

    def _check_compatible(self, other: "SquareMatrix") -> None:
        if not isinstance(other, SquareMatrix):
            raise TypeError("expected a SquareMatrix")
        if self.n != other.n:
            raise ValueError(f"size mismatch: {self.n} vs {other.n}")
        if self.field != other.field:
            raise ValueError(f"field mismatch: {self.field} vs {other.field}")

    def __add__(self, other: "SquareMatrix") -> "SquareMatrix":
        self._check_compatible(other)
        return SquareMatrix(self.n, self.field, tuple(
            tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def __sub__(self, other: "SquareMatrix") -> "SquareMatrix":
        self._check_compatible(other)
        return SquareMatrix(self.n, self.field, tuple(
            tuple(a - b for a, b in zip(ra, rb)) for ra, rb in zip(self.entries, other.entries)
        ))

    def __matmul__(self, other: "SquareMatrix") -> "SquareMatrix":
        self._check_compatible(other)
        n = self.n
        cols = tuple(zip(*other.entries))
        rows = tuple(
            tuple(_dot_seq(ra, cb) for cb in cols) for ra in self.entries
        )
        return SquareMatrix(n, self.field, rows)

    def scale(self, c) -> "SquareMatrix":
        c = coerce_scalar(c, self.field)
        return SquareMatrix(self.n, self.field, tuple(
            tuple(c * x for x in r) for r in self.entries
        ))

    def trace(self):
        total = self.entries[0][0]
        for i in range(1, self.n):
            total = total + self.entries[i][i]
        return total

    def is_zero(self) -> bool:
        return all(not x for r in self.entries for x in r)

    def to_float(self) -> "SquareMatrix":
        if self.field == FLOAT:
            return self
        return SquareMatrix(self.n, FLOAT, tuple(
            tuple(to_complex(x) for x in r) for r in self.entries
        ))

    def to_numpy(self) -> np.ndarray:
        return np.array([[to_complex(x) for x in r] for r in self.entries], dtype=complex)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "field": self.field,
            "entries": [[scalar_to_json(x) for x in r] for r in self.entries],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SquareMatrix":
        try:
            n = obj["n"]
            field = obj["field"]
            entries = obj["entries"]
        except (TypeError, KeyError) as exc:
            raise ValueError(f"matrix JSON missing key: {exc}") from None
        if field not in (EXACT, FLOAT):
            raise ValueError(f"unknown field {field!r}")
        if len(entries) != n or any(len(r) != n for r in entries):
            raise ValueError(f"matrix JSON entries are not {n}x{n}")
        rows = [[scalar_from_json(x, field) for x in r] for r in entries]
        return cls.from_rows(rows, field)


def _dot_seq(u, w):
    total = u[0] * w[0]
    for a, b in zip(u[1:], w[1:]):
        total = total + a * b
    return total


@dataclass(frozen=True)
class Polynomial:
    """Polynomial in one variable, coefficients in ascending degree.

    The zero polynomial has an empty coefficient tuple (degree -1).  Instances
    double as exact ring elements: matrices of Polynomials can be fed through
    the generic characteristic-polynomial recursion, which is how curves in a
    formal parameter are differentiated exactly.
    """

    coefficients: tuple
    field: str = EXACT

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        while coeffs and not coeffs[-1]:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def make(cls, values: Sequence, field: str = EXACT) -> "Polynomial":
        return cls(tuple(coerce_scalar(v, field) for v in values), field)

    @classmethod
    def zero(cls, field: str = EXACT) -> "Polynomial":
        return cls((), field)

    @classmethod
    def one(cls, field: str = EXACT) -> "Polynomial":
        return cls((field_one(field),), field)

    @classmethod
    def variable(cls, field: str = EXACT) -> "Polynomial":
        return cls((field_zero(field), field_one(field)), field)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __bool__(self) -> bool:
        return not self.is_zero

    @property
    def leading(self):
        if self.is_zero:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coefficients[-1]

    @property
    def is_monic(self) -> bool:
        return not self.is_zero and self.leading == field_one(self.field)

    def coefficient(self, degree: int):
        if 0 <= degree < len(self.coefficients):
            return self.coefficients[degree]
        return field_zero(self.field)

    def evaluate(self, t):
        if self.is_zero:
            return field_zero(self.field) if not isinstance(t, Polynomial) else Polynomial.zero(self.field)
        total = self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            total = total * t + c
        return total

    def derivative(self) -> "Polynomial":
        return Polynomial(
            tuple(c * k for k, c in enumerate(self.coefficients) if k > 0), self.field
        )

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        if len(a) < len(b):
            a, b = b, a
        merged = list(a)
        for i, c in enumerate(b):
            merged[i] = merged[i] + c
        return Polynomial(tuple(merged), self.field)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coefficients), self.field)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial.zero(self.field)
            z = field_zero(self.field)
            out = [z] * (len(self.coefficients) + len(other.coefficients) - 1)
            for i, a in enumerate(self.coefficients):
                if not a:
                    continue
                for j, b in enumerate(other.coefficients):
                    out[i + j] = out[i + j] + a * b
            return Polynomial(tuple(out), self.field)
        return Polynomial(tuple(c * other for c in self.coefficients), self.field)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        # scalar (or integer) division only; used by the exact char-poly recursion
        return Polynomial(tuple(c / other for c in self.coefficients), self.field)

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        out = Polynomial.one(self.field)
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def divmod_exact(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Polynomial long division over the field; returns (quotient, remainder)."""
        if divisor.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        remainder = list(self.coefficients)
        dn = divisor.degree
        lead = divisor.leading
        quotient = [field_zero(self.field)] * max(0, len(remainder) - dn)
        for i in range(len(remainder) - dn - 1, -1, -1):
            top = remainder[i + dn]
            if not top:
                continue
            q = top / lead
            quotient[i] = q
            for j, c in enumerate(divisor.coefficients):
                remainder[i + j] = remainder[i + j] - q * c
        return Polynomial(tuple(quotient), self.field), Polynomial(tuple(remainder[:dn]), self.field)

    def divides(self, other: "Polynomial") -> bool:
        _, rem = other.divmod_exact(self)
        return rem.is_zero

    def lowest_nonzero_degree(self) -> int | None:
        for k, c in enumerate(self.coefficients):
            if c:
                return k
        return None

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            return other
        try:
            return Polynomial((coerce_scalar(other, self.field),), self.field)
        except TypeError:
            return NotImplemented

    def to_json(self) -> list:
        return [scalar_to_json(c) for c in self.coefficients]

    @classmethod
    def from_json(cls, obj: list, field: str) -> "Polynomial":
        return cls(tuple(scalar_from_json(c, field) for c in obj), field)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for k, c in enumerate(self.coefficients):
            if not c:
                continue
            parts.append(f"({c})*t^{k}" if k else f"({c})")
        return " + ".join(parts)


@dataclass(frozen=True)
class MatrixPolynomial:
    """Matrix-valued polynomial: tuple of coefficient matrices, ascending degree.

    Carries both adjugate polynomials adj(tI - M) and curves
    Phi(zeta) = B + zeta*M1 + zeta^2*M2 + ... through one representation.
    """

    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(self.coefficients)
        if not coeffs:
            raise ValueError("matrix polynomial needs at least one coefficient")
        n, field = coeffs[0].n, coeffs[0].field
        for c in coeffs:
            if c.n != n or c.field != field:
                raise ValueError("coefficient matrices must share size and field")
        while len(coeffs) > 1 and coeffs[-1].is_zero():
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def n(self) -> int:
        return self.coefficients[0].n

    @property
    def field(self) -> str:
        return self.coefficients[0].field

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def evaluate(self, t) -> SquareMatrix:
        t = coerce_scalar(t, self.field)
        total = self.coefficients[-1]
        for c in reversed(self.coefficients[:-1]):
            total = total.scale(t) + c
        return total

    def entry_poly(self, i: int, j: int) -> Polynomial:
        return Polynomial(tuple(c.entries[i][j] for c in self.coefficients), self.field)

    def to_json(self) -> dict:
        return {"coefficients": [c.to_json() for c in self.coefficients]}

    @classmethod
    def from_json(cls, obj: dict) -> "MatrixPolynomial":
        try:
            coeffs = obj["coefficients"]
        except (TypeError, KeyError):
            raise ValueError("curve JSON must have a 'coefficients' list") from None
        return cls(tuple(SquareMatrix.from_json(c) for c in coeffs))


def charpoly_in_ring(entries: Sequence[Sequence], zero, one):
    """Faddeev-LeVerrier over any commutative ring with exact division by 1..n.

    Returns (coeffs, adj_matrices): coeffs is the ascending coefficient list
    c_0..c_n of det(tI - A), and adj_matrices is [N_1, ..., N_n] with
    adj(tI - A) = sum_k N_k t^(n-k).  Entry types must support +, -, *, unary
    minus, and true division by a Python int.
    """
    n = len(entries)
    coeffs = [zero] * (n + 1)
    coeffs[n] = one
    mk = [[one if i == j else zero for j in range(n)] for i in range(n)]
    adj = []
    # the left factor stays fixed and is often sparse; index its support once
    support = [[(j, a) for j, a in enumerate(row) if a] for row in entries]
    for k in range(1, n + 1):
        adj.append([row[:] for row in mk])
        am = []
        for i in range(n):
            row = [zero] * n
            for idx, a in support[i]:
                mrow = mk[idx]
                for j in range(n):
                    b = mrow[j]
                    if b:
                        row[j] = row[j] + a * b
            am.append(row)
        tr = am[0][0]
        for i in range(1, n):
            tr = tr + am[i][i]
        ck = -(tr / k)
        coeffs[n - k] = ck
        if k < n:
            mk = am
            if ck:
                for i in range(n):
                    mk[i][i] = mk[i][i] + ck
    return coeffs, adj


def _charpoly_float(a: np.ndarray):
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = 1.0
    eye = np.eye(n, dtype=complex)
    mk = eye.copy()
    adj = []
    with np.errstate(all="ignore"):
        for k in range(1, n + 1):
            adj.append(mk)
            am = a @ mk
            ck = -np.trace(am) / k
            coeffs[n - k] = ck
            if k < n:
                mk = am + ck * eye
    if not (np.all(np.isfinite(coeffs.view(float))) and
            all(np.all(np.isfinite(m.view(float))) for m in adj)):
        raise NumericFailure("characteristic polynomial overflowed")
    return coeffs, adj


def char_and_adjugate(M: SquareMatrix) -> tuple[Polynomial, MatrixPolynomial]:
    """Characteristic polynomial of M together with adj(tI - M)."""
    n, field = M.n, M.field
    if field == FLOAT:
        coeffs, adj = _charpoly_float(M.to_numpy())
        poly = Polynomial(tuple(complex(c) for c in coeffs), FLOAT)
        mats = tuple(
            SquareMatrix(n, FLOAT, tuple(tuple(complex(x) for x in row) for row in m))
            for m in reversed(adj)
        )
        return poly, MatrixPolynomial(mats)
    coeffs, adj = charpoly_in_ring(M.entries, field_zero(field), field_one(field))
    poly = Polynomial(tuple(coeffs), field)
    mats = tuple(
        SquareMatrix(n, field, tuple(tuple(row) for row in m)) for m in reversed(adj)
    )
    return poly, MatrixPolynomial(mats)


def char_poly(M: SquareMatrix) -> Polynomial:
    """Monic degree-n polynomial det(tI - M), ascending coefficients."""
    return char_and_adjugate(M)[0]


def adjugate_poly(M: SquareMatrix) -> MatrixPolynomial:
    """A(t) = adj(tI - M), satisfying (tI - M) A(t) = char_poly(M)(t) I."""
    return char_and_adjugate(M)[1]


def symmetrize(M: SquareMatrix) -> SymPoint:
    """(sigma_1(M), ..., sigma_n(M)): the symmetrization map applied to M."""
    p = char_poly(M)
    n = M.n
    return tuple(
        p.coefficient(n - j) if j % 2 == 0 else -p.coefficient(n - j)
        for j in range(1, n + 1)
    )


def falling_factorial(p: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= p - i
    return out


def _point_field(values, t) -> str:
    for v in (t, *values):
        if isinstance(v, GaussianRational):
            return EXACT
        if isinstance(v, (float, complex)):
            return FLOAT
    return EXACT


def sym_poly_eval(v: Sequence, k: int, t):
    """k-th derivative of the monic polynomial attached to a symmetrized point.

    The point v = (v_1, ..., v_n) determines sum_j (-1)^j v_j t^(n-j) with
    v_0 = 1; this evaluates that polynomial's k-th derivative at t.  For
    v = symmetrize(M) and k = 0 the value is det(tI - M).  k beyond n returns
    zero (the polynomial has degree n).
    """
    if k < 0:
        raise ValueError("derivative order must be non-negative")
    n = len(v)
    field = _point_field(v, t)
    t = coerce_scalar(t, field)
    total = field_zero(field)
    if k > n:
        return total
    for j in range(n + 1):
        p = n - j
        if p < k:
            continue
        vj = field_one(field) if j == 0 else coerce_scalar(v[j - 1], field)
        term = vj * falling_factorial(p, k) * t ** (p - k)
        total = total + (term if j % 2 == 0 else -term)
    return total


def monomial_vector(n: int, k: int, lam) -> tuple:
    """Componentwise k-th derivative of (-t^(n-1), t^(n-2), ..., (-1)^n) at lam.

    These are the gradient vectors of the symmetrized-point polynomial: for
    any point u, sym_poly_eval(u, 0, t) - t^n = dot(monomial_vector(n, 0, t), u).
    """
    if not 0 <= k <= n - 1:
        raise ValueError(f"order k={k} out of range for size {n}")
    field = _point_field((), lam)
    lam = coerce_scalar(lam, field)
    zero = field_zero(field)
    out = []
    for j in range(1, n + 1):
        p = n - j
        if p < k:
            out.append(zero)
            continue
        term = falling_factorial(p, k) * lam ** (p - k)
        out.append(-term if j % 2 == 1 else term)
    return tuple(out)


def dot(u: Sequence, w: Sequence):
    """Unconjugated bilinear form sum_j u_j w_j."""
    if len(u) != len(w):
        raise ValueError(f"length mismatch: {len(u)} vs {len(w)}")
    if not u:
        raise ValueError("empty vectors")
    return _dot_seq(tuple(u), tuple(w))


def spectral_radius_bound(M: SquareMatrix, iterations: int = 8) -> float:
    """Gelfand upper bound ||M^(2^k)||^(1/2^k) on the spectral radius.

    Uses the max-row-sum norm; the sequence decreases to the spectral radius
    as the iteration count grows.  Diagnostic only; no computation in this
    package is gated on membership in the spectral unit ball.
    """
    if M.field != FLOAT:
        raise ValueError("spectral radius bound needs a float matrix")
    if iterations < 0:
        raise ValueError("iteration count must be non-negative")
    a = M.to_numpy()
    with np.errstate(all="ignore"):
        for _ in range(iterations):
            a = a @ a
            if not np.all(np.isfinite(a.view(float))):
                raise NumericFailure("matrix powers overflowed")
        norm = float(np.max(np.sum(np.abs(a), axis=1)))
    if norm == 0.0:
        return 0.0
    return float(norm ** (1.0 / (2 ** iterations)))
