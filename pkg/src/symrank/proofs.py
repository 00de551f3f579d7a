"""Certificate generators pinning the rank of the symmetrization derivative.

Two independent constructions bracket the rank of the derivative at B:

* a null-space certificate: derivative vectors of the signed monomial family
  evaluated at each eigenvalue annihilate every column of the exact
  derivative matrix, and a confluent Vandermonde argument makes them
  linearly independent, forcing rank <= m;
* a tangent certificate: one-hot perturbations of the last row of the final
  companion block map to image vectors with an anti-diagonal echelon pivot
  pattern, forcing rank >= m.

Together the two certificates re-derive rank == m without any singular value
decomposition.  Supporting tools: Newton divided differences with Hermite
(repeated-node) data, a convergence check for the divided-difference limit
formula, the confluent Vandermonde determinant against its closed form, and
an order-of-vanishing verifier for polynomial curves through B.
"""

from __future__ import annotations

import functools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .canonical import (
    FrobeniusSpec,
    JordanSpec,
    build_frobenius,
    build_jordan,
    jordan_combinatorics,
    min_poly_degree,
)
from .jacobian import directional_derivative, jacobian_exact, rank_exact
from .matpoly import (
    MatrixPolynomial,
    Polynomial,
    SquareMatrix,
    charpoly_in_ring,
    dot,
    falling_factorial,
    monomial_vector,
    symmetrize,
)
from .scalars import (
    EXACT,
    FLOAT,
    GaussianRational,
    coerce_scalar,
    field_one,
    field_zero,
    gq,
    random_gaussian_rational,
    scalar_from_json,
    scalar_to_json,
    to_complex,
)

#: Curves through B are matrix polynomials Phi(zeta) with Phi(0) = B.
CurveSpec = MatrixPolynomial


@dataclass(frozen=True)
class NullVector:
    eigenvalue: GaussianRational
    order: int
    vector: tuple


@dataclass(frozen=True)
class NullspaceCertificate:
    """n - m vectors annihilating every column of the derivative matrix."""

    vectors: tuple

    def to_json(self) -> dict:
        return {
            "vectors": [
                {
                    "lambda": scalar_to_json(v.eigenvalue),
                    "k": v.order,
                    "v": [scalar_to_json(x) for x in v.vector],
                }
                for v in self.vectors
            ]
        }

    @classmethod
    def from_json(cls, obj: dict) -> "NullspaceCertificate":
        vectors = tuple(
            NullVector(
                scalar_from_json(v["lambda"], EXACT),
                int(v["k"]),
                tuple(scalar_from_json(x, EXACT) for x in v["v"]),
            )
            for v in obj["vectors"]
        )
        return cls(vectors)


@dataclass(frozen=True)
class TangentCertificate:
    """m image vectors in echelon form; directions index the one-hot h."""

    directions: tuple
    images: tuple
    pivots: tuple

    def to_json(self) -> dict:
        return {
            "directions": list(self.directions),
            "images": [[scalar_to_json(x) for x in img] for img in self.images],
            "pivots": list(self.pivots),
        }


def nullspace_basis(spec: JordanSpec) -> NullspaceCertificate:
    """For each eigenvalue, derivative orders 0 .. multiplicity - largest - 1.

    The count over all eigenvalues is exactly n - m, where m is the minimal
    polynomial degree.
    """
    n = spec.n
    vectors = []
    for blk in spec.blocks:
        comb = jordan_combinatorics(spec, blk.eigenvalue)
        for k in range(comb.multiplicity - comb.largest_block):
            vectors.append(NullVector(blk.eigenvalue, k, monomial_vector(n, k, blk.eigenvalue)))
    return NullspaceCertificate(tuple(vectors))


def verify_annihilation(cert: NullspaceCertificate, B: SquareMatrix) -> bool:
    """True iff every certificate vector kills every column of the derivative."""
    if B.field != EXACT:
        raise ValueError("annihilation check requires an exact matrix")
    if any(not isinstance(x, GaussianRational) for v in cert.vectors for x in v.vector):
        raise ValueError("certificate vectors must be exact")
    jac = jacobian_exact(B)
    for v in cert.vectors:
        for c in range(B.n * B.n):
            if dot(v.vector, jac.column(c)):
                return False
    return True


def divided_difference(nodes, derivatives) -> object:
    """Newton divided difference over nodes with Hermite data at repetitions.

    ``nodes`` is a sequence of scalars in table order; equal nodes must be
    adjacent.  ``derivatives`` maps each node to the sequence
    (f(x), f'(x), ..., f^(r-1)(x)) covering its multiplicity r.  Confluent
    entries use the derivative scaled by the factorial; distinct nodes use
    the usual difference quotient.
    """
    z = list(nodes)
    if not z:
        raise ValueError("at least one node required")
    seen = set()
    previous = None
    for x in z:
        if previous is not None and x == previous:
            continue
        if x in seen:
            raise ValueError(f"repeated node {x} must be contiguous")
        seen.add(x)
        previous = x

    def value(x, order):
        try:
            series = derivatives[x]
        except (KeyError, TypeError):
            raise ValueError(f"no data supplied for node {x}") from None
        if order >= len(series):
            raise ValueError(f"missing derivative data at repeated node {x}")
        return series[order]

    col = [value(x, 0) for x in z]
    for j in range(1, len(z)):
        nxt = []
        for i in range(len(z) - j):
            if z[i + j] == z[i]:
                nxt.append(value(z[i], j) / math.factorial(j))
            else:
                nxt.append((col[i + 1] - col[i]) / (z[i + j] - z[i]))
        col = nxt
    return col[0]


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors of k! f[lam, lam+eps, ..., lam+k*eps] against the k-th derivative.

    When k = n - 1 every component of the monomial family has degree at most
    k, so the scaled divided difference is exact independent of eps; the only
    residual in the float field is cancellation noise, which grows as eps
    shrinks.  top_order marks that regime; there the check compares errors
    against a roundoff allowance instead of demanding a decreasing sequence
    that floating point cannot deliver.
    """

    n: int
    order: int
    lam: complex
    eps: tuple
    errors: tuple
    floor: float
    top_order: bool
    allowances: tuple
    passed: bool


def genocchi_hermite_check(n: int, k: int, lam, eps_sequence) -> ConvergenceReport:
    """Confluent-limit convergence: the scaled divided difference over nodes
    lam, lam+eps, ..., lam+k*eps must approach the k-th derivative vector at
    first order in eps or better; at top order (k = n - 1) the difference is
    exact and the errors only need to sit at the roundoff level.
    """
    if not 0 <= k <= n - 1:
        raise ValueError(f"order k={k} out of range for size {n}")
    lam = complex(lam)
    eps_sequence = tuple(float(e) for e in eps_sequence)
    if any(e <= 0 for e in eps_sequence):
        raise ValueError("eps values must be positive")
    target = monomial_vector(n, k, lam)
    scale = max(1.0, max(abs(t) for t in target))
    floor = 1e-11 * scale
    machine = 2.220446049250313e-16
    errors = []
    allowances = []
    for eps in eps_sequence:
        points = [lam + i * eps for i in range(k + 1)]
        fmax = 1.0
        approx = []
        for comp in range(n):
            data = {x: (monomial_vector(n, 0, x)[comp],) for x in points}
            fmax = max(fmax, max(abs(data[x][0]) for x in points))
            approx.append(math.factorial(k) * divided_difference(points, data))
        errors.append(max(abs(a - t) for a, t in zip(approx, target)))
        allowances.append(64.0 * n * (2 ** k) * machine * fmax / eps ** k)
    top_order = k == n - 1
    if top_order:
        passed = all(err <= allow for err, allow in zip(errors, allowances))
    else:
        passed = True
        for (e_prev, err_prev), (e_next, err_next) in zip(
            zip(eps_sequence, errors), zip(eps_sequence[1:], errors[1:])
        ):
            if err_next <= floor:
                continue
            if err_prev <= floor:
                passed = False
                break
            if err_prev / err_next < 0.8 * (e_prev / e_next):
                passed = False
                break
    return ConvergenceReport(
        n, k, lam, eps_sequence, tuple(errors), floor, top_order,
        tuple(allowances), passed,
    )


def _det_exact(rows):
    """Determinant by fraction-free condensation with row-swap sign tracking."""
    a = [list(r) for r in rows]
    n = len(a)
    sign = 1
    prev = None
    for r in range(n - 1):
        pr = next((i for i in range(r, n) if a[i][r]), None)
        if pr is None:
            return field_zero(EXACT)
        if pr != r:
            a[r], a[pr] = a[pr], a[r]
            sign = -sign
        for i in range(r + 1, n):
            for j in range(r + 1, n):
                num = a[r][r] * a[i][j] - a[i][r] * a[r][j]
                a[i][j] = num / prev if prev is not None else num
        prev = a[r][r]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


@dataclass(frozen=True)
class VandermondeComparison:
    """Direct confluent Vandermonde determinant against the closed form.

    The closed form is the factorial product times all pairwise eigenvalue
    differences raised to the product of the multiplicities; the comparison
    is made exactly on squared moduli, which stay rational for Gaussian
    rational eigenvalues.
    """

    determinant: GaussianRational
    det_abs_squared: Fraction
    closed_abs_squared: Fraction
    closed_form_abs: float
    matches: bool
    sign: int | None


def confluent_vandermonde_det(clusters) -> VandermondeComparison:
    """Determinant of [v(l1), v'(l1), ..., v(l2), ...] vs the closed form."""
    groups = [(coerce_scalar(lam, EXACT), int(mult)) for lam, mult in clusters]
    if any(m < 1 for _, m in groups):
        raise ValueError("multiplicities must be positive")
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            if groups[a][0] == groups[b][0]:
                raise ValueError(f"repeated cluster eigenvalue {groups[a][0]}")
    n = sum(m for _, m in groups)
    columns = []
    for lam, mult in groups:
        for d in range(mult):
            columns.append(monomial_vector(n, d, lam))
    rows = [[columns[c][r] for c in range(n)] for r in range(n)]
    det = _det_exact(rows)
    det_abs2 = (det * det.conjugate()).re
    factorial_part = 1
    for _, mult in groups:
        for j in range(mult):
            factorial_part *= math.factorial(j)
    closed_abs2 = Fraction(factorial_part) ** 2
    for a in range(len(groups)):
        for b in range(a + 1, len(groups)):
            diff = groups[b][0] - groups[a][0]
            closed_abs2 *= diff.abs2() ** (groups[a][1] * groups[b][1])
    if det.im:
        sign = None
    else:
        sign = 0 if not det.re else (1 if det.re > 0 else -1)
    return VandermondeComparison(
        determinant=det,
        det_abs_squared=det_abs2,
        closed_abs_squared=closed_abs2,
        closed_form_abs=math.sqrt(float(closed_abs2)),
        matches=(det_abs2 == closed_abs2),
        sign=sign,
    )


def tangent_direction(fspec: FrobeniusSpec, index: int) -> SquareMatrix:
    """Perturbation with h_index = 1: a single -1 in the last row of the
    final companion block, at the block column index - 1 (1-based index)."""
    n = fspec.n
    m = fspec.min_degree
    if not 1 <= index <= m:
        raise ValueError(f"direction index {index} out of range 1..{m}")
    zero = field_zero(EXACT)
    rows = [[zero] * n for _ in range(n)]
    rows[n - 1][n - m + index - 1] = -field_one(EXACT)
    return SquareMatrix.from_rows(rows, EXACT)


def tangent_construction(fspec: FrobeniusSpec) -> TangentCertificate:
    """Images of the m one-hot last-row perturbations of the final block.

    The image of direction i has its first nonzero component at position
    m - i + 1, so the m images form an anti-diagonal echelon pattern.
    """
    B = build_frobenius(fspec)
    m = fspec.min_degree
    directions = []
    images = []
    pivots = []
    for i in range(1, m + 1):
        image = directional_derivative(B, tangent_direction(fspec, i))
        pivot = next((pos + 1 for pos, x in enumerate(image) if x), 0)
        directions.append(i)
        images.append(image)
        pivots.append(pivot)
    return TangentCertificate(tuple(directions), tuple(images), tuple(pivots))


def tangent_ok(cert: TangentCertificate) -> bool:
    """Exact rank m plus the anti-diagonal pivot pattern (m, m-1, ..., 1)."""
    m = len(cert.images)
    if m == 0:
        return False
    if cert.pivots != tuple(range(m, 0, -1)):
        return False
    return rank_exact(cert.images) == m


def _perturbed_by(fspec: FrobeniusSpec, B: SquareMatrix, h) -> SquareMatrix:
    n, m = fspec.n, fspec.min_degree
    rows = [list(r) for r in B.entries]
    for j, hj in enumerate(h):
        rows[n - 1][n - m + j] = rows[n - 1][n - m + j] - hj
    return SquareMatrix.from_rows(rows, EXACT)


def sigma_linearity_check(fspec: FrobeniusSpec, trials: int, seed: int = 0) -> bool:
    """Sampled exact check that each sigma_k moves linearly in the h variables.

    Verifies additivity and homogeneity of h -> symmetrize(B + H(h)) -
    symmetrize(B), that component k has a nonzero coefficient on h_(m-k+1)
    for k = 1..m, and no dependence on h_j for j < m-k+1.
    """
    B = build_frobenius(fspec)
    m = fspec.min_degree
    base = symmetrize(B)

    def delta(h):
        moved = symmetrize(_perturbed_by(fspec, B, h))
        return tuple(a - b for a, b in zip(moved, base))

    rng = random.Random(seed)
    zero = field_zero(EXACT)
    one = field_one(EXACT)
    for _ in range(trials):
        h1 = tuple(random_gaussian_rational(rng, 4) for _ in range(m))
        h2 = tuple(random_gaussian_rational(rng, 4) for _ in range(m))
        alpha = random_gaussian_rational(rng, 4)
        summed = delta(tuple(a + b for a, b in zip(h1, h2)))
        expected = tuple(a + b for a, b in zip(delta(h1), delta(h2)))
        if summed != expected:
            return False
        scaled = delta(tuple(alpha * a for a in h1))
        if scaled != tuple(alpha * a for a in delta(h1)):
            return False
    for k in range(1, m + 1):
        for j in range(1, m + 1):
            unit = tuple(one if idx == j else zero for idx in range(1, m + 1))
            component = delta(unit)[k - 1]
            if j == m - k + 1 and not component:
                return False
            if j < m - k + 1 and component:
                return False
    return True


@dataclass(frozen=True)
class VanishingReport:
    """Observed versus mandatory vanishing order of one derivative value."""

    eigenvalue: GaussianRational
    order: int
    observed_order: int | None
    required_order: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "lambda": scalar_to_json(self.eigenvalue),
            "k": self.order,
            "observed_order": self.observed_order,
            "required_order": self.required_order,
            "passed": self.passed,
        }


def linear_curve(B: SquareMatrix, M: SquareMatrix) -> MatrixPolynomial:
    return MatrixPolynomial((B, M))


@functools.lru_cache(maxsize=128)
def _curve_char_coeffs(curve: MatrixPolynomial) -> tuple:
    """Characteristic coefficients of a curve, each a polynomial in the
    curve parameter; cached since one curve is queried at many (lam, k)."""
    n = curve.n
    entries = [[curve.entry_poly(i, j) for j in range(n)] for i in range(n)]
    coeffs, _ = charpoly_in_ring(entries, Polynomial.zero(EXACT), Polynomial.one(EXACT))
    return tuple(coeffs)


def order_of_vanishing(spec: JordanSpec, curve: MatrixPolynomial, lam, k: int) -> VanishingReport:
    """Vanishing order in the curve parameter of the k-th derivative value.

    The curve's characteristic polynomial is expanded exactly with polynomial
    entries, its k-th t-derivative is evaluated at the eigenvalue, and the
    lowest nonzero power of the curve parameter is compared against the
    mandatory order coming from the block-start combinatorics (None means
    identically zero, which passes every requirement).
    """
    lam = coerce_scalar(lam, EXACT)
    if curve.field != EXACT:
        raise ValueError("vanishing orders are computed in the exact field")
    B = build_jordan(spec)
    if curve.coefficients[0] != B:
        raise ValueError("curve base mismatch: curve(0) must equal the spec's matrix")
    comb = jordan_combinatorics(spec, lam)
    if not 0 <= k <= comb.multiplicity - 1:
        raise ValueError(f"order k={k} out of range for multiplicity {comb.multiplicity}")
    n = spec.n
    coeffs = _curve_char_coeffs(curve)
    derivative_value = Polynomial.zero(EXACT)
    for p in range(k, n + 1):
        weight = falling_factorial(p, k) * lam ** (p - k)
        derivative_value = derivative_value + coeffs[p] * weight
    observed = derivative_value.lowest_nonzero_degree()
    required = comb.orders[comb.multiplicity - k - 1]
    passed = observed is None or observed >= required
    return VanishingReport(lam, k, observed, required, passed)
