"""Structural descriptions of matrices: Jordan and Frobenius canonical forms.

A JordanSpec is the ground truth for everything downstream: it fixes the
eigenvalues and elementary block sizes, hence the minimal polynomial degree
(sum over eigenvalues of the largest block size).  Eigenvalues are always
user-supplied exact scalars; this package never extracts Jordan structure
from a raw float matrix, which is ill-posed.

The block-start combinatorics attached to one eigenvalue (the set of indices
where the superdiagonal of the eigenvalue's superblock is zero, and the
derived vanishing orders) feed the certificate generators in
:mod:`symrank.proofs`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .matpoly import Polynomial, SquareMatrix
from .scalars import (
    EXACT,
    FLOAT,
    GaussianRational,
    coerce_scalar,
    field_one,
    field_zero,
    scalar_from_json,
    scalar_to_json,
)


@dataclass(frozen=True)
class EigenvalueBlocks:
    """One eigenvalue with its elementary block sizes, ascending."""

    eigenvalue: GaussianRational
    sizes: tuple


@dataclass(frozen=True)
class JordanSpec:
    """Eigenvalues plus block-size partitions; total size n."""

    n: int
    blocks: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("matrix size must be at least 1")
        if not self.blocks:
            raise ValueError("at least one eigenvalue group required")
        seen = []
        total = 0
        for blk in self.blocks:
            if not isinstance(blk.eigenvalue, GaussianRational):
                raise ValueError("eigenvalues must be exact scalars")
            if any(e == blk.eigenvalue for e in seen):
                raise ValueError(f"repeated eigenvalue {blk.eigenvalue}")
            seen.append(blk.eigenvalue)
            if not blk.sizes:
                raise ValueError("each eigenvalue needs at least one block")
            if any(not isinstance(s, int) or s < 1 for s in blk.sizes):
                raise ValueError("block sizes must be positive integers")
            if any(a > b for a, b in zip(blk.sizes, blk.sizes[1:])):
                raise ValueError(f"block sizes must be ascending, got {blk.sizes}")
            total += sum(blk.sizes)
        if total != self.n:
            raise ValueError(f"block sizes sum to {total}, expected n={self.n}")

    @classmethod
    def of(cls, blocks: Mapping | Sequence, n: int | None = None) -> "JordanSpec":
        """Convenience constructor; sorts sizes and coerces eigenvalues."""
        items = blocks.items() if isinstance(blocks, Mapping) else blocks
        groups = tuple(
            EigenvalueBlocks(coerce_scalar(eig, EXACT), tuple(sorted(sizes)))
            for eig, sizes in items
        )
        total = sum(sum(g.sizes) for g in groups)
        return cls(n if n is not None else total, groups)

    @property
    def spectrum(self) -> tuple:
        return tuple(blk.eigenvalue for blk in self.blocks)

    def sizes_for(self, lam) -> tuple:
        for blk in self.blocks:
            if blk.eigenvalue == lam:
                return blk.sizes
        raise ValueError(f"{lam} is not an eigenvalue of this spec")

    def multiplicity(self, lam) -> int:
        return sum(self.sizes_for(lam))

    def describe(self) -> str:
        groups = "; ".join(f"{blk.eigenvalue}:{list(blk.sizes)}" for blk in self.blocks)
        return f"n={self.n} [{groups}]"

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "blocks": [
                {"eigenvalue": scalar_to_json(blk.eigenvalue), "sizes": list(blk.sizes)}
                for blk in self.blocks
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "JordanSpec":
        try:
            n = obj["n"]
            blocks = obj["blocks"]
        except (TypeError, KeyError) as exc:
            raise ValueError(f"Jordan spec JSON missing key: {exc}") from None
        groups = []
        for b in blocks:
            try:
                eig = scalar_from_json(b["eigenvalue"], EXACT)
                sizes = tuple(int(s) for s in b["sizes"])
            except (TypeError, KeyError) as exc:
                raise ValueError(f"bad Jordan block entry: {exc}") from None
            groups.append(EigenvalueBlocks(eig, sizes))
        return cls(n, tuple(groups))


@dataclass(frozen=True)
class FrobeniusSpec:
    """Invariant factors p_1 | p_2 | ... | p_l, ascending degree, all monic."""

    invariant_factors: tuple

    def __post_init__(self):
        factors = self.invariant_factors
        if not factors:
            raise ValueError("at least one invariant factor required")
        for p in factors:
            if p.field != EXACT:
                raise ValueError("invariant factors must be exact polynomials")
            if p.is_zero or not p.is_monic or p.degree < 1:
                raise ValueError("invariant factors must be monic of degree >= 1")
        for a, b in zip(factors, factors[1:]):
            if a.degree > b.degree:
                raise ValueError("invariant factors must be in ascending degree")
            if not a.divides(b):
                raise ValueError(f"divisibility violated: {a} does not divide {b}")

    @property
    def n(self) -> int:
        return sum(p.degree for p in self.invariant_factors)

    @property
    def minimal_polynomial(self) -> Polynomial:
        return self.invariant_factors[-1]

    @property
    def min_degree(self) -> int:
        return self.minimal_polynomial.degree

    def to_json(self) -> dict:
        return {"invariant_factors": [p.to_json() for p in self.invariant_factors]}

    @classmethod
    def from_json(cls, obj: dict) -> "FrobeniusSpec":
        try:
            factors = obj["invariant_factors"]
        except (TypeError, KeyError):
            raise ValueError("Frobenius spec JSON needs 'invariant_factors'") from None
        return cls(tuple(Polynomial.from_json(f, EXACT) for f in factors))


@dataclass(frozen=True)
class JordanCombinatorics:
    """Block-start bookkeeping for one eigenvalue.

    block_starts is the ascending tuple of indices (1-based, within this
    eigenvalue's superblock) at which an elementary block begins, i.e. where
    the superdiagonal entry vanishes; index 1 is always included.  orders[i-1]
    is 1 plus the number of block starts in the integer window
    [multiplicity - i + 2, multiplicity], the mandatory vanishing order used
    by the curve estimates.
    """

    eigenvalue: GaussianRational
    multiplicity: int
    block_starts: tuple
    block_count: int
    last_start: int
    largest_block: int
    orders: tuple


def jordan_combinatorics(spec: JordanSpec, lam) -> JordanCombinatorics:
    lam = coerce_scalar(lam, EXACT)
    sizes = spec.sizes_for(lam)
    m = sum(sizes)
    starts = [1]
    for s in sizes[:-1]:
        starts.append(starts[-1] + s)
    f0 = tuple(starts)
    b_s = starts[-1]
    d = tuple(
        1 + sum(1 for b in f0 if m - i + 2 <= b <= m)
        for i in range(1, m + 1)
    )
    return JordanCombinatorics(
        eigenvalue=lam,
        multiplicity=m,
        block_starts=f0,
        block_count=len(sizes),
        last_start=b_s,
        largest_block=m + 1 - b_s,
        orders=d,
    )


def build_jordan(spec: JordanSpec) -> SquareMatrix:
    """Block-diagonal matrix with elementary Jordan blocks, ascending sizes."""
    n = spec.n
    zero, one = field_zero(EXACT), field_one(EXACT)
    rows = [[zero] * n for _ in range(n)]
    offset = 0
    for blk in spec.blocks:
        for size in blk.sizes:
            for i in range(size):
                rows[offset + i][offset + i] = blk.eigenvalue
                if i + 1 < size:
                    rows[offset + i][offset + i + 1] = one
            offset += size
    return SquareMatrix.from_rows(rows, EXACT)


def build_companion(p: Polynomial) -> SquareMatrix:
    """Companion matrix: superdiagonal ones, last row the negated coefficients."""
    if p.is_zero or not p.is_monic:
        raise ValueError("companion matrix requires a monic polynomial")
    m = p.degree
    if m < 1:
        raise ValueError("companion matrix requires degree >= 1")
    field = p.field
    zero, one = field_zero(field), field_one(field)
    rows = [[zero] * m for _ in range(m)]
    for i in range(m - 1):
        rows[i][i + 1] = one
    for j in range(m):
        rows[m - 1][j] = -p.coefficients[j]
    return SquareMatrix.from_rows(rows, field)


def build_frobenius(spec: FrobeniusSpec) -> SquareMatrix:
    """Block diagonal of companion matrices of the invariant factors."""
    n = spec.n
    zero = field_zero(EXACT)
    rows = [[zero] * n for _ in range(n)]
    offset = 0
    for p in spec.invariant_factors:
        block = build_companion(p)
        for i in range(block.n):
            for j in range(block.n):
                rows[offset + i][offset + j] = block.entries[i][j]
        offset += block.n
    return SquareMatrix.from_rows(rows, EXACT)


def min_poly_degree(spec: JordanSpec) -> int:
    """Sum over eigenvalues of the largest elementary block size."""
    return sum(blk.sizes[-1] for blk in spec.blocks)


def _flatten(M: SquareMatrix) -> list:
    return [x for row in M.entries for x in row]


def _solve_in_span(columns: list, rhs: list, zero, one):
    """Exact coefficients x with sum_j x_j columns[j] = rhs, or None."""
    rows = len(rhs)
    ncols = len(columns)
    aug = [[columns[j][i] for j in range(ncols)] + [rhs[i]] for i in range(rows)]
    pivots = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, rows) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append((r, c))
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if aug[i][ncols]:
            return None
    x = [zero] * ncols
    for ri, ci in pivots:
        x[ci] = aug[ri][ncols]
    return x


def min_poly_krylov(M: SquareMatrix, tol: float | None = None) -> Polynomial:
    """Minimal polynomial as the first linear dependence among I, M, M^2, ...

    Exact matrices give the exact monic minimal polynomial.  Float matrices
    give a degree estimate: the dependence test uses a singular-value
    tolerance and the coefficients come from least squares.
    """
    n, field = M.n, M.field
    if field == EXACT:
        zero, one = field_zero(EXACT), field_one(EXACT)
        power = SquareMatrix.identity(n, EXACT)
        vecs = [_flatten(power)]
        for k in range(1, n + 1):
            power = M @ power
            target = _flatten(power)
            combo = _solve_in_span(vecs, target, zero, one)
            if combo is not None:
                return Polynomial(tuple(-c for c in combo) + (one,), EXACT)
            vecs.append(target)
        raise AssertionError("Cayley-Hamilton guarantees dependence by degree n")
    a = M.to_numpy()
    power = np.eye(n, dtype=complex)
    vecs = [power.ravel()]
    for k in range(1, n + 1):
        power = a @ power
        target = power.ravel()
        stack = np.column_stack(vecs + [target])
        sv = np.linalg.svd(stack, compute_uv=False)
        threshold = tol if tol is not None else max(stack.shape) * np.finfo(float).eps * (sv[0] if sv.size else 0.0)
        if sv[-1] <= threshold:
            basis = np.column_stack(vecs)
            combo, *_ = np.linalg.lstsq(basis, target, rcond=None)
            coeffs = [complex(-c) for c in combo] + [complex(1.0)]
            return Polynomial(tuple(coeffs), FLOAT)
        vecs.append(target)
    raise AssertionError("Cayley-Hamilton guarantees dependence by degree n")


def jordan_to_frobenius(spec: JordanSpec) -> FrobeniusSpec:
    """Invariant factors read off the Jordan structure.

    The k-th factor from the top multiplies, over all eigenvalues, the linear
    factor raised to the (k+1)-th largest block size present there; the last
    factor is the minimal polynomial.
    """
    depth = max(len(blk.sizes) for blk in spec.blocks)
    factors = []
    for level in range(depth):
        poly = Polynomial.one(EXACT)
        for blk in spec.blocks:
            sizes_desc = sorted(blk.sizes, reverse=True)
            if level < len(sizes_desc):
                linear = Polynomial.make([-blk.eigenvalue, 1], EXACT)
                poly = poly * linear ** sizes_desc[level]
        factors.append(poly)
    return FrobeniusSpec(tuple(reversed(factors)))


def random_similarity(M: SquareMatrix, seed: int, shear_count: int | None = None,
                      magnitude: int = 2) -> SquareMatrix:
    """Conjugate M by a random integer unimodular matrix Q (det Q = 1).

    Q is a product of elementary shears I + c E_ij with |c| <= magnitude, so
    its inverse is exact and the result stays in the exact field.
    """
    if M.field != EXACT:
        raise ValueError("random similarity requires an exact matrix")
    n = M.n
    if n == 1:
        return M
    rng = random.Random(seed)
    count = shear_count if shear_count is not None else 2 * n
    ops = []
    for _ in range(count):
        i = rng.randrange(n)
        j = rng.randrange(n - 1)
        if j >= i:
            j += 1
        c = rng.choice([k for k in range(-magnitude, magnitude + 1) if k != 0])
        ops.append((i, j, c))
    zero, one = field_zero(EXACT), field_one(EXACT)
    q = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i, j, c in ops:
        q[i] = [a + c * b for a, b in zip(q[i], q[j])]
    qinv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i, j, c in ops:
        for row in qinv:
            row[j] = row[j] - c * row[i]
    Q = SquareMatrix.from_rows(q, EXACT)
    Qinv = SquareMatrix.from_rows(qinv, EXACT)
    return Q @ M @ Qinv
