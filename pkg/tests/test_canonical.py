"""Jordan and Frobenius constructions, minimal polynomials, combinatorics."""

import random

import pytest

from symrank.canonical import (
    EigenvalueBlocks,
    FrobeniusSpec,
    JordanSpec,
    build_companion,
    build_frobenius,
    build_jordan,
    jordan_combinatorics,
    jordan_to_frobenius,
    min_poly_degree,
    min_poly_krylov,
    random_similarity,
)
from symrank.cli import enumerate_jordan_specs
from symrank.matpoly import Polynomial, SquareMatrix, char_poly
from symrank.scalars import EXACT, FLOAT, gq


def gauss_rank(rows):
    """Independent rank oracle: plain exact row reduction (not fraction-free)."""
    work = [list(r) for r in rows]
    if not work:
        return 0
    ncols = len(work[0])
    rank = 0
    for c in range(ncols):
        pivot = next((i for i in range(rank, len(work)) if work[i][c]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pv = work[rank][c]
        work[rank] = [x / pv for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][c]:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[rank])]
        rank += 1
    return rank


def eval_poly_at_matrix(p, M):
    total = SquareMatrix.zeros(M.n, M.field)
    power = SquareMatrix.identity(M.n, M.field)
    for c in p.coefficients:
        total = total + power.scale(c)
        power = power @ M
    return total


def min_poly_oracle(M):
    """Brute-force minimal degree: first k with vec(M^k) in the span of lower powers."""
    n = M.n
    power = SquareMatrix.identity(n)
    vecs = [[x for row in power.entries for x in row]]
    for k in range(1, n + 1):
        power = power @ M
        vec = [x for row in power.entries for x in row]
        cols = list(zip(*(vecs + [vec])))
        if gauss_rank(cols) <= len(vecs):
            return k
        vecs.append(vec)
    raise AssertionError("unreachable")


def test_build_jordan_single_block():
    B = build_jordan(JordanSpec.of({0: [2]}))
    assert B.entries == ((gq(0), gq(1)), (gq(0), gq(0)))


def test_build_jordan_superdiagonal_pattern():
    lam = gq(4)
    B = build_jordan(JordanSpec.of([(lam, [1, 2])]))
    superdiag = tuple(B.entries[i][i + 1] for i in range(2))
    assert superdiag == (gq(0), gq(1))
    assert all(B.entries[i][i] == lam for i in range(3))


def test_build_jordan_distinct_eigenvalues():
    B = build_jordan(JordanSpec.of({1: [1], 2: [1]}))
    assert B.entries == ((gq(1), gq(0)), (gq(0), gq(2)))


def test_jordan_spec_invariants():
    with pytest.raises(ValueError):
        JordanSpec(2, (EigenvalueBlocks(gq(0), (2, 1)),))  # not ascending
    with pytest.raises(ValueError):
        JordanSpec(2, (EigenvalueBlocks(gq(0), (1,)), EigenvalueBlocks(gq(0), (1,))))
    with pytest.raises(ValueError):
        JordanSpec(3, (EigenvalueBlocks(gq(0), (2,)),))  # sizes sum mismatch
    with pytest.raises(ValueError):
        JordanSpec(1, (EigenvalueBlocks(gq(0), ()),))
    with pytest.raises(ValueError):
        JordanSpec(1, (EigenvalueBlocks(0.5, (1,)),))  # float eigenvalue


def test_jordan_spec_json_round_trip():
    spec = JordanSpec.of([(gq(0, 1), [1, 2]), (gq(2), [1])])
    assert JordanSpec.from_json(spec.to_json()) == spec


def test_build_companion_linear():
    lam = gq(5, -2)
    C = build_companion(Polynomial.make([-lam, 1]))
    assert C.entries == ((lam,),)


def test_build_companion_t_squared():
    C = build_companion(Polynomial.make([0, 0, 1]))
    assert C.entries == ((gq(0), gq(1)), (gq(0), gq(0)))


def test_build_companion_char_poly_round_trip():
    p = Polynomial.make([5, 3, 1])
    assert char_poly(build_companion(p)) == p


def test_build_companion_rejects_non_monic():
    with pytest.raises(ValueError):
        build_companion(Polynomial.make([1, 2]))
    with pytest.raises(ValueError):
        build_companion(Polynomial.make([7]))


def test_build_frobenius_single_factor():
    B = build_frobenius(FrobeniusSpec((Polynomial.make([0, 0, 1]),)))
    assert B.entries == ((gq(0), gq(1)), (gq(0), gq(0)))


def test_build_frobenius_two_factors():
    spec = FrobeniusSpec((Polynomial.make([0, 1]), Polynomial.make([0, 0, 1])))
    B = build_frobenius(spec)
    assert B.entries == (
        (gq(0), gq(0), gq(0)),
        (gq(0), gq(0), gq(1)),
        (gq(0), gq(0), gq(0)),
    )


def test_build_frobenius_char_poly():
    # factors (t-1, (t-1)(t-2)): characteristic polynomial (t-1)^2 (t-2)
    p1 = Polynomial.make([-1, 1])
    p2 = Polynomial.make([-1, 1]) * Polynomial.make([-2, 1])
    B = build_frobenius(FrobeniusSpec((p1, p2)))
    assert B.n == 3
    expected = p1 * p2
    assert char_poly(B) == expected


def test_frobenius_divisibility_enforced():
    with pytest.raises(ValueError):
        FrobeniusSpec((Polynomial.make([-1, 1]), Polynomial.make([0, 0, 1])))


def test_frobenius_json_round_trip():
    spec = FrobeniusSpec((Polynomial.make([0, 1]), Polynomial.make([0, 0, 1])))
    assert FrobeniusSpec.from_json(spec.to_json()) == spec


def test_min_poly_degree_examples():
    assert min_poly_degree(JordanSpec.of({0: [1, 1]})) == 1
    assert min_poly_degree(JordanSpec.of({1: [1], 2: [1], 3: [1]})) == 3
    assert min_poly_degree(JordanSpec.of([(gq(1), [2, 2]), (gq(2), [1])])) == 3


def test_min_poly_degree_matches_krylov_oracle():
    spec = JordanSpec.of([(gq(1), [2, 2]), (gq(2), [1])])
    M = build_jordan(spec)
    assert min_poly_degree(spec) == min_poly_krylov(M).degree == min_poly_oracle(M)


def test_min_poly_krylov_zero():
    assert min_poly_krylov(SquareMatrix.zeros(3)) == Polynomial.make([0, 1])


def test_min_poly_krylov_identity():
    assert min_poly_krylov(SquareMatrix.identity(4)) == Polynomial.make([-1, 1])


def test_min_poly_krylov_jordan_block():
    # (t - 2)^3 = t^3 - 6t^2 + 12t - 8
    M = build_jordan(JordanSpec.of({2: [3]}))
    p = min_poly_krylov(M)
    assert p == Polynomial.make([-8, 12, -6, 1])
    # annihilates the matrix, and no lower degree does
    assert eval_poly_at_matrix(p, M).is_zero()
    assert min_poly_oracle(M) == 3


def test_min_poly_krylov_divides_char_poly():
    rng = random.Random(31)
    for spec in random.Random(5).sample(list(enumerate_jordan_specs(4, [gq(0), gq(1), gq(0, 1)])), 12):
        M = build_jordan(spec)
        p = min_poly_krylov(M)
        assert p.divides(char_poly(M))
        assert eval_poly_at_matrix(p, M).is_zero()


def test_min_poly_krylov_float_mode():
    M = build_jordan(JordanSpec.of({2: [3]})).to_float()
    p = min_poly_krylov(M)
    assert p.degree == 3
    for got, want in zip(p.coefficients, (-8, 12, -6, 1)):
        assert abs(got - want) < 1e-8
    assert min_poly_krylov(SquareMatrix.zeros(3).to_float()).degree == 1


def test_jordan_combinatorics_hand_enumerated():
    # single block of size 2
    c = jordan_combinatorics(JordanSpec.of({0: [2]}), gq(0))
    assert (c.block_starts, c.orders, c.largest_block) == ((1,), (1, 1), 2)
    # two blocks of size 1
    c = jordan_combinatorics(JordanSpec.of({0: [1, 1]}), gq(0))
    assert (c.block_starts, c.orders, c.largest_block) == ((1, 2), (1, 2), 1)
    # blocks [1, 2]
    c = jordan_combinatorics(JordanSpec.of({0: [1, 2]}), gq(0))
    assert (c.block_starts, c.orders, c.largest_block) == ((1, 2), (1, 1, 2), 2)


def test_jordan_combinatorics_rejects_foreign_eigenvalue():
    with pytest.raises(ValueError):
        jordan_combinatorics(JordanSpec.of({0: [2]}), gq(1))


def test_jordan_combinatorics_properties():
    rng = random.Random(77)
    pool = [gq(0), gq(1), gq(-1)]
    for n in range(1, 6):
        for spec in enumerate_jordan_specs(n, pool):
            slack = 0
            for blk in spec.blocks:
                c = jordan_combinatorics(spec, blk.eigenvalue)
                assert c.orders[0] == 1
                assert all(d <= c.block_count + 1 for d in c.orders)
                assert all(a <= b for a, b in zip(c.orders, c.orders[1:]))
                assert c.largest_block == blk.sizes[-1]
                slack += c.multiplicity - c.largest_block
            assert slack == n - min_poly_degree(spec)


def test_jordan_to_frobenius_examples():
    fs = jordan_to_frobenius(JordanSpec.of({0: [1, 1]}))
    assert [p.coefficients for p in fs.invariant_factors] == [(gq(0), gq(1))] * 2
    fs = jordan_to_frobenius(JordanSpec.of({0: [2]}))
    assert [p.coefficients for p in fs.invariant_factors] == [(gq(0), gq(0), gq(1))]
    fs = jordan_to_frobenius(JordanSpec.of({0: [1, 2], 1: [1]}))
    assert [p.degree for p in fs.invariant_factors] == [1, 3]
    assert fs.invariant_factors[0].divides(fs.invariant_factors[1])


def test_jordan_frobenius_same_invariants():
    # both canonical forms share characteristic and minimal polynomials
    pool = [gq(0), gq(1), gq(0, 1)]
    for n in range(1, 5):
        for spec in enumerate_jordan_specs(n, pool):
            J = build_jordan(spec)
            F = build_frobenius(jordan_to_frobenius(spec))
            assert char_poly(J) == char_poly(F)
            assert min_poly_krylov(J) == min_poly_krylov(F)


def test_min_poly_degree_formula_matches_krylov_everywhere():
    pool = [gq(0), gq(1), gq(0, 1)]
    for n in range(1, 5):
        for spec in enumerate_jordan_specs(n, pool):
            assert min_poly_degree(spec) == min_poly_krylov(build_jordan(spec)).degree


def test_random_similarity_identity_when_no_shears():
    rng = random.Random(1)
    M = build_jordan(JordanSpec.of({0: [1, 2]}))
    assert random_similarity(M, seed=5, shear_count=0) == M


def test_random_similarity_preserves_invariants():
    spec = JordanSpec.of({0: [1, 2], 1: [1]})
    M = build_jordan(spec)
    for seed in range(5):
        C = random_similarity(M, seed)
        assert char_poly(C) == char_poly(M)
        assert min_poly_krylov(C).degree == min_poly_krylov(M).degree


def test_random_similarity_unimodular():
    # determinant of the conjugated matrix equals the original's
    spec = JordanSpec.of({2: [1, 1], 0: [1]})
    M = build_jordan(spec)
    C = random_similarity(M, seed=9)
    assert char_poly(C).coefficients[0] == char_poly(M).coefficients[0]


def test_random_similarity_requires_exact():
    with pytest.raises(ValueError):
        random_similarity(SquareMatrix.identity(2, FLOAT), seed=0)
