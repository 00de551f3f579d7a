"""Null-space and tangent certificates, divided differences, vanishing orders."""

import random
from fractions import Fraction

import pytest

from symrank.canonical import (
    FrobeniusSpec,
    JordanSpec,
    build_frobenius,
    build_jordan,
    jordan_to_frobenius,
    min_poly_degree,
)
from symrank.cli import enumerate_jordan_specs
from symrank.jacobian import directional_derivative, jacobian_exact, rank_exact
from symrank.matpoly import MatrixPolynomial, Polynomial, SquareMatrix, dot, symmetrize
from symrank.proofs import (
    NullspaceCertificate,
    NullVector,
    confluent_vandermonde_det,
    divided_difference,
    genocchi_hermite_check,
    linear_curve,
    nullspace_basis,
    order_of_vanishing,
    sigma_linearity_check,
    tangent_construction,
    tangent_direction,
    tangent_ok,
    verify_annihilation,
)
from symrank.scalars import EXACT, gq, random_gaussian_rational
from tests.test_matpoly import laplace_det


def test_nullspace_two_scalar_blocks():
    cert = nullspace_basis(JordanSpec.of({0: [1, 1]}))
    assert len(cert.vectors) == 1
    v = cert.vectors[0]
    assert (v.eigenvalue, v.order) == (gq(0), 0)
    assert v.vector == (gq(0), gq(1))


def test_nullspace_non_derogatory_empty():
    cert = nullspace_basis(JordanSpec.of({3: [4]}))
    assert cert.vectors == ()
    assert verify_annihilation(cert, build_jordan(JordanSpec.of({3: [4]})))


def test_nullspace_mixed_blocks():
    cert = nullspace_basis(JordanSpec.of({0: [1, 2]}))
    assert len(cert.vectors) == 1
    assert cert.vectors[0].vector == (gq(0), gq(0), gq(-1))
    # exact annihilation against all nine derivative columns
    B = build_jordan(JordanSpec.of({0: [1, 2]}))
    jac = jacobian_exact(B)
    for c in range(9):
        assert dot(cert.vectors[0].vector, jac.column(c)) == gq(0)


def test_nullspace_counts_match():
    pool = [gq(0), gq(1), gq(0, 1)]
    for n in range(1, 5):
        for spec in enumerate_jordan_specs(n, pool):
            cert = nullspace_basis(spec)
            assert len(cert.vectors) == n - min_poly_degree(spec)


def test_verify_annihilation_detects_perturbation():
    spec = JordanSpec.of({0: [1, 1]})
    cert = nullspace_basis(spec)
    v = cert.vectors[0]
    bumped = NullspaceCertificate((
        NullVector(v.eigenvalue, v.order, (v.vector[0] + gq(1),) + v.vector[1:]),
    ))
    assert not verify_annihilation(bumped, SquareMatrix.zeros(2))


def test_verify_annihilation_requires_exact():
    cert = nullspace_basis(JordanSpec.of({0: [1, 1]}))
    with pytest.raises(ValueError):
        verify_annihilation(cert, SquareMatrix.zeros(2).to_float())


def test_nullspace_json_round_trip():
    cert = nullspace_basis(JordanSpec.of({0: [1, 2], 1: [1, 1]}))
    assert NullspaceCertificate.from_json(cert.to_json()) == cert


def test_divided_difference_order_zero():
    lam = gq(3, 1)
    assert divided_difference([lam], {lam: (gq(7),)}) == gq(7)


def test_divided_difference_two_nodes():
    # f(t) = t^2 over nodes 0, 1
    data = {gq(0): (gq(0),), gq(1): (gq(1),)}
    assert divided_difference([gq(0), gq(1)], data) == gq(1)


def test_divided_difference_confluent_equals_derivative():
    # f[lam, lam] = f'(lam) for f = t^2 at lam = 3
    assert divided_difference([gq(3), gq(3)], {gq(3): (gq(9), gq(6))}) == gq(6)


def test_divided_difference_confluent_limit_oracle():
    # the confluent value is the limit of distinct-node differences
    lam = 3.0
    confluent = divided_difference([lam + 0j, lam + 0j], {lam + 0j: (9.0 + 0j, 6.0 + 0j)})
    errors = []
    for eps in (1e-2, 1e-3, 1e-4):
        nodes = [complex(lam), complex(lam + eps)]
        data = {x: (x * x,) for x in nodes}
        errors.append(abs(divided_difference(nodes, data) - confluent))
    assert errors[0] > errors[1] > errors[2]
    assert errors[0] / errors[1] == pytest.approx(10.0, rel=0.05)


def test_divided_difference_symmetric_in_distinct_nodes():
    rng = random.Random(19)
    base = [random_gaussian_rational(rng, 3) for _ in range(4)]
    while len({(x.re, x.im) for x in base}) < 4:
        base = [random_gaussian_rational(rng, 3) for _ in range(4)]
    data = {x: (x ** 3 + gq(2) * x,) for x in base}
    reference = divided_difference(base, data)
    for _ in range(5):
        shuffled = base[:]
        rng.shuffle(shuffled)
        assert divided_difference(shuffled, data) == reference


def test_divided_difference_missing_derivative_data():
    with pytest.raises(ValueError, match="missing derivative"):
        divided_difference([gq(1), gq(1)], {gq(1): (gq(1),)})


def test_divided_difference_non_contiguous_repeats():
    data = {gq(0): (gq(0), gq(0)), gq(1): (gq(1),)}
    with pytest.raises(ValueError, match="contiguous"):
        divided_difference([gq(0), gq(1), gq(0)], data)


def test_genocchi_order_zero_exact():
    report = genocchi_hermite_check(3, 0, 0.7, (1e-2, 1e-3))
    assert report.passed
    assert all(e <= report.floor for e in report.errors)


def test_genocchi_degree_one_exact():
    # n = 2: every component is affine, so the difference quotient is exact
    report = genocchi_hermite_check(2, 1, 0.0, (1e-1, 1e-2, 1e-3))
    assert report.passed
    assert all(e <= report.floor for e in report.errors)


def test_genocchi_first_order_convergence():
    report = genocchi_hermite_check(4, 2, 1.0, (1e-2, 1e-3, 1e-4))
    assert report.passed
    assert report.errors[0] / report.errors[1] == pytest.approx(10.0, rel=0.15)


def test_genocchi_rejects_bad_order():
    with pytest.raises(ValueError):
        genocchi_hermite_check(3, 3, 0.0, (1e-2,))


def test_vandermonde_single_confluent_cluster():
    result = confluent_vandermonde_det([(gq(5, 2), 2)])
    assert result.det_abs_squared == 1
    assert result.matches
    assert result.closed_form_abs == 1.0


def test_vandermonde_two_simple_nodes():
    result = confluent_vandermonde_det([(gq(0), 1), (gq(1), 1)])
    assert result.determinant == gq(1)
    assert result.matches
    assert result.sign == 1


def test_vandermonde_mixed_cluster():
    result = confluent_vandermonde_det([(gq(0), 2), (gq(1), 1)])
    assert result.determinant == gq(-1)
    assert result.matches
    assert result.sign == -1


def test_vandermonde_direct_determinant_oracle():
    # the comparison determinant agrees with a cofactor-expansion determinant
    from symrank.matpoly import monomial_vector
    clusters = [(gq(0), 2), (gq(1), 2), (gq(0, 1), 1)]
    n = 5
    columns = []
    for lam, mult in clusters:
        for d in range(mult):
            columns.append(monomial_vector(n, d, lam))
    rows = [[columns[c][r] for c in range(n)] for r in range(n)]
    direct = laplace_det(rows)
    result = confluent_vandermonde_det(clusters)
    assert result.determinant == direct
    assert result.matches


def test_vandermonde_closed_form_value():
    # factorials 0!1!2! = 2, |1-0|^(3*2) = 1 -> squared closed form 4
    result = confluent_vandermonde_det([(gq(0), 3), (gq(1), 2)])
    assert result.closed_abs_squared == Fraction(4)
    assert result.matches


def test_vandermonde_rejects_repeats():
    with pytest.raises(ValueError):
        confluent_vandermonde_det([(gq(1), 2), (gq(1), 1)])


def test_tangent_construction_t_squared():
    cert = tangent_construction(FrobeniusSpec((Polynomial.make([0, 0, 1]),)))
    assert cert.images == ((gq(0), gq(1)), (gq(-1), gq(0)))
    assert cert.pivots == (2, 1)
    assert tangent_ok(cert)


def test_tangent_construction_t_cubed():
    cert = tangent_construction(FrobeniusSpec((Polynomial.make([0, 0, 0, 1]),)))
    assert cert.images == (
        (gq(0), gq(0), gq(-1)),
        (gq(0), gq(1), gq(0)),
        (gq(-1), gq(0), gq(0)),
    )
    assert cert.pivots == (3, 2, 1)
    assert tangent_ok(cert)


def test_tangent_images_match_symbolic_route():
    # images coincide with explicit directional derivatives of the built matrix
    spec = JordanSpec.of({0: [1, 2], 1: [1]})
    fspec = jordan_to_frobenius(spec)
    B = build_frobenius(fspec)
    cert = tangent_construction(fspec)
    for i, image in zip(cert.directions, cert.images):
        assert image == directional_derivative(B, tangent_direction(fspec, i))
    assert rank_exact(cert.images) == fspec.min_degree


def test_tangent_rank_property():
    pool = [gq(0), gq(1), gq(-1)]
    for n in range(1, 5):
        for spec in enumerate_jordan_specs(n, pool):
            fspec = jordan_to_frobenius(spec)
            cert = tangent_construction(fspec)
            assert len(cert.images) == fspec.min_degree
            assert tangent_ok(cert)


def test_tangent_direction_range():
    fspec = FrobeniusSpec((Polynomial.make([0, 0, 1]),))
    with pytest.raises(ValueError):
        tangent_direction(fspec, 0)
    with pytest.raises(ValueError):
        tangent_direction(fspec, 3)


def test_sigma_linearity_t_squared_coefficients():
    # direct check: sigma_1(B + H(e_2)) - sigma_1(B) = -1, untouched by e_1
    fspec = FrobeniusSpec((Polynomial.make([0, 0, 1]),))
    B = build_frobenius(fspec)
    base = symmetrize(B)
    bumped = SquareMatrix.from_rows([[0, 1], [0, -1]])
    assert symmetrize(bumped)[0] - base[0] == gq(-1)
    assert sigma_linearity_check(fspec, trials=4, seed=1)


def test_sigma_linearity_zero_and_doubling():
    fspec = jordan_to_frobenius(JordanSpec.of({0: [1, 2], 2: [2]}))
    B = build_frobenius(fspec)
    base = symmetrize(B)
    m = fspec.min_degree
    n = fspec.n
    rng = random.Random(23)
    h = [random_gaussian_rational(rng, 3) for _ in range(m)]
    rows = [list(r) for r in B.entries]
    for j, hj in enumerate(h):
        rows[n - 1][n - m + j] = rows[n - 1][n - m + j] - hj
    single = tuple(a - b for a, b in zip(symmetrize(SquareMatrix.from_rows(rows, EXACT)), base))
    rows = [list(r) for r in B.entries]
    for j, hj in enumerate(h):
        rows[n - 1][n - m + j] = rows[n - 1][n - m + j] - (hj + hj)
    double = tuple(a - b for a, b in zip(symmetrize(SquareMatrix.from_rows(rows, EXACT)), base))
    assert double == tuple(x + x for x in single)
    # h = 0 leaves every coefficient unchanged
    zero_h = tuple(gq(0) for _ in range(m))
    rows = [list(r) for r in B.entries]
    for j, hj in enumerate(zero_h):
        rows[n - 1][n - m + j] = rows[n - 1][n - m + j] - hj
    assert symmetrize(SquareMatrix.from_rows(rows, EXACT)) == base
    assert sigma_linearity_check(fspec, trials=4, seed=9)


def test_order_of_vanishing_scalar_pair():
    spec = JordanSpec.of({0: [1, 1]})
    B = build_jordan(spec)
    M = SquareMatrix.from_rows([[2, 1], [1, 3]])  # det 5, nonzero
    report = order_of_vanishing(spec, linear_curve(B, M), gq(0), 0)
    assert report.observed_order == 2
    assert report.required_order == 2
    assert report.passed
    # singular direction pushes the order to infinity
    singular = SquareMatrix.from_rows([[1, 1], [1, 1]])
    report = order_of_vanishing(spec, linear_curve(B, singular), gq(0), 0)
    assert report.observed_order is None
    assert report.passed


def test_order_of_vanishing_non_derogatory():
    rng = random.Random(29)
    spec = JordanSpec.of({1: [3]})
    B = build_jordan(spec)
    M = SquareMatrix.from_rows(
        [[random_gaussian_rational(rng, 3) for _ in range(3)] for _ in range(3)], EXACT)
    for k in range(3):
        report = order_of_vanishing(spec, linear_curve(B, M), gq(1), k)
        assert report.required_order == 1
        assert report.passed


def test_order_of_vanishing_constant_curve():
    spec = JordanSpec.of({0: [1, 2]})
    B = build_jordan(spec)
    curve = MatrixPolynomial((B,))
    for k in range(3):
        report = order_of_vanishing(spec, curve, gq(0), k)
        assert report.observed_order is None
        assert report.passed


def test_order_of_vanishing_quadratic_curve():
    rng = random.Random(37)
    spec = JordanSpec.of({0: [2, 2]})
    B = build_jordan(spec)
    mats = [
        SquareMatrix.from_rows(
            [[random_gaussian_rational(rng, 2) for _ in range(4)] for _ in range(4)], EXACT)
        for _ in range(2)
    ]
    curve = MatrixPolynomial((B, mats[0], mats[1]))
    for k in range(4):
        assert order_of_vanishing(spec, curve, gq(0), k).passed


def test_order_of_vanishing_rejects_mismatched_base():
    spec = JordanSpec.of({0: [1, 1]})
    wrong = SquareMatrix.identity(2)
    with pytest.raises(ValueError, match="base mismatch"):
        order_of_vanishing(spec, MatrixPolynomial((wrong,)), gq(0), 0)


def test_order_of_vanishing_rejects_bad_order():
    spec = JordanSpec.of({0: [1, 1]})
    curve = MatrixPolynomial((build_jordan(spec),))
    with pytest.raises(ValueError):
        order_of_vanishing(spec, curve, gq(0), 2)


def test_curve_json_round_trip():
    spec = JordanSpec.of({0: [2]})
    B = build_jordan(spec)
    curve = linear_curve(B, SquareMatrix.identity(2))
    assert MatrixPolynomial.from_json(curve.to_json()) == curve


def test_certificate_counts_bracket_rank():
    # the two certificates together pin the rank: (n - m) + m = n vectors
    pool = [gq(0), gq(1)]
    for n in range(1, 5):
        for spec in enumerate_jordan_specs(n, pool):
            m = min_poly_degree(spec)
            null_cert = nullspace_basis(spec)
            tan_cert = tangent_construction(jordan_to_frobenius(spec))
            assert len(null_cert.vectors) + len(tan_cert.images) == spec.n
            if null_cert.vectors:
                assert rank_exact([v.vector for v in null_cert.vectors]) == spec.n - m
