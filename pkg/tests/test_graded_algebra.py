from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from einfty_bp.graded_algebra import (
    CoefficientField,
    Element,
    FreeCommAlgebra,
    GeneratorSpec,
    PoincareSeries,
    binomial_mod,
    divided_power_normal_form,
    make_algebra,
    multiply,
    poincare_series,
    tensor,
)

F = CoefficientField.prime
Q = CoefficientField.rationals()


def dp(p, degree=2, name="x"):
    return make_algebra([GeneratorSpec(name, degree, "divided-power")], F(p))


@given(st.integers(0, 400), st.integers(0, 400), st.sampled_from([2, 3, 5, 7]))
def test_lucas_matches_integer_binomial(n, k, p):
    assert binomial_mod(n, k, p) == (comb(n, k) % p if k <= n else 0)


def test_rational_exterior_basis():
    A = make_algebra([GeneratorSpec("x", 5, "exterior")], Q)
    assert [len(A.basis(d)) for d in range(11)] == [1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0]


def test_empty_algebra_is_the_unit():
    A = make_algebra([], F(3))
    assert A.basis(0) == [()]
    assert poincare_series(A, 6).coefficients == (1, 0, 0, 0, 0, 0, 0)


def test_divided_power_tower_at_three():
    A = dp(3)
    assert A.internal_generators(50) == ["gamma1(x)", "gamma3(x)", "gamma9(x)"]
    g = A.gen("gamma3(x)")
    assert g**3 == 0 and g**2 != 0


def test_construction_errors():
    with pytest.raises(ValueError):
        make_algebra([GeneratorSpec("x", 2), GeneratorSpec("x", 4)], F(3))
    with pytest.raises(ValueError):
        make_algebra([GeneratorSpec("x", 2, "exterior")], F(3))
    with pytest.raises(ValueError):
        make_algebra([GeneratorSpec("x", 2, "divided-power")], Q)
    with pytest.raises(ValueError):
        CoefficientField(11)


def test_gamma_products():
    A = dp(3)
    assert multiply(A.gamma("x", 1), A.gamma("x", 2)) == 0
    for p in (2, 3, 5):
        A = dp(p)
        expected = (comb(4, 2) % p) * A.gamma("x", 4)
        assert A.gamma("x", 2) * A.gamma("x", 2) == expected
    assert dp(5).gamma("x", 2) ** 2 == dp(5).gamma("x", 4)


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_gamma_rule_everywhere(p):
    A = dp(p)
    for r in range(1, 12):
        for s in range(1, 12):
            assert A.gamma("x", r) * A.gamma("x", s) == binomial_mod(r + s, r, p) * A.gamma("x", r + s)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_gamma_pth_power_vanishes(p):
    A = dp(p)
    for r in range(1, 21):
        assert A.gamma("x", r) ** p == 0


def test_exterior_square_vanishes():
    A = make_algebra([GeneratorSpec("x", 3, "exterior")], F(3))
    x = A.gen("x")
    assert x * x == 0


def test_koszul_sign():
    A = make_algebra([GeneratorSpec("x", 1, "exterior"), GeneratorSpec("y", 3, "exterior")], F(3))
    x, y = A.gen("x"), A.gen("y")
    assert x * y == -(y * x)
    assert x * y != 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_normal_form_round_trip(p):
    A = dp(p)
    for r in range(1, 60):
        c, factors = divided_power_normal_form(r, p)
        product = A.one()
        for q, e in factors:
            product = product * A.gen(f"gamma{q}(x)") ** e
        assert A.gamma("x", r).scale(pow(c, -1, p)) == product


def test_normal_form_small_cases():
    for p in (2, 3, 5):
        assert divided_power_normal_form(1, p) == (1, ((1, 1),))
        assert divided_power_normal_form(p, p) == (1, ((p, 1),))
    # gamma_1 gamma_3 = C(4,1) gamma_4 = gamma_4 at p = 3
    assert divided_power_normal_form(4, 3) == (1, ((1, 1), (3, 1)))
    # gamma_1 gamma_5 = 6 gamma_6 = gamma_6 at p = 5
    assert divided_power_normal_form(6, 5) == (1, ((1, 1), (5, 1)))


def test_polynomial_series():
    A = make_algebra([GeneratorSpec("x", 4)], Q)
    assert poincare_series(A, 12).coefficients == (1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 1)


def test_divided_power_series_by_enumeration():
    A = dp(2)
    # gamma_1, gamma_2, gamma_4 in degrees 2, 4, 8: one class in each even degree
    series = poincare_series(A, 8).coefficients
    assert series == tuple(len(A.basis(d)) for d in range(9))
    assert series == (1, 0, 1, 0, 1, 0, 1, 0, 1)


def test_degree_zero_generator_refused():
    A = make_algebra([GeneratorSpec("x", 0)], F(2))
    with pytest.raises(ValueError):
        poincare_series(A, 4)


def test_series_of_tensor_is_product():
    A = make_algebra([GeneratorSpec("x", 2), GeneratorSpec("e", 3, "exterior")], F(3))
    B = dp(3, 4, "y")
    N = 30
    assert poincare_series(tensor(A, B), N) == poincare_series(A, N) * poincare_series(B, N)


def _random_element(A, data, degree):
    basis = A.basis(degree)
    if not basis:
        return A.zero()
    coeffs = data.draw(st.lists(st.integers(0, 6), min_size=len(basis), max_size=len(basis)))
    return Element(A, dict(zip(basis, coeffs)))


@given(st.data(), st.sampled_from([2, 3, 5, 7]))
def test_associative_and_graded_commutative(data, p):
    gens = [
        GeneratorSpec("a", 1, "exterior"),
        GeneratorSpec("b", 2),
        GeneratorSpec("c", 3, "exterior"),
        GeneratorSpec("g", 4, "divided-power"),
        GeneratorSpec("t", 6, "truncated"),
    ]
    A = make_algebra(gens, F(p))
    degs = [data.draw(st.integers(0, 12)) for _ in range(3)]
    x, y, z = (_random_element(A, data, d) for d in degs)
    assert (x * y) * z == x * (y * z)
    sign = -1 if degs[0] * degs[1] % 2 and p != 2 else 1
    assert x * y == (y * x).scale(sign)


def test_rational_coefficients_are_exact():
    A = make_algebra([GeneratorSpec("x", 2)], Q)
    x = A.gen("x")
    assert (x.scale(Fraction(1, 3)) * x.scale(3)).coefficient((("x", 2),)) == 1


def test_json_round_trip():
    A = make_algebra([GeneratorSpec("x", 3, "exterior"), GeneratorSpec("g", 2, "divided-power")], F(3))
    data = A.to_json(10)
    assert FreeCommAlgebra.from_json(data) == A
    assert data["series"] == list(poincare_series(A, 10).coefficients)


def test_series_helpers():
    assert PoincareSeries.exterior(3, 6).coefficients == (1, 0, 0, 1, 0, 0, 0)
    assert PoincareSeries.truncated(2, 3, 6).coefficients == (1, 0, 1, 0, 1, 0, 0)
    assert PoincareSeries.one(3).truncate(1).coefficients == (1, 0)
