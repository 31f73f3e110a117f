import json

import pytest
from hypothesis import given, strategies as st

from einfty_bp.dual_steenrod import (
    UNIT,
    Comodule,
    DualSteenrodAlgebra,
    MilnorMonomial,
    TensorElement,
    bp_comodule,
    check_coalgebra,
    conjugate_consistency_check,
    parse_steenrod,
    primitives_in_degree,
    solve_generator_sequence,
    steenrod_comodule,
    tower_comodule,
    trivial_comodule,
)
from einfty_bp.graded_algebra import Element


def outer(factors, x, y):
    """x ⊗ y for two linear combinations."""
    terms = {}
    for a, c in x.terms.items():
        for b, d in y.terms.items():
            terms[(a, b)] = terms.get((a, b), 0) + c * d
    return TensorElement(factors, terms)


def test_zeta_1_is_primitive():
    for p in (2, 3, 5, 7):
        A = DualSteenrodAlgebra(p)
        z = A.zeta(1)
        assert A.coproduct(z) == outer((A, A), z, A.one()) + outer((A, A), A.one(), z)


def test_coproduct_zeta_2_at_three():
    A = DualSteenrodAlgebra(3)
    pairs = [(A.zeta(2), A.one()), (A.zeta(1), A.zeta(1) ** 3), (A.one(), A.zeta(2))]
    expected = sum((outer((A, A), a, b) for a, b in pairs[1:]), outer((A, A), *pairs[0]))
    assert A.coproduct(A.zeta(2)) == expected


def test_coproduct_taubar_1_at_three():
    A = DualSteenrodAlgebra(3)
    pairs = [(A.one(), A.tau(1)), (A.tau(0), A.zeta(1)), (A.tau(1), A.one())]
    expected = sum((outer((A, A), a, b) for a, b in pairs[1:]), outer((A, A), *pairs[0]))
    assert A.coproduct(A.tau(1)) == expected


def test_degrees():
    A = DualSteenrodAlgebra(3)
    assert A.zeta(2).degree == 16 and A.tau(1).degree == 5
    assert DualSteenrodAlgebra(2).zeta(3).degree == 7
    with pytest.raises(ValueError):
        DualSteenrodAlgebra(2).tau(0)


def test_taubar_exterior():
    A = DualSteenrodAlgebra(3)
    t0, t1 = A.tau(0), A.tau(1)
    assert t0 * t0 == 0
    assert t0 * t1 == -(t1 * t0)


@pytest.mark.parametrize("p,N", [(2, 20), (3, 30), (5, 50)])
def test_coalgebra_axioms(p, N):
    rep = check_coalgebra(DualSteenrodAlgebra(p), N)
    assert rep.ok, rep.failure
    assert rep.checked == sum(len(DualSteenrodAlgebra(p).basis(d)) for d in range(N + 1))


@pytest.mark.parametrize("p,N", [(2, 20), (3, 30)])
def test_vectorized_check_agrees_with_direct_check(p, N):
    M = steenrod_comodule(p)
    for d in range(N + 1):
        for m in M.basis(d):
            assert M.check_counit(m) and M.check_coassociativity(m)


def test_coalgebra_check_catches_a_corrupted_coproduct():
    # a stray zeta_1 (x) zeta_1^2 in psi(zeta_1^3) is not coassociative
    A = DualSteenrodAlgebra(3)
    z1, z1sq, z1cube = (MilnorMonomial((), (e,)) for e in (1, 2, 3))
    psi = dict(A.coproduct_monomial(z1cube))
    psi[(z1, z1sq)] = 1
    A._coproduct_cache[z1cube] = psi
    rep = check_coalgebra(A, 12)
    assert not rep.ok and "zeta_1^3" in rep.failure


def test_coaction_on_tower_generators():
    M = tower_comodule(3, 1)
    A = M.steenrod
    z = M.gen("z_1")
    assert M.coaction(z) == outer(M.factors, A.one(), z) + outer(M.factors, A.zeta(1), M.algebra.one())
    z3 = z**3
    assert M.coaction(z3) == outer(M.factors, A.one(), z3) + outer(M.factors, A.zeta(1) ** 3, M.algebra.one())
    assert M.coaction(z3) == M.coaction(z) ** 3


def test_coaction_on_bp_at_two():
    M = bp_comodule(2, 10)
    A = M.steenrod
    t = M.gen("t_1")
    assert M.coaction(t) == outer(M.factors, A.one(), t) + outer(M.factors, A.zeta(1) ** 2, M.algebra.one())


def test_missing_generator_in_table():
    M = tower_comodule(3, 2)
    table = dict(M.table)
    table.pop("z_2")
    with pytest.raises(KeyError):
        Comodule("broken", M.algebra, M.steenrod, table)


@pytest.mark.parametrize(
    "M",
    [bp_comodule(3, 60), bp_comodule(2, 30), tower_comodule(3, 3), tower_comodule(2, 4, "plain"), tower_comodule(2, 4)],
    ids=lambda M: f"{M.name}-p{M.p}",
)
def test_comodule_axioms(M):
    for d in range(41):
        for m in M.basis(d):
            assert M.check_counit(m)
            assert M.check_coassociativity(m)


@given(st.data())
def test_coaction_is_multiplicative(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    M = bp_comodule(p, 60)
    B = M.algebra

    def draw():
        d = data.draw(st.sampled_from([d for d in range(1, 41) if B.basis(d)]))
        basis = B.basis(d)
        coeffs = data.draw(st.lists(st.integers(1, p - 1 if p > 2 else 1), min_size=len(basis), max_size=len(basis)))
        return Element(B, dict(zip(basis, coeffs)))

    x, y = draw(), draw()
    assert M.coaction(x * y) == M.coaction(x) * M.coaction(y)


def test_conjugate_consistency():
    rep = conjugate_consistency_check(2, 31)
    assert rep.ok and rep.checked == [f"zeta_{n}" for n in range(1, 6)]
    rep = conjugate_consistency_check(3, 52)
    assert rep.ok
    assert {"zeta_1", "zeta_2", "taubar_0", "taubar_1", "taubar_2"} <= set(rep.checked)
    rep = conjugate_consistency_check(3, 0)
    assert rep.ok and rep.checked == []


@pytest.mark.parametrize("p,n", [(3, 3), (2, 4), (5, 2)])
def test_generator_solve_returns_zeta(p, n):
    A = DualSteenrodAlgebra(p)
    assert solve_generator_sequence(p, n) == [A.zeta(k) for k in range(1, n + 1)]


def test_square_generator_solve():
    A = DualSteenrodAlgebra(2)
    assert solve_generator_sequence(2, 3, square=True) == [A.zeta(k) ** 2 for k in range(1, 4)]


def test_generator_solution_satisfies_its_equation():
    p, n = 3, 3
    A = DualSteenrodAlgebra(p)
    s = solve_generator_sequence(p, n)
    for k in range(1, n + 1):
        rhs = outer((A, A), A.one(), s[k - 1])
        for j in range(1, k + 1):
            lower = A.one() if j == k else s[k - j - 1] ** (p**j)
            rhs = rhs + outer((A, A), A.zeta(j), lower)
        assert A.coproduct(s[k - 1]) == rhs


def test_primitives():
    assert primitives_in_degree(steenrod_comodule(3), 4) == []
    assert primitives_in_degree(steenrod_comodule(3), 0) == [DualSteenrodAlgebra(3).one()]
    M = trivial_comodule(3, [("x", 6)])
    assert primitives_in_degree(M, 6) == [M.gen("x")]
    for d in range(1, 30):
        assert primitives_in_degree(steenrod_comodule(3), d) == []


def test_parse_and_format():
    A = DualSteenrodAlgebra(3)
    x = parse_steenrod("taubar_0 zeta_1 + 2*zeta_2", A)
    assert x == A.tau(0) * A.zeta(1) + A.zeta(2).scale(2)
    assert repr(A.tau(1)) == "taubar_1"
    assert parse_steenrod("tau_1", A) == A.tau(1)
    with pytest.raises(ValueError):
        parse_steenrod("bogus_1", A)


def test_json_round_trips():
    m = MilnorMonomial((0, 2), (1, 0, 3))
    assert MilnorMonomial.from_json(json.loads(json.dumps(m.to_json()))) == m
    assert MilnorMonomial.from_json({"tau": [], "zeta": []}) == UNIT
    M = bp_comodule(3, 20)
    N = Comodule.from_json(json.loads(json.dumps(M.to_json())))
    assert N.table == M.table and N.algebra == M.algebra
