import json

import pytest

from einfty_bp import bp_tower as tower
from einfty_bp.cobar import (
    CobarElement,
    alpha_class,
    cobar_element,
    format_cobar,
    is_cocycle,
    is_nonzero_class,
    u_class,
)
from einfty_bp.dual_steenrod import bp_comodule, tower_comodule
from einfty_bp.dyer_lashof import apply_to_ext1_class
from einfty_bp.graded_algebra import PoincareSeries
from einfty_bp.verify import partition_series


def test_init():
    s = tower.init(3)
    assert s.n == 0 and s.degrees == []
    assert format_cobar(s.alphas[1]) == "zeta_1|1"
    assert s.alphas[1].degree == 4
    assert s.rational == PoincareSeries.one(40)
    assert format_cobar(tower.init(2).alphas[1]) == "zeta_1^2|1"


def test_first_step_at_three():
    s = tower.step(tower.init(3))
    assert s.ok
    M = s.comodule
    A = M.steenrod
    expected = cobar_element(M, [A.zeta(1)], M.gen("z_1") ** 3) + cobar_element(M, [A.zeta(2)], M.algebra.one())
    assert s.alphas[2] == expected


@pytest.mark.parametrize("p,stages", [(3, 3), (5, 2), (2, 4), (7, 1)])
def test_recursion_closes(p, stages):
    s = tower.run(p, stages)
    assert s.ok, [c for c in s.checks if not c["ok"]]
    assert s.degrees == [2 * (p**r - 1) for r in range(1, stages + 1)]
    for n in range(1, stages + 1):
        assert is_cocycle(s.us[n]) and is_cocycle(s.alphas[n + 1])


def test_power_operation_on_u_classes_by_hand():
    # beta Q^3 on taubar_0|z_1 + taubar_1|1 at p = 3
    M = tower_comodule(3, 2)
    got = apply_to_ext1_class((1, 3), u_class(M, 1))
    assert got == alpha_class(M, 2)
    # the p = 2 analogue with Q^3 on zeta_1|z_1 + zeta_2|1
    M = tower_comodule(2, 2)
    assert apply_to_ext1_class((0, 3), u_class(M, 1)) == alpha_class(M, 2)


def test_power_operation_choice():
    assert tower.power_operation(3, 2) == (1, 9)
    assert tower.power_operation(2, 3) == (0, 15)


def test_operation_below_instability_kills_the_class():
    M = tower_comodule(3, 1)
    assert apply_to_ext1_class((0, 1), u_class(M, 1)) == 0


def test_corrupted_alpha_fails_a_check():
    s = tower.init(3)
    s.alphas[1] = s.alphas[1] + s.alphas[1]
    s = tower.step(s)
    assert not s.ok
    assert [c["check"] for c in s.checks if not c["ok"]] == ["d(-z_n) = alpha_[n]"]


def test_wrong_operation_raises_mismatch(monkeypatch):
    # Q^3 without the Bockstein sends u_1 to a taubar class, not alpha_[2]
    monkeypatch.setattr(tower, "power_operation", lambda p, n: (0, p**n))
    with pytest.raises(tower.RecursionMismatch, match="got - expected"):
        tower.step(tower.init(3))


def test_rational_series():
    s = tower.run(3, 2)
    want = PoincareSeries.product([PoincareSeries.polynomial(4, 40), PoincareSeries.polynomial(16, 40)], 40)
    assert s.rational == want
    assert list(want.coefficients) == partition_series([4, 16], 40)


def test_torsion_free_target_series():
    assert tower.torsion_free_target_series(3, 4).coefficients == (1, 0, 0, 0, 1)
    assert tower.torsion_free_target_series(2, 2).coefficients == (1, 0, 1)
    assert tower.torsion_free_target_series(3, 0).coefficients == (1,)
    for p in (2, 3, 5, 7):
        gens = [2 * (p**k - 1) for k in range(1, 7) if 2 * (p**k - 1) <= 40]
        assert list(tower.torsion_free_target_series(p, 40).coefficients) == partition_series(gens, 40)


def test_arithmetic_printed_values():
    odd = tower.power_op_arithmetic(3, 1)
    assert odd.ok
    assert odd.value("floor") == 0
    assert odd.value("source degree") == 4
    assert odd.value("target degree") == 15
    two = tower.power_op_arithmetic(2, 1)
    assert two.ok
    assert two.value("source degree") == 2
    assert two.value("target degree") == 5
    assert two.value("n mod 2 (n = -2 mod 2)") == 0
    assert two.value("indeterminacy trivial") is True


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_arithmetic_degrees_for_all_stages(p):
    for r in range(1, 5):
        rep = tower.power_op_arithmetic(p, r)
        assert rep.ok
        assert rep.value("source degree") == 2 * (p**r - 1)
        if p != 2:
            assert rep.value("target degree") == 2 * (p ** (r + 1) - 1) - 1
        else:
            assert rep.value("target degree") == 2 * (2**r - 1) + 2 ** (r + 1) - 1


def test_bp_comparison_odd():
    s = tower.run(3, 2)
    rep = tower.bp_comparison(s)
    assert rep.ok, rep.items
    M = bp_comodule(3, 4)
    A = M.steenrod
    x = cobar_element(M, [A.tau(0)], M.gen("t_1")) + cobar_element(M, [A.tau(1)], M.algebra.one())
    assert tower.bp_image_class(M, 1) == x
    assert is_nonzero_class(x)


def test_bp_comparison_two():
    rep = tower.bp_comparison(tower.run(2, 3))
    assert rep.ok, rep.items
    M = bp_comodule(2, 2)
    assert format_cobar(tower.bp_image_class(M, 1)) == "zeta_1|t_1 + zeta_2|1"


def test_bp_comparison_truncation_note():
    rep = tower.bp_comparison(tower.run(3, 3), N=20)
    assert rep.ok
    assert rep.notes and "truncated" in rep.notes[0]


def test_generation_chain():
    for p in (2, 3, 5):
        for s in (2, 3):
            I, x = tower.generation_chain(p, s)
            assert x == bp_comodule(p, 2 * (p**s - 1)).gen(f"t_{s}")


def test_variants_at_two():
    out = tower.variant_comparison(3)
    for row in out["square"]["stages"]:
        assert row["u cocycle"] and row["d(-z) = sum zeta_s^2 z^(2^s)"]
    for row in out["plain"]["stages"]:
        assert not row["u homogeneous"] and row["d(-z) = sum zeta_s z^(2^s)"]
    assert out["square"]["generator solve matches"] and out["plain"]["generator solve matches"]


def test_state_json():
    data = json.loads(json.dumps(tower.run(3, 2).to_json()))
    assert data["generator_degrees"] == [4, 16]
    assert data["caveat"]
    M = tower_comodule(3, 2)
    alpha = CobarElement.from_json(data["alpha"]["3"], M)
    assert alpha == alpha_class(M, 3)
