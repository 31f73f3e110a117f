import json

import pytest

from einfty_bp.dyer_lashof import DLSequence
from einfty_bp.free_einfty_homology import (
    GeneratorReport,
    cone_generators,
    induced_map,
    px_generators,
    rational_cone_series,
    rational_px,
)
from einfty_bp.graded_algebra import PoincareSeries, poincare_series
from einfty_bp.verify import brute_force_px_counts, series_from_generators


def counts(report):
    out = {}
    for e in report.entries:
        out[e.degree] = out.get(e.degree, 0) + 1
    return out


@pytest.mark.parametrize("p,b,N", [(2, 1, 18), (2, 2, 18), (2, 3, 18), (3, 5, 30), (3, 3, 40), (5, 3, 60)])
def test_counts_match_brute_force(p, b, N):
    rep = px_generators(p, [("x", b)], N)
    assert counts(rep) == brute_force_px_counts(p, b, N)
    assert list(rep.series.coefficients) == series_from_generators(counts(rep), N, p)


def test_series_matches_monomial_enumeration():
    rep = px_generators(3, [("x", 5)], 30)
    A = rep.algebra
    assert rep.series == poincare_series(A, 30)
    assert list(rep.series.coefficients) == [len(A.basis(d)) for d in range(31)]


def test_excess_condition_and_admissibility_hold():
    for p, b in [(2, 3), (3, 5)]:
        rep = px_generators(p, [("x", b)], 40)
        for e in rep.entries:
            assert e.sequence.is_admissible()
            eps = e.sequence.ops[0][0] if e.sequence.ops else 0
            assert e.sequence.excess + eps > b


def test_unit_in_degree_zero():
    for p in (2, 3, 5, 7):
        assert px_generators(p, [("x", 3)], 20).series[0] == 1


def test_odd_prime_parities():
    rep = px_generators(3, [("x", 3)], 30)
    for e in rep.entries:
        assert e.kind == ("exterior" if e.degree % 2 else "polynomial")


def test_multiple_base_cells():
    one = px_generators(2, [("x", 2)], 20)
    two = px_generators(2, [("x", 2), ("y", 3)], 20)
    other = px_generators(2, [("y", 3)], 20)
    assert two.series == one.series * other.series


def test_base_degree_must_be_positive():
    with pytest.raises(ValueError):
        px_generators(2, [("x", 0)], 10)


def test_rational():
    assert rational_px("odd", 5, 20).series == PoincareSeries.exterior(5, 20)
    assert rational_px("even", 4, 20).series == PoincareSeries.polynomial(4, 20)
    assert rational_px("odd", 5, 3).series == PoincareSeries.one(3)
    with pytest.raises(ValueError):
        rational_px("odd", 4, 10)


def test_cone_at_two_is_px_one_degree_up():
    for n in range(0, 4):
        cone = cone_generators(2, n, 24)
        px = px_generators(2, [("u", n + 1)], 24)
        assert [(e.name, e.degree) for e in cone.entries] == [(e.name, e.degree) for e in px.entries]


def test_cone_at_odd_prime():
    rep = cone_generators(3, 3, 30)
    assert rep.entries[0].name == "u" and rep.entries[0].degree == 4
    for e in rep.entries:
        eps = e.sequence.ops[0][0] if e.sequence.ops else 0
        assert e.sequence.excess + eps > 4
    assert cone_generators(3, 3, 3).entries == []
    with pytest.raises(ValueError):
        cone_generators(3, 4, 20)


def test_cone_side_condition_is_flagged():
    kept = cone_generators(3, 3, 40)
    dropped = cone_generators(3, 3, 40, literal_side_condition=True)
    assert set(kept.names()) - set(dropped.names()) == set(kept.flagged)
    if kept.flagged:
        assert kept.notes


def test_rational_cone_series():
    one = PoincareSeries.one(10)
    assert rational_cone_series("odd", 1, PoincareSeries((1,) * 11), 10) == PoincareSeries((1,) * 11) * PoincareSeries.polynomial(2, 10)
    assert rational_cone_series("odd", 1, one, 10) == PoincareSeries.polynomial(2, 10)
    assert rational_cone_series("even", 1, one, 10) == PoincareSeries.exterior(3, 10)
    assert rational_cone_series("odd", 1, one, 0) == PoincareSeries.one(0)


def test_induced_map_of_trivial_map_is_trivial():
    src = px_generators(3, [("x", 3)], 30)
    tgt = px_generators(3, [("y", 3)], 30)
    assert all(v == 0 for v in induced_map(src, tgt, {}).values())
    ident = induced_map(src, tgt, {"x": {"y": 1}})
    for e in src.entries:
        assert ident[e.name] == tgt.algebra.gen(e.name.replace("(x)", "(y)") if e.sequence.ops else "y")


def test_json_round_trip():
    rep = cone_generators(3, 3, 30, base_series=PoincareSeries.exterior(7, 30))
    back = GeneratorReport.from_json(json.loads(json.dumps(rep.to_json())))
    assert back.to_json() == rep.to_json()
    assert back.entries[1].sequence == rep.entries[1].sequence
    assert isinstance(back.entries[1].sequence, DLSequence)
