import itertools

from einfty_bp.graded_algebra import CoefficientField, FreeCommAlgebra, GeneratorSpec
from einfty_bp.verify import (
    CRITERIA,
    SuiteResult,
    brute_force_px_counts,
    partition_series,
    run_suites,
    series_from_generators,
    suite_table,
    timed,
)


def test_series_from_generators_counts_monomials():
    counts = {1: 1, 2: 2, 3: 1, 4: 1}
    for p in (2, 3):
        gens = []
        for d, c in counts.items():
            for i in range(c):
                kind = "exterior" if p != 2 and d % 2 else "polynomial"
                gens.append(GeneratorSpec(f"g{d}_{i}", d, kind))
        A = FreeCommAlgebra(gens, CoefficientField(p))
        assert series_from_generators(counts, 12, p) == [len(A.basis(d)) for d in range(13)]


def test_partition_series_by_listing():
    parts = [4, 16, 52]
    N = 60
    want = [0] * (N + 1)
    for combo in itertools.product(*(range(N // d + 1) for d in parts)):
        total = sum(k * d for k, d in zip(combo, parts))
        if total <= N:
            want[total] += 1
    assert partition_series(parts, N) == want


def test_brute_force_small_case():
    # p = 2, x_1: Q^2 x (3), Q^3 x (4), Q^4 x (5), Q^4 Q^2 x (7), Q^5 x (6), ...
    counts = brute_force_px_counts(2, 1, 6)
    assert counts == {1: 1, 3: 1, 4: 1, 5: 1, 6: 1}


def test_timed_catches_exceptions():
    def boom():
        raise RuntimeError("nope")

    r = timed("x", boom)
    assert not r.ok and "RuntimeError" in r.detail


def test_suite_result_lines():
    r = SuiteResult("demo", True, "fine", 2.0, 1.0)
    assert not r.passed and r.line().startswith("FAIL")
    assert SuiteResult("demo", True, "fine", 0.5).line(timing=False) == "PASS  demo  fine"
    assert "seconds" not in r.to_json()


def test_suite_table_sorted_and_complete():
    names = [n for n, _ in suite_table(3, 20)]
    assert names == sorted(names) and len(names) == len(set(names))
    assert {"d-squared", "massey", "recursion", "coalgebra"} <= set(names)


def test_suites_pass_at_small_cutoff():
    for p in (2, 3):
        results = run_suites(p, 16)
        assert all(r.passed for r in results), [r.line() for r in results if not r.passed]


def test_twelve_criteria():
    assert [c.number for c in CRITERIA] == list(range(1, 13))
