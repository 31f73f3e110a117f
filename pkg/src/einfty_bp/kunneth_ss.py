"""Kunneth spectral sequence for coning off a sphere in a free E-infinity algebra.

E^2 = H_*(E) (x) Tor over H_*(P S^d).  Each exterior generator y of
H_*(P S^d) contributes a divided-power tower Gamma[y] and each polynomial
generator an exterior class [y], both in homological degree 1, so [y] has
total degree |y| + 1.  At odd p the only differential is

    d^{p-1} gamma_{p^r}[y] = [beta Q^k y] gamma_{p^r - p}[y],  k = (|y| + 1)/2,

for r >= 1 (the unit is fixed to 1), extended as a derivation.  At p = 2
there are no differentials.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import linalg
from .dyer_lashof import DLSequence
from .free_einfty_homology import cone_generators, generator_name, px_generators
from .graded_algebra import (
    CoefficientField,
    Element,
    FreeCommAlgebra,
    GeneratorSpec,
    PoincareSeries,
)


@dataclass(frozen=True)
class PageGenerator:
    name: str
    sequence: DLSequence
    s: int
    t: int
    kind: str  # "divided-power", "exterior", or "truncated" after d^{p-1}

    @property
    def total_degree(self) -> int:
        return self.s + self.t

    def to_json(self) -> dict:
        return {"name": self.name, "s": self.s, "t": self.t, "kind": self.kind}


@dataclass
class SSPage:
    p: int
    attach_degree: int
    N: int
    page: object  # 2, p, or "inf"
    generators: list = field(default_factory=list)
    base_series: PoincareSeries | None = None
    homology: PoincareSeries | None = None
    partners: dict = field(default_factory=dict)

    @property
    def towers(self) -> list[PageGenerator]:
        return [g for g in self.generators if g.kind == "divided-power"]

    @property
    def exteriors(self) -> list[PageGenerator]:
        return [g for g in self.generators if g.kind == "exterior"]

    def algebra(self, N: int | None = None) -> FreeCommAlgebra:
        N = self.N + 1 if N is None else N
        gens = [GeneratorSpec(g.name, g.total_degree, g.kind) for g in self.generators if g.total_degree <= N]
        return FreeCommAlgebra(gens, CoefficientField(self.p))

    def presentation_series(self, N: int | None = None) -> PoincareSeries:
        """Series read off the generator list (truncated towers have height p)."""
        N = self.N if N is None else N
        factors = []
        for g in self.generators:
            d = g.total_degree
            if d > N:
                continue
            if g.kind == "exterior":
                factors.append(PoincareSeries.exterior(d, N))
            elif g.kind == "truncated":
                factors.append(PoincareSeries.truncated(d, self.p, N))
            else:
                factors.append(_divided_power_series(d, self.p, N))
        out = PoincareSeries.product(factors, N)
        if self.base_series is not None:
            out = out * self.base_series.truncate(N)
        return out

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "attach_degree": self.attach_degree,
            "N": self.N,
            "page": self.page,
            "generators": [g.to_json() for g in self.generators],
            "partners": dict(self.partners),
            "series": list((self.homology or self.presentation_series()).truncate(self.N).coefficients),
        }


def _divided_power_series(d: int, p: int, N: int) -> PoincareSeries:
    # Gamma(x) has one class in each degree k*d, like a polynomial algebra
    return PoincareSeries.polynomial(d, N)


def bracket(name: str) -> str:
    return f"[{name}]"


def build_e2(p: int, attach_degree: int, N: int, base_series: PoincareSeries | None = None) -> SSPage:
    """E^2 page for coning off S^d, total degrees <= N + 1 (one above the cutoff, for d)."""
    if p != 2 and attach_degree % 2 == 0:
        raise ValueError("odd p needs an odd attaching degree")
    page = SSPage(p, attach_degree, N, 2, base_series=base_series)
    if attach_degree < 1:
        raise ValueError("attaching degree must be >= 1")
    report = px_generators(p, [("x", attach_degree)], N)
    for e in report.entries:
        if p == 2 or e.kind == "polynomial":
            kind = "exterior"
        else:
            kind = "divided-power"
        page.generators.append(PageGenerator(bracket(e.name), e.sequence, 1, e.degree, kind))
    if p != 2:
        names = {g.name for g in page.generators}
        for g in page.towers:
            k = (g.t + 1) // 2
            target = DLSequence(p, ((1, k),) + g.sequence.ops)
            tname = bracket(generator_name(target, "x"))
            if g.total_degree * p - 1 <= N + 1 and tname not in names:
                raise LookupError(f"target class {tname} not found among the exterior generators")
            page.partners[g.name] = tname
    return page


def differential_on_monomial(page: SSPage, A: FreeCommAlgebra, mono) -> Element:
    """d^{p-1} of one monomial, as a derivation with Koszul signs."""
    out = A.zero()
    prefix_sign = 1
    factors = list(mono)
    for idx, (name, e) in enumerate(factors):
        dg = _generator_differential(page, A, name)
        if dg is not None and dg.terms:
            before = A.make_monomial(dict(factors[:idx]))
            after = A.make_monomial(dict(factors[idx + 1 :]))
            rest = A.make_monomial({name: e - 1}) if e > 1 else ()
            term = A.monomial(before) * (A.monomial(rest) * dg) * A.monomial(after)
            out = out + term.scale(prefix_sign * e)
        if A.info(name).degree * e % 2:
            prefix_sign = -prefix_sign
    return out


def _generator_differential(page: SSPage, A: FreeCommAlgebra, name: str):
    if not name.startswith("gamma"):
        return None
    m = re.match(r"^gamma(\d+)\((.+)\)$", name)
    power, base = int(m.group(1)), m.group(2)
    if power == 1:
        return None
    partner = page.partners.get(base)
    if partner is None:
        return None
    if partner not in {g.name for g in A.generators}:
        return A.zero()
    return A.gen(partner) * A.gamma(base, power - page.p)


def apply_d_pminus1(page: SSPage) -> SSPage:
    """The E^p page: homology of E^2 under d^{p-1}, computed degreewise by linear algebra.

    The returned page also carries the expected presentation (towers
    truncated to height p, partner exterior classes removed); its series is
    checked against the linear algebra.
    """
    p = page.p
    N = page.N
    if p == 2:
        out = SSPage(p, page.attach_degree, N, "inf", list(page.generators), page.base_series)
        out.homology = out.presentation_series()
        return out
    A = page.algebra(N + 1)
    dims = []
    ranks = {}

    def rank_out_of(deg):
        if deg not in ranks:
            cols = [differential_on_monomial(page, A, m).terms for m in A.basis(deg)]
            ranks[deg] = linalg.sparse_rank(cols, p)
        return ranks[deg]

    for deg in range(N + 1):
        dim = len(A.basis(deg))
        dims.append(dim - rank_out_of(deg) - rank_out_of(deg + 1))
    homology = PoincareSeries(tuple(dims))
    if page.base_series is not None:
        homology = homology * page.base_series.truncate(N)
    killed = set(page.partners.values())
    gens = []
    for g in page.generators:
        if g.name in killed:
            continue
        if g.kind == "divided-power":
            gens.append(PageGenerator(g.name, g.sequence, g.s, g.t, "truncated"))
        else:
            gens.append(g)
    out = SSPage(p, page.attach_degree, N, p, gens, page.base_series, homology, dict(page.partners))
    return out


def einfty_series(page: SSPage, N: int | None = None) -> PoincareSeries:
    N = page.N if N is None else N
    if page.homology is not None:
        return page.homology.truncate(N)
    if page.page != 2 or page.p == 2:
        return page.presentation_series(N)
    raise ValueError("run apply_d_pminus1 first")


def d_squared_zero(page: SSPage, N: int | None = None) -> bool:
    N = page.N + 1 if N is None else N
    A = page.algebra(N)
    for deg in range(N + 1):
        for m in A.basis(deg):
            dm = differential_on_monomial(page, A, m)
            total = A.zero()
            for mm, c in dm.terms.items():
                total = total + differential_on_monomial(page, A, mm).scale(c)
            if total.terms:
                return False
    return True


@dataclass
class ComparisonReport:
    p: int
    attach_degree: int
    N: int
    einfty: PoincareSeries
    cone: PoincareSeries
    first_mismatch: int | None
    pairings: list

    @property
    def ok(self) -> bool:
        return self.first_mismatch is None

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "attach_degree": self.attach_degree,
            "N": self.N,
            "einfty": list(self.einfty.coefficients),
            "cone": list(self.cone.coefficients),
            "equal": self.ok,
            "first_mismatch": self.first_mismatch,
            "pairings": self.pairings,
        }


def compare_with_cone_answer(p: int, attach_degree: int, N: int) -> ComparisonReport:
    """E^infinity series versus the closed-form generator answer, degree by degree."""
    page = build_e2(p, attach_degree, N)
    final = apply_d_pminus1(page)
    lhs = einfty_series(final, N)
    rhs = cone_generators(p, attach_degree, N).series
    mismatch = next((d for d in range(N + 1) if lhs[d] != rhs[d]), None)
    pairings = []
    for g in page.generators:
        if g.kind == "divided-power" or p == 2:
            k = (g.t + 1) // 2 if p != 2 else g.t + 1
            power = DLSequence(p, ((0, k),) + g.sequence.ops)
            entry = {
                "class": g.name,
                "generator": generator_name(g.sequence, "u"),
                "p-th power": generator_name(power, "u"),
            }
            if p != 2:
                entry["killed partner"] = page.partners[g.name]
            pairings.append(entry)
    return ComparisonReport(p, attach_degree, N, lhs, rhs, mismatch, pairings)


def rational_pages(parity: str, n: int, base_series: PoincareSeries, N: int) -> PoincareSeries:
    """Rational Kunneth E^2 = E^infinity for coning off S^{2n-1} ("odd") or S^{2n} ("even").

    Tor over Lambda(x_{2n-1}) is a divided-power algebra on a class of degree
    2n; Tor over Q[x_{2n}] is exterior on a class of degree 2n + 1.  Both
    pages collapse for degree reasons.
    """
    if parity == "odd":
        A = FreeCommAlgebra([GeneratorSpec("w", 2 * n, "polynomial")], CoefficientField(0))
    elif parity == "even":
        A = FreeCommAlgebra([GeneratorSpec("z", 2 * n + 1, "exterior")], CoefficientField(0))
    else:
        raise ValueError("parity must be 'odd' or 'even'")
    return A.poincare_series(N) * base_series.truncate(N)
