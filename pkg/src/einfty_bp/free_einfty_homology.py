"""Generators and Poincare series for free E-infinity algebras and single-cell attachments.

Mod p, the homology of the free algebra on classes x_j is free graded
commutative on Q^I x_j for admissible I with exc(I) + eps_1 > |x_j| (odd p)
or exc(I) > |x_j| (p = 2).  Attaching a cell along S^d adjoins a class u of
degree d + 1 and the same kind of generators Q^I u, over H_*(E), which is
carried only through its Poincare series.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .dyer_lashof import DLSequence, enumerate_admissible, excess
from .graded_algebra import CoefficientField, FreeCommAlgebra, GeneratorSpec, PoincareSeries


@dataclass(frozen=True)
class GeneratorEntry:
    sequence: DLSequence
    base: str
    degree: int
    kind: str

    @property
    def name(self) -> str:
        return generator_name(self.sequence, self.base)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "sequence": self.sequence.to_json(),
            "base": self.base,
            "degree": self.degree,
            "kind": self.kind,
        }


def generator_name(I: DLSequence, base: str) -> str:
    return f"{I.name()}({base})" if I.ops else base


@dataclass
class GeneratorReport:
    field: CoefficientField
    N: int
    base: list
    entries: list = field(default_factory=list)
    flagged: list = field(default_factory=list)
    base_series: PoincareSeries | None = None
    notes: list = field(default_factory=list)

    @property
    def algebra(self) -> FreeCommAlgebra:
        return FreeCommAlgebra([GeneratorSpec(e.name, e.degree, e.kind) for e in self.entries], self.field)

    @property
    def series(self) -> PoincareSeries:
        free = PoincareSeries.product([_series_of(e, self.N) for e in self.entries], self.N)
        if self.base_series is not None:
            free = free * self.base_series.truncate(self.N)
        return free

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def to_json(self) -> dict:
        return {
            "field": str(self.field),
            "N": self.N,
            "base": [list(b) for b in self.base],
            "generators": [e.to_json() for e in self.entries],
            "flagged": list(self.flagged),
            "base_series": None if self.base_series is None else list(self.base_series.coefficients),
            "series": list(self.series.coefficients),
            "notes": list(self.notes),
        }

    @classmethod
    def from_json(cls, data: dict) -> "GeneratorReport":
        fld = CoefficientField.parse(data["field"])
        p = fld.p
        entries = [
            GeneratorEntry(DLSequence.from_json(g["sequence"], p or 2), g["base"], g["degree"], g["kind"])
            for g in data["generators"]
        ]
        base_series = data.get("base_series")
        return cls(
            fld,
            data["N"],
            [tuple(b) for b in data["base"]],
            entries,
            list(data.get("flagged", [])),
            None if base_series is None else PoincareSeries(tuple(base_series)),
            list(data.get("notes", [])),
        )


def _series_of(e: GeneratorEntry, N: int) -> PoincareSeries:
    if e.kind == "exterior":
        return PoincareSeries.exterior(e.degree, N)
    return PoincareSeries.polynomial(e.degree, N)


def _kind(p: int, degree: int) -> str:
    return "exterior" if (p != 2 and degree % 2) else "polynomial"


def px_generators(p: int, base: list, N: int) -> GeneratorReport:
    """Generators Q^I x_j of H_*(PX; F_p) of degree <= N for X with cells ``base``."""
    report = GeneratorReport(CoefficientField(p), N, [tuple(b) for b in base])
    for name, d in base:
        if d < 1:
            raise ValueError("base degrees must be >= 1")
        for I in enumerate_admissible(p, d, N):
            deg = d + I.degree_shift
            report.entries.append(GeneratorEntry(I, name, deg, _kind(p, deg)))
    report.entries.sort(key=lambda e: (e.degree, e.name))
    return report


def rational_px(parity: str, m: int, N: int) -> GeneratorReport:
    """H_*(P S^m; Q): exterior on x_m for m odd, polynomial for m even."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if parity not in ("even", "odd") or (m % 2 == 0) != (parity == "even"):
        raise ValueError("parity must match m")
    kind = "exterior" if parity == "odd" else "polynomial"
    report = GeneratorReport(CoefficientField(0), N, [("x", m)])
    if m <= N:
        report.entries.append(GeneratorEntry(DLSequence(2), "x", m, kind))
    return report


def literal_side_condition_holds(I: DLSequence, degree: int) -> bool:
    """The reading "i_1 = 0 whenever eps_1 = 1 and |Q^I u| is odd"."""
    if not I.ops:
        return True
    eps1, i1 = I.ops[0]
    return not (eps1 == 1 and degree % 2 == 1 and i1 != 0)


def cone_generators(
    p: int, attach_degree: int, N: int, base_series: PoincareSeries | None = None, literal_side_condition: bool = False
) -> GeneratorReport:
    """Generators adjoined to H_*(E) by coning off S^d -> E.

    At odd p (d = 2n - 1) the class u sits in degree 2n and the generators
    are Q^I u with exc(I) + eps_1 > 2n.  The extra condition "i_1 = 0 if
    eps_1 = 1 and |Q^I u| odd" is applied only when ``literal_side_condition``
    is set; either way every generator on which the two readings disagree is
    listed in ``flagged``.  At p = 2 (d = n) u has degree n + 1 and the
    condition is exc(I) > n + 1.
    """
    if p != 2 and attach_degree % 2 == 0:
        raise ValueError("odd p needs an odd attaching degree")
    if attach_degree < 0:
        raise ValueError("attaching degree must be >= 0")
    ud = attach_degree + 1
    report = GeneratorReport(CoefficientField(p), N, [("u", ud)], base_series=base_series)
    for I in enumerate_admissible(p, ud, N):
        deg = ud + I.degree_shift
        entry = GeneratorEntry(I, "u", deg, _kind(p, deg))
        literal = literal_side_condition_holds(I, deg) if p != 2 else True
        if not literal:
            report.flagged.append(entry.name)
        if literal or not literal_side_condition:
            report.entries.append(entry)
    report.entries.sort(key=lambda e: (e.degree, e.name))
    if report.flagged:
        mode = "excluded" if literal_side_condition else "kept"
        report.notes.append(f"{len(report.flagged)} generators violate the literal side condition ({mode})")
    return report


def rational_cone_series(parity: str, n: int, base_series: PoincareSeries, N: int) -> PoincareSeries:
    """Rational homology of the cone on S^{2n-1} ("odd") or S^{2n} ("even")."""
    base = base_series.truncate(N)
    if parity == "odd":
        return base * PoincareSeries.polynomial(2 * n, N)
    if parity == "even":
        return base * PoincareSeries.exterior(2 * n + 1, N)
    raise ValueError("parity must be 'odd' or 'even'")


def induced_map(src: GeneratorReport, tgt: GeneratorReport, base_map: dict) -> dict:
    """Algebra map on generators induced by a map of bases.

    ``base_map`` sends each base name of ``src`` to a dict {target base: coeff};
    Q^I x goes to sum c Q^I y.  A base name missing from the map goes to zero,
    so the empty map gives the trivial algebra map.
    """
    A = tgt.algebra
    names = set(tgt.names())
    out = {}
    for e in src.entries:
        img = A.zero()
        for y, c in base_map.get(e.base, {}).items():
            name = generator_name(e.sequence, y)
            if name in names:
                img = img + A.gen(name).scale(c)
        out[e.name] = img
    return out


def excess_of(entry: GeneratorEntry):
    return excess(entry.sequence)
