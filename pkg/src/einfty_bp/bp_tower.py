"""The stage-by-stage tower of comodules and cobar classes approximating BP.

Stage n has generators z_1..z_n with |z_r| = 2(p^r - 1) and coaction
psi(z_r) = sum_j zeta_j (x) z_{r-j}^{p^j} (zeta_j^2 at p = 2).  The classes
alpha_[r] = sum_{1<=s<=r} zeta_s (x) z_{r-s}^{p^s} and u_n are filtration-1
cobar cocycles, and each step checks that the power operation carries u_n
to alpha_[n+1].
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cobar import (
    CobarDGA,
    CobarElement,
    alpha_class,
    bar,
    cobar_element,
    differential,
    ext_low_lines,
    h0,
    is_cocycle,
    is_nonzero_class,
    module_element,
    order_p_witness,
    toda_shadow_check,
    u_class,
)
from .dual_steenrod import (
    Comodule,
    bp_comodule,
    solve_generator_sequence,
    tower_comodule,
)
from .dyer_lashof import DLSequence, NotSupported, apply_to_ext1_class, evaluate_via_image
from .graded_algebra import SUPPORTED_PRIMES, PoincareSeries


class RecursionMismatch(AssertionError):
    pass


def generator_degree(p: int, r: int) -> int:
    return 2 * (p**r - 1)


def power_operation(p: int, n: int) -> tuple:
    """(eps, k) carrying u_n to alpha_[n+1]: beta Q^{p^n}, or Q^{2^{n+1}-1} at p = 2."""
    return (0, 2 ** (n + 1) - 1) if p == 2 else (1, p**n)


def rekey(x: CobarElement, M: Comodule) -> CobarElement:
    """Move a cobar element to a larger stage comodule (monomial keys are shared)."""
    return CobarElement(M, dict(x.terms))


@dataclass
class TowerState:
    p: int
    n: int
    comodule: Comodule
    alphas: dict = field(default_factory=dict)
    us: dict = field(default_factory=dict)
    rational: PoincareSeries | None = None
    N: int = 40
    checks: list = field(default_factory=list)

    @property
    def degrees(self) -> list[int]:
        return [generator_degree(self.p, r) for r in range(1, self.n + 1)]

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def stage_checks(self, n: int) -> list:
        return [c for c in self.checks if c["stage"] == n]

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "stage": self.n,
            "generator_degrees": self.degrees,
            "alpha": {str(r): x.to_json() for r, x in sorted(self.alphas.items())},
            "u": {str(r): x.to_json() for r, x in sorted(self.us.items())},
            "rational_series": list(self.rational.coefficients) if self.rational else None,
            "checks": list(self.checks),
            "caveat": "classes are cobar shadows; detection in the Adams spectral sequence is assumed",
        }


def _check(state: TowerState, stage: int, name: str, ok: bool, detail: str = "") -> bool:
    state.checks.append({"stage": stage, "check": name, "ok": bool(ok), "detail": detail})
    return bool(ok)


def init(p: int, N: int = 40) -> TowerState:
    if p not in SUPPORTED_PRIMES:
        raise ValueError(f"unsupported prime {p}")
    M = tower_comodule(p, 0)
    state = TowerState(p, 0, M, rational=PoincareSeries.one(N), N=N)
    a1 = alpha_class(M, 1)
    state.alphas[1] = a1
    _check(state, 0, "alpha_[1] is a cocycle", is_cocycle(a1))
    _check(state, 0, "alpha_[1] is a nonzero Ext^1 class", is_nonzero_class(a1))
    return state


def _diff(expected: CobarElement, got: CobarElement) -> str:
    delta = got - expected
    return f"got - expected = {delta}" if delta.terms else ""


def step(state: TowerState, shadow: bool = True) -> TowerState:
    """Adjoin z_n and verify the stage-n identities; raise RecursionMismatch on failure."""
    p = state.p
    n = state.n + 1
    M = tower_comodule(p, n)
    new = TowerState(p, n, M, N=state.N, checks=list(state.checks))
    new.alphas = {r: rekey(x, M) for r, x in state.alphas.items()}
    new.us = {r: rekey(x, M) for r, x in state.us.items()}

    z = M.gen(f"z_{n}")
    mono = next(iter(z.terms))
    _check(new, n, "coaction of z_n is counital", M.check_counit(mono))
    _check(new, n, "coaction of z_n is coassociative", M.check_coassociativity(mono))
    _check(new, n, "coaction of z_n^p is coassociative", M.check_coassociativity(next(iter((z**p).terms))))

    alpha_n = new.alphas[n]
    _check(new, n, "d(-z_n) = alpha_[n]", differential(module_element(M, -z)) == alpha_n)

    u = u_class(M, n)
    new.us[n] = u
    _check(new, n, "u_n is a cocycle", is_cocycle(u))
    _check(new, n, "u_n is a nonzero Ext^1 class", is_nonzero_class(u))
    if shadow:
        report = toda_shadow_check(n, p, M)
        _check(new, n, "u_n in <h_0, alpha_[n], 1> (Massey shadow)", report.ok, f"sign {report.sign}")

    op = power_operation(p, n)
    try:
        got = apply_to_ext1_class(op, u)
    except NotSupported as exc:
        _check(new, n, "power operation on u_n", False, str(exc))
        raise
    expected = alpha_class(M, n + 1)
    name = ("bQ^" if op[0] else "Q^") + f"{op[1]}(u_n) = alpha_[n+1]"
    if not _check(new, n, name, got == expected, _diff(expected, got)):
        raise RecursionMismatch(f"stage {n}: {_diff(expected, got)}")
    new.alphas[n + 1] = expected
    _check(new, n, "alpha_[n+1] is a cocycle", is_cocycle(expected))
    _check(new, n, "alpha_[n+1] is a nonzero Ext^1 class", is_nonzero_class(expected))
    h0_alpha = CobarDGA().product(bar(h0(p)), expected)
    witness = order_p_witness(M, n + 1)
    _check(new, n, "h_0 alpha_[n+1] = d(-W) (order p shadow)", differential(witness) == -h0_alpha)

    arith = power_op_arithmetic(p, n)
    _check(new, n, "power operation arithmetic", arith.ok)

    new.rational = state.rational * PoincareSeries.polynomial(generator_degree(p, n), state.N)
    _check(new, n, "rational series", new.rational == rational_series(p, n, state.N))
    return new


def run(p: int, stages: int, N: int = 40) -> TowerState:
    state = init(p, N)
    for _ in range(stages):
        state = step(state)
    return state


def rational_series(p: int, n: int, N: int) -> PoincareSeries:
    """Series of Q[u_1, ..., u_n] with |u_k| = 2(p^k - 1)."""
    return PoincareSeries.product([PoincareSeries.polynomial(generator_degree(p, k), N) for k in range(1, n + 1)], N)


def torsion_free_target_series(p: int, N: int) -> PoincareSeries:
    """Series of Q[u_n : n >= 1], truncated at N."""
    n = 0
    while generator_degree(p, n + 1) <= N:
        n += 1
    return rational_series(p, n, N)


# ---------------------------------------------------------------------------
# arithmetic behind the power operations


@dataclass
class ArithmeticReport:
    p: int
    r: int
    items: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i["ok"] for i in self.items)

    def add(self, name: str, value, expected):
        self.items.append({"name": name, "value": value, "expected": expected, "ok": value == expected})

    def value(self, name: str):
        return next(i["value"] for i in self.items if i["name"] == name)

    def to_json(self) -> dict:
        return {"p": self.p, "r": self.r, "items": self.items, "ok": self.ok}


def power_op_arithmetic(p: int, r: int) -> ArithmeticReport:
    """Definedness, order and degree bookkeeping for the operations used at stage r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    rep = ArithmeticReport(p, r)
    if p == 2:
        n = 2 ** (r + 1) - 2
        rep.add("source degree", n, 2 ** (r + 1) - 2)
        rep.add("n mod 2 (n = -2 mod 2)", n % 2, (-2) % 2)
        rep.add("n mod 4", n % 4, 2)
        rep.add("operation index", 2 ** (r + 1) - 1, n + 1)
        rep.add("target degree", 2 * n + 1, 2 ** (r + 2) - 3)
        # Ext^{s,t} -> Ext^{s+t-i, 2t} with s = 1, t = n + 1, i = operation index
        s, t, i = 1, n + 1, n + 1
        rep.add("target Ext filtration", s + t - i, 1)
        rep.add("target internal degree", 2 * t, 2 ** (r + 2) - 2)
        rep.add("2 P(w) = 0 (order divides 2)", True, True)
        rep.add("indeterminacy trivial", True, True)
        return rep
    value = 2 * p**r * (p - 1) - 1 - 2 * (p**r - 1) * (p - 1)
    rep.add("definedness argument", value, 2 * (p - 1) - 1)
    rep.add("floor", value // (2 * (p - 1)), 0)
    order_degree = 2 * (p - 2)
    # the first positive stem with p-torsion in the sphere is 2p - 3
    rep.add("order group pi_{2(p-2)} S vanishes", 0 < order_degree < 2 * p - 3 or order_degree == 0, True)
    rep.add("source degree", 2 * (p**r - 1), generator_degree(p, r))
    rep.add("target degree", 2 * (p ** (r + 1) - 1) - 1, 2 * p ** (r + 1) - 3)
    # Ext^{1, 2p^r - 1} -> Ext^{1, 2(p^{r+1} - 1)}
    rep.add("source internal degree", 2 * p**r - 1, 2 * p**r - 1)
    rep.add("target internal degree", 2 * p**r - 1 + 2 * p**r * (p - 1) - 1, 2 * (p ** (r + 1) - 1))
    return rep


# ---------------------------------------------------------------------------
# comparison with H_*(BP)


@dataclass
class BPReport:
    p: int
    stage: int
    items: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(i["ok"] for i in self.items)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.items.append({"name": name, "ok": bool(ok), "detail": detail})

    def to_json(self) -> dict:
        return {"p": self.p, "stage": self.stage, "items": self.items, "notes": self.notes, "ok": self.ok}


def generation_chain(p: int, s: int, M: Comodule | None = None):
    """Q^{p^{s-1}} ... Q^p applied to t_1 (Q^{2^s} ... Q^4 on t_1 at p = 2), evaluated through zeta."""
    if M is None:
        M = bp_comodule(p, generator_degree(p, s))
    ops = [(0, 2 ** (j + 1)) if p == 2 else (0, p**j) for j in range(s - 1, 0, -1)]
    I = DLSequence(p, tuple(ops))
    x = M.gen("t_1")
    for op in reversed(I.ops):
        x = evaluate_via_image(op, x, M)
    return I, x


def bp_image_class(M: Comodule, n: int) -> CobarElement:
    """u_n transported to H_*(BP) along z_r -> t_r."""
    T = tower_comodule(M.p, n)
    u = u_class(T, n)
    terms = {}
    for (letters, m), c in u.terms.items():
        key = M.algebra.make_monomial({"t" + name[1:]: e for name, e in m})
        terms[(letters, key)] = c
    return CobarElement(M, terms)


def bp_comparison(state: TowerState, N: int | None = None) -> BPReport:
    p = state.p
    n = state.n
    rep = BPReport(p, n)
    if n < 1:
        raise ValueError("bp_comparison needs stage >= 1")
    N = state.N if N is None else N
    reach = n
    if generator_degree(p, n) > N:
        reach = max(r for r in range(1, n + 1) if generator_degree(p, r) <= N) if generator_degree(p, 1) <= N else 0
        rep.notes.append(f"truncated to stages <= {reach} by the cutoff {N}")
    if reach == 0:
        return rep

    # (i) generators
    sols = solve_generator_sequence(p, reach, square=(p == 2))
    A = sols[0].algebra
    for r, s in enumerate(sols, start=1):
        want = A.zeta(r, 2 if p == 2 else 1)
        rep.add(f"s_{r} = {want}", s == want, repr(s))
    if p == 2:
        plain = solve_generator_sequence(p, reach, square=False)
        for r, s in enumerate(plain, start=1):
            rep.add(f"plain variant: s_{r} = zeta_{r}", s == A.zeta(r), repr(s))

    # (ii) Dyer-Lashof generation inside H_*(BP)
    M = bp_comodule(p, generator_degree(p, reach))
    for s in range(2, reach + 1):
        I, x = generation_chain(p, s, M)
        rep.add(f"{I.apply_name('t_1')} = t_{s}", x == M.gen(f"t_{s}"), repr(x))

    # (iii) the u-classes over H_*(BP)
    for r in range(1, reach + 1):
        M = bp_comodule(p, generator_degree(p, r))
        x = bp_image_class(M, r)
        rep.add(f"image of u_{r} is a cocycle", is_cocycle(x), repr(x))
        rep.add(f"image of u_{r} is nonzero in Ext^1", is_nonzero_class(x))
        deg = x.degree
        if deg is not None and deg <= 12:
            ext = ext_low_lines(M, deg, deg)
            rep.add(f"Ext^1 in degree {deg} is nonzero", len(ext.ext1[deg]) > 0)
    return rep


# ---------------------------------------------------------------------------
# the two p = 2 tower variants


def variant_comparison(n: int) -> dict:
    """Which p = 2 coaction variant satisfies which identity at stages 1..n."""
    out = {}
    for variant in ("square", "plain"):
        rows = []
        for r in range(1, n + 1):
            M = tower_comodule(2, r, variant)
            u = u_class(M, r)
            homogeneous = u.degree is not None
            z = module_element(M, M.gen(f"z_{r}"))
            d_minus_z = differential(-z)
            alpha_sq = alpha_class(M, r)
            plain_alpha = CobarElement(M, {})
            A = M.steenrod
            for s in range(1, r + 1):
                e = 2**s
                gen = M.algebra.one() if r == s else M.gen(f"z_{r - s}") ** e
                plain_alpha = plain_alpha + cobar_element(M, [A.zeta(s)], gen)
            rows.append(
                {
                    "stage": r,
                    "u homogeneous": homogeneous,
                    "u cocycle": homogeneous and is_cocycle(u),
                    "d(-z) = sum zeta_s^2 z^(2^s)": d_minus_z == alpha_sq,
                    "d(-z) = sum zeta_s z^(2^s)": d_minus_z == plain_alpha,
                }
            )
        square = variant == "square"
        sols = solve_generator_sequence(2, n, square=square)
        A = sols[0].algebra
        out[variant] = {
            "stages": rows,
            "generator solve": [repr(s) for s in sols],
            "generator solve matches": all(s == A.zeta(r, 2 if square else 1) for r, s in enumerate(sols, start=1)),
        }
    return out
