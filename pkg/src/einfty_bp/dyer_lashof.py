"""Dyer-Lashof sequences and the evaluation rules used on A(p)_* and its comodules.

An operation is a pair ``(eps, k)`` standing for Q^k (eps = 0) or beta Q^k
(eps = 1); at p = 2 eps is always 0.  A sequence I = ((eps_1, i_1), ...,
(eps_l, i_l)) acts as Q^I x = beta^eps_1 Q^i_1 ... beta^eps_l Q^i_l x, so the
last pair is applied first.

Evaluation applies, in order:

R1  instability: zero when 2k < |x| (k < |x| at p = 2), for Q and beta Q;
R2  top operation: Q^k x = x^p when 2k = |x| (k = |x|), and beta Q^k x = 0;
R3  generators of A(p)_*: Q^{p^s} taubar_s = taubar_{s+1},
    beta Q^{p^s} taubar_s = zeta_{s+1}, Q^{p^s} zeta_s = zeta_{s+1}
    (Q^{2^s} zeta_s = zeta_{s+1} at p = 2);
R4  p-th powers: Q^{pk}(y^p) = (Q^k y)^p, Q^j(y^p) = 0 for p not dividing j,
    beta Q^j(y^p) = 0;
R5  Cartan formula over products and across A(p)_* (x) M:
    Q^k(xy) = sum Q^i x Q^{k-i} y and
    beta Q^k(xy) = sum beta Q^i x Q^{k-i} y + (-1)^|x| Q^i x beta Q^{k-i} y.

Anything else raises :class:`NotSupported`; Adem relations are deliberately
absent.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable

from .dual_steenrod import (
    UNIT,
    Comodule,
    DualSteenrodAlgebra,
    MilnorMonomial,
    SteenrodElement,
    TensorElement,
    power_monomial,
)
from .graded_algebra import Element

INFINITY = math.inf


class NotSupported(Exception):
    """The evaluation would need a rule outside R1-R5."""


# ---------------------------------------------------------------------------
# sequences


@dataclass(frozen=True)
class DLSequence:
    p: int
    ops: tuple = ()

    def __post_init__(self):
        ops = tuple((int(e), int(i)) for e, i in self.ops)
        if self.p == 2 and any(e for e, _ in ops):
            raise ValueError("no Bockstein at p = 2")
        object.__setattr__(self, "ops", ops)

    @classmethod
    def of(cls, p: int, *indices) -> "DLSequence":
        """Build from indices (p = 2) or (eps, i) pairs."""
        ops = [(0, i) if isinstance(i, int) else i for i in indices]
        return cls(p, tuple(ops))

    def __len__(self):
        return len(self.ops)

    @property
    def indices(self) -> tuple:
        return tuple(i for _, i in self.ops)

    @property
    def degree_shift(self) -> int:
        return sum(op_degree_shift(op, self.p) for op in self.ops)

    @property
    def excess(self):
        return excess(self, self.p)

    def is_admissible(self) -> bool:
        return is_admissible(self, self.p)

    def name(self) -> str:
        if not self.ops:
            return ""
        return " ".join(("bQ^" if e else "Q^") + str(i) for e, i in self.ops)

    def apply_name(self, x: str) -> str:
        return f"{self.name()} {x}" if self.ops else x

    def __str__(self):
        return self.name() or "()"

    def to_json(self) -> dict:
        return {"ops": [list(op) for op in self.ops]}

    @classmethod
    def from_json(cls, data: dict, p: int) -> "DLSequence":
        return cls(p, tuple(tuple(op) for op in data["ops"]))


def op_degree_shift(op, p: int) -> int:
    e, k = op
    return k if p == 2 else 2 * k * (p - 1) - e


def excess(I: DLSequence, p: int | None = None):
    p = I.p if p is None else p
    if not I.ops:
        return INFINITY
    (e1, i1), rest = I.ops[0], I.ops[1:]
    if p == 2:
        return i1 - sum(i for _, i in rest)
    return 2 * i1 - e1 - sum(2 * i * (p - 1) - e for e, i in rest)


def is_admissible(I: DLSequence, p: int | None = None) -> bool:
    p = I.p if p is None else p
    for (_, a), (e_next, b) in zip(I.ops, I.ops[1:]):
        if p == 2:
            if a > 2 * b:
                return False
        elif a > p * b - e_next:
            return False
    return True


def generator_condition(p: int, base_degree: int) -> Callable[[DLSequence], bool]:
    """exc(I) + eps_1 > b at odd p, exc(I) > b at p = 2."""

    def cond(I: DLSequence) -> bool:
        if not I.ops:
            return True
        eps = I.ops[0][0] if p != 2 else 0
        return excess(I, p) + eps > base_degree

    return cond


def enumerate_admissible(
    p: int,
    base_degree: int,
    N: int,
    condition: Callable[[DLSequence], bool] | None = None,
    cutoff_on: str = "degree",
) -> list[DLSequence]:
    """Admissible sequences I with the excess condition and |Q^I x| <= N.

    ``cutoff_on="shift"`` bounds the degree shift of I instead of the
    resulting degree.  Only indices i >= 1 are generated; admissibility
    together with the generator condition rules out i = 0.
    """
    # for the generator condition, admissibility gives exc(tail) >= exc(I) + eps_1,
    # so a failing sequence has no admissible extensions that pass
    prune = condition is None
    if condition is None:
        condition = generator_condition(p, base_degree)
    budget = N - base_degree if cutoff_on == "degree" else N
    if cutoff_on not in ("degree", "shift"):
        raise ValueError("cutoff_on must be 'degree' or 'shift'")
    out = []
    if budget < 0:
        return out
    eps_choices = (0,) if p == 2 else (0, 1)

    # build from the innermost operation outwards
    def grow(ops: tuple, used: int):
        I = DLSequence(p, ops)
        if condition(I):
            out.append(I)
        elif prune:
            return
        limit = None
        if ops:
            e_in, i_in = ops[0]
            limit = 2 * i_in if p == 2 else p * i_in - e_in
        k = 1
        while (limit is None or k <= limit) and used + op_degree_shift((eps_choices[-1], k), p) <= budget:
            for e in eps_choices:
                shift = op_degree_shift((e, k), p)
                if used + shift <= budget:
                    grow(((e, k),) + ops, used + shift)
            k += 1

    grow((), 0)
    out.sort(key=lambda I: (I.degree_shift, len(I), I.ops))
    return out


_OP_RE = re.compile(r"(b|β)?Q\^(\d+)")


def parse_sequence(text: str, p: int) -> DLSequence:
    """Parse ``"Q^3 Q^1"`` or ``"bQ^9"`` into a sequence (leftmost is applied last)."""
    ops = []
    for tok in text.replace("βQ", "bQ").split():
        m = _OP_RE.fullmatch(tok)
        if not m:
            raise ValueError(f"cannot parse operation {tok!r}")
        ops.append((1 if m.group(1) else 0, int(m.group(2))))
    return DLSequence(p, tuple(ops))


# ---------------------------------------------------------------------------
# monomial helpers for the two kinds of factor


def _is_unit(m) -> bool:
    return m == UNIT or m == ()


def _degree(factor, m) -> int:
    return factor.degree(m)


def _pth_root(factor, m, p: int):
    """y with y^p = m, or None."""
    if isinstance(m, MilnorMonomial):
        if m.tau or any(e % p for e in m.zeta):
            return None
        return MilnorMonomial((), tuple(e // p for e in m.zeta))
    if any(e % p for _, e in m):
        return None
    if any(factor.info(n).odd for n, _ in m):
        return None
    return tuple((n, e // p) for n, e in m)


def _split(factor, m):
    """m = first * rest with both factors of positive degree, or None for a single generator."""
    if isinstance(m, MilnorMonomial):
        if m.tau:
            if len(m.tau) == 1 and not m.zeta:
                return None
            first = MilnorMonomial((m.tau[0],), ())
            return first, MilnorMonomial(m.tau[1:], m.zeta)
        k = next(i for i, e in enumerate(m.zeta) if e)
        e = m.zeta[k]
        if e == 1 and sum(m.zeta) == 1:
            return None
        z = [0] * (k + 1)
        z[k] = 1
        first = MilnorMonomial((), tuple(z))
        rest = list(m.zeta)
        rest[k] -= 1
        while rest and rest[-1] == 0:
            rest.pop()
        return first, MilnorMonomial((), tuple(rest))
    (n, e), others = m[0], m[1:]
    if e == 1 and not others:
        return None
    first = ((n, 1),)
    rest = dict(m)
    rest[n] -= 1
    return first, factor.make_monomial(rest)


def _mul(factor, x: dict, y: dict, p: int) -> dict:
    out: dict = {}
    for a, ca in x.items():
        for b, cb in y.items():
            r = factor.mul_monomials(a, b)
            if r is not None:
                out[r[1]] = (out.get(r[1], 0) + r[0] * ca * cb) % p
    return {k: v for k, v in out.items() if v}


def _frobenius(factor, x: dict, p: int) -> dict:
    out: dict = {}
    for m, c in x.items():
        r = power_monomial(factor, m, p)
        if r is not None:
            out[r] = (out.get(r, 0) + pow(c, p, p)) % p
    return {k: v for k, v in out.items() if v}


def _low(d: int, p: int) -> int:
    """Smallest k with Q^k nonzero on degree d."""
    return d if p == 2 else (d + 1) // 2


# ---------------------------------------------------------------------------
# evaluation


class Evaluator:
    """Memoized evaluation of single operations on monomials of one factor."""

    def __init__(self, p: int):
        self.p = p
        self._memo: dict = {}

    def on_monomial(self, factor, m, op) -> dict:
        key = (factor, m, op)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._compute(factor, m, op)
            self._memo[key] = hit
        return hit

    def _compute(self, factor, m, op) -> dict:
        p = self.p
        eps, k = op
        d = _degree(factor, m)
        if _is_unit(m):
            return {m: 1} if (k == 0 and eps == 0) else {}
        # R1
        if (p == 2 and k < d) or (p != 2 and 2 * k < d):
            return {}
        # R2
        if (p == 2 and k == d) or (p != 2 and 2 * k == d):
            if eps:
                return {}
            r = power_monomial(factor, m, p)
            return {} if r is None else {r: 1}
        # R3
        r3 = self._generator_rule(factor, m, op)
        if r3 is not None:
            return r3
        # R4
        root = _pth_root(factor, m, p)
        if root is not None:
            if eps or k % p:
                return {}
            return _frobenius(factor, self.on_monomial(factor, root, (0, k // p)), p)
        # R5
        parts = _split(factor, m)
        if parts is None:
            raise NotSupported(f"{'bQ' if eps else 'Q'}^{k} on {factor.format_monomial(m)}")
        x, y = parts
        return self._cartan(factor, x, y, op)

    def _generator_rule(self, factor, m, op):
        if not isinstance(factor, DualSteenrodAlgebra) or not factor.conjugate:
            return None
        p = self.p
        eps, k = op
        if m.tau:
            if len(m.tau) == 1 and not m.zeta:
                s = m.tau[0]
                if k == p**s:
                    return {MilnorMonomial((s + 1,), ()): 1} if not eps else {_zeta(s + 1): 1}
            return None
        if sum(m.zeta) == 1:
            s = len(m.zeta)
            if k == p**s and not eps:
                return {_zeta(s + 1): 1}
        return None

    def _cartan(self, factor, x, y, op) -> dict:
        p = self.p
        eps, k = op
        dx, dy = _degree(factor, x), _degree(factor, y)
        out: dict = {}
        lo, hi = _low(dx, p), k - _low(dy, p)
        for i in range(lo, hi + 1):
            j = k - i
            terms = []
            if eps:
                terms.append((1, (1, i), (0, j)))
                terms.append((-1 if dx % 2 else 1, (0, i), (1, j)))
            else:
                terms.append((1, (0, i), (0, j)))
            for sign, opx, opy in terms:
                qx = self.on_monomial(factor, x, opx)
                if not qx:
                    continue
                qy = self.on_monomial(factor, y, opy)
                if not qy:
                    continue
                for mono, c in _mul(factor, qx, qy, p).items():
                    out[mono] = (out.get(mono, 0) + sign * c) % p
        return {mm: c for mm, c in out.items() if c}

    def on_tensor(self, factors, key, op) -> dict:
        """Cartan formula across a tensor product of factors."""
        p = self.p
        if len(factors) == 1:
            return {(m,): c for m, c in self.on_monomial(factors[0], key[0], op).items()}
        eps, k = op
        f0, rest_f = factors[0], factors[1:]
        x, rest = key[0], key[1:]
        dx = _degree(f0, x)
        drest = sum(_degree(f, m) for f, m in zip(rest_f, rest))
        out: dict = {}
        for i in range(_low(dx, p), k - _low(drest, p) + 1):
            j = k - i
            terms = [(1, (0, i), (0, j))] if not eps else [
                (1, (1, i), (0, j)),
                (-1 if dx % 2 else 1, (0, i), (1, j)),
            ]
            for sign, opx, opy in terms:
                qx = self.on_monomial(f0, x, opx)
                if not qx:
                    continue
                qy = self.on_tensor(rest_f, rest, opy)
                if not qy:
                    continue
                for mx, cx in qx.items():
                    for my, cy in qy.items():
                        kk = (mx,) + my
                        out[kk] = (out.get(kk, 0) + sign * cx * cy) % p
        return {kk: c for kk, c in out.items() if c}


def _zeta(i: int) -> MilnorMonomial:
    z = [0] * i
    z[i - 1] = 1
    return MilnorMonomial((), tuple(z))


_EVALUATORS: dict[int, Evaluator] = {}


def _evaluator(p: int) -> Evaluator:
    if p not in _EVALUATORS:
        _EVALUATORS[p] = Evaluator(p)
    return _EVALUATORS[p]


def _check_op(op, p: int):
    eps, k = op
    if p == 2 and eps:
        raise ValueError("no Bockstein at p = 2")
    if k < 0:
        raise ValueError("negative operation index")
    return (int(eps), int(k))


def evaluate(op, x, p: int | None = None):
    """Apply one operation (eps, k) to a SteenrodElement, Element or TensorElement."""
    if isinstance(x, SteenrodElement):
        p = x.algebra.p
        ev = _evaluator(p)
        op = _check_op(op, p)
        out: dict = {}
        for m, c in x.terms.items():
            for mm, cc in ev.on_monomial(x.algebra, m, op).items():
                out[mm] = out.get(mm, 0) + c * cc
        return SteenrodElement(x.algebra, out)
    if isinstance(x, Element):
        p = x.algebra.field.p
        ev = _evaluator(p)
        op = _check_op(op, p)
        out = {}
        for m, c in x.terms.items():
            for mm, cc in ev.on_monomial(x.algebra, m, op).items():
                out[mm] = out.get(mm, 0) + c * cc
        return Element(x.algebra, out)
    if isinstance(x, TensorElement):
        p = x.field.p
        ev = _evaluator(p)
        op = _check_op(op, p)
        out = {}
        for key, c in x.terms.items():
            for kk, cc in ev.on_tensor(x.factors, key, op).items():
                out[kk] = out.get(kk, 0) + c * cc
        return TensorElement(x.factors, out)
    raise TypeError(f"cannot evaluate Dyer-Lashof operations on {type(x).__name__}")


def evaluate_sequence(I: DLSequence, x):
    """Q^I x, innermost operation first."""
    for op in reversed(I.ops):
        x = evaluate(op, x)
    return x


def apply_to_ext1_class(op, w):
    """Apply an operation to a filtration-1 cobar element a (x) m termwise by Cartan."""
    from .cobar import CobarElement

    if not isinstance(w, CobarElement):
        raise TypeError("expected a CobarElement")
    M = w.comodule
    if w.terms and w.filtration != 1:
        raise ValueError("apply_to_ext1_class needs a filtration-1 element")
    t = TensorElement(M.factors, {(ws[0], m): c for (ws, m), c in w.terms.items()})
    result = evaluate(op, t)
    terms = {}
    for (a, m), c in result.terms.items():
        if a == UNIT:
            raise ValueError("operation produced a unit letter")
        terms[((a,), m)] = c
    return CobarElement(M, terms)


# ---------------------------------------------------------------------------
# comodules with a monomial embedding into A(p)_*


def to_image(M: Comodule, x: Element) -> SteenrodElement:
    """Push an element of M through its algebra map to A(p)_*."""
    if M.image is None:
        raise ValueError(f"{M.name} has no map to A(p)_*")
    A = M.steenrod
    out = A.zero()
    for m, c in x.terms.items():
        term = A.one()
        for n, e in m:
            term = term * M.image[n] ** e
        out = out + term.scale(c)
    return out


def from_image(M: Comodule, y: SteenrodElement) -> Element:
    """Inverse of :func:`to_image` on its image (the image generators are single monomials)."""
    gens = {}
    for name, img in M.image.items():
        if len(img.terms) != 1:
            raise ValueError("image generators must be monomials")
        (mono, c), = img.terms.items()
        if c != 1 or mono.tau or sum(1 for e in mono.zeta if e) != 1:
            raise ValueError("unsupported image generator")
        k = next(i for i, e in enumerate(mono.zeta) if e)
        gens[k] = (name, mono.zeta[k])
    terms = {}
    for mono, c in y.terms.items():
        if mono.tau:
            raise ValueError("element is not in the image")
        exps = {}
        for k, e in enumerate(mono.zeta):
            if not e:
                continue
            if k not in gens or e % gens[k][1]:
                raise ValueError("element is not in the image")
            exps[gens[k][0]] = e // gens[k][1]
        terms[M.algebra.make_monomial(exps)] = c
    return Element(M.algebra, terms)


def evaluate_via_image(op, x: Element, M: Comodule) -> Element:
    """Evaluate on a comodule with an injective map to A(p)_* by transporting along it."""
    return from_image(M, evaluate(op, to_image(M, x)))
