"""The dual Steenrod algebra A(p)_* in conjugate Milnor generators.

At odd p a basis monomial is tau-bar_E zeta^R with E a set of exterior
indices and R an exponent vector; at p = 2 only the zeta part exists.  The
coproduct is the multiplicative extension of

    psi(zeta_n)   = sum_{0<=i<=n} zeta_i (x) zeta_{n-i}^{p^i}
    psi(taubar_n) = 1 (x) taubar_n + sum_{0<=j<=n} taubar_j (x) zeta_{n-j}^{p^j}

with zeta_0 = 1.  The classical xi/tau presentation lives on the same
monomial type (``conjugate=False``) and is only used to cross-check these
formulas through the antipode.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from . import linalg
from .graded_algebra import CoefficientField, Element, FreeCommAlgebra, GeneratorSpec, LinearCombination


class MilnorMonomial(NamedTuple):
    tau: tuple = ()
    zeta: tuple = ()

    def to_json(self) -> dict:
        return {"tau": list(self.tau), "zeta": list(self.zeta)}

    @classmethod
    def from_json(cls, data: dict) -> "MilnorMonomial":
        return make_milnor(data.get("tau", ()), data.get("zeta", ()))


UNIT = MilnorMonomial((), ())


def make_milnor(tau: Iterable[int] = (), zeta: Iterable[int] = ()) -> MilnorMonomial:
    z = list(zeta)
    while z and z[-1] == 0:
        z.pop()
    t = tuple(sorted(tau))
    if len(set(t)) != len(t):
        raise ValueError("repeated tau index")
    return MilnorMonomial(t, tuple(z))


class SteenrodElement(LinearCombination):
    __slots__ = ("algebra",)

    def __init__(self, algebra: "DualSteenrodAlgebra", terms=()):
        super().__init__(terms, algebra.field)
        self.algebra = algebra

    def _new(self, terms):
        return SteenrodElement(self.algebra, terms)

    def _check(self, other):
        if not isinstance(other, SteenrodElement):
            return NotImplemented
        if other.algebra != self.algebra:
            raise ValueError("elements of different algebras")
        return other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        A = self.algebra
        terms: dict = {}
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                r = A.mul_monomials(a, b)
                if r is not None:
                    terms[r[1]] = terms.get(r[1], 0) + r[0] * ca * cb
        return SteenrodElement(A, terms)

    def __pow__(self, e: int):
        out = self.algebra.one()
        for _ in range(e):
            out = out * self
        return out

    @property
    def degree(self):
        ds = {self.algebra.degree(m) for m in self.terms}
        return ds.pop() if len(ds) == 1 else None

    def __repr__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda kv: self.algebra.sort_key(kv[0]))
        return " + ".join(_coeff_str(c, self.algebra.format_monomial(m)) for m, c in items)

    def to_json(self) -> list:
        return [{"coeff": c, **m.to_json()} for m, c in self.terms.items()]


def _coeff_str(c, name: str) -> str:
    if c == 1:
        return name
    if name == "1":
        return str(c)
    return f"{c}*{name}"


class DualSteenrodAlgebra:
    """A(p)_*; ``conjugate=False`` reads monomials in the classical xi/tau generators."""

    def __init__(self, p: int, conjugate: bool = True):
        self.field = CoefficientField(p)
        self.p = p
        self.conjugate = conjugate
        self._basis_cache: dict[int, list] = {}
        self._coproduct_cache: dict = {}
        self._reduced_cache: dict = {}

    def __eq__(self, other):
        return (
            isinstance(other, DualSteenrodAlgebra)
            and self.p == other.p
            and self.conjugate == other.conjugate
        )

    def __hash__(self):
        return hash((self.p, self.conjugate))

    def __repr__(self):
        return f"DualSteenrodAlgebra(p={self.p}{'' if self.conjugate else ', classical'})"

    unit_monomial = UNIT

    # -- degrees ------------------------------------------------------------
    def zeta_degree(self, i: int) -> int:
        return 2**i - 1 if self.p == 2 else 2 * (self.p**i - 1)

    def tau_degree(self, i: int) -> int:
        if self.p == 2:
            raise ValueError("no tau generators at p = 2")
        return 2 * self.p**i - 1

    def degree(self, m: MilnorMonomial) -> int:
        d = sum(self.tau_degree(i) for i in m.tau) if m.tau else 0
        return d + sum(e * self.zeta_degree(k + 1) for k, e in enumerate(m.zeta))

    def sort_key(self, m: MilnorMonomial):
        return (self.degree(m), m.tau, m.zeta)

    def format_monomial(self, m: MilnorMonomial) -> str:
        z, t = ("zeta", "taubar") if self.conjugate else ("xi", "tau")
        parts = [f"{t}_{i}" for i in m.tau]
        for k, e in enumerate(m.zeta):
            if e:
                parts.append(f"{z}_{k + 1}" + (f"^{e}" if e > 1 else ""))
        return " ".join(parts) if parts else "1"

    # -- multiplication -------------------------------------------------------
    def mul_monomials(self, a: MilnorMonomial, b: MilnorMonomial):
        if not a.tau and not a.zeta:
            return 1, b
        if not b.tau and not b.zeta:
            return 1, a
        sign = 1
        if b.tau:
            if set(a.tau) & set(b.tau):
                return None
            inversions = sum(1 for i in a.tau for j in b.tau if i > j)
            if inversions % 2:
                sign = -1
            tau = tuple(sorted(a.tau + b.tau))
        else:
            tau = a.tau
        za, zb = a.zeta, b.zeta
        if len(za) < len(zb):
            za, zb = zb, za
        zeta = tuple(x + (zb[k] if k < len(zb) else 0) for k, x in enumerate(za))
        return sign, MilnorMonomial(tau, zeta)

    def element(self, terms) -> SteenrodElement:
        return SteenrodElement(self, terms)

    def one(self) -> SteenrodElement:
        return SteenrodElement(self, {UNIT: 1})

    def zero(self) -> SteenrodElement:
        return SteenrodElement(self, {})

    def zeta(self, i: int, e: int = 1) -> SteenrodElement:
        if i == 0:
            return self.one()
        z = [0] * i
        z[i - 1] = e
        return SteenrodElement(self, {MilnorMonomial((), tuple(z)): 1})

    xi = zeta

    def tau(self, i: int) -> SteenrodElement:
        if self.p == 2:
            raise ValueError("no tau generators at p = 2")
        return SteenrodElement(self, {MilnorMonomial((i,), ()): 1})

    def monomial(self, m: MilnorMonomial, c=1) -> SteenrodElement:
        return SteenrodElement(self, {m: c})

    def basis(self, d: int) -> list[MilnorMonomial]:
        if d in self._basis_cache:
            return self._basis_cache[d]
        out = []
        if d >= 0:
            p = self.p
            taus = []
            if p != 2:
                i = 0
                while self.tau_degree(i) <= d:
                    taus.append(i)
                    i += 1
            zetas = []
            k = 1
            while self.zeta_degree(k) <= d:
                zetas.append(k)
                k += 1
            for mask in range(1 << len(taus)):
                tset = tuple(t for b, t in enumerate(taus) if mask >> b & 1)
                rem = d - sum(self.tau_degree(t) for t in tset)
                if rem < 0:
                    continue
                for zeta in _partitions(rem, [self.zeta_degree(k) for k in zetas]):
                    out.append(make_milnor(tset, zeta))
        out.sort(key=self.sort_key)
        self._basis_cache[d] = out
        return out

    def counit(self, x: SteenrodElement):
        return x.terms.get(UNIT, 0)

    # -- coproduct --------------------------------------------------------------
    def _generator_coproduct(self, kind: str, n: int) -> dict:
        p = self.p
        terms: dict = {}
        if kind == "zeta":
            for i in range(n + 1):
                left = _zeta_mono(i, 1) if self.conjugate else _zeta_mono(n - i, p**i)
                right = _zeta_mono(n - i, p**i) if self.conjugate else _zeta_mono(i, 1)
                terms[(left, right)] = 1
        else:
            if self.conjugate:
                terms[(UNIT, MilnorMonomial((n,), ()))] = 1
                for j in range(n + 1):
                    terms[(MilnorMonomial((j,), ()), _zeta_mono(n - j, p**j))] = 1
            else:
                terms[(MilnorMonomial((n,), ()), UNIT)] = 1
                for i in range(n + 1):
                    terms[(_zeta_mono(n - i, p**i), MilnorMonomial((i,), ()))] = 1
        return terms

    def coproduct_monomial(self, m: MilnorMonomial) -> dict:
        """psi(m) as a dict {(left, right): coeff}."""
        cached = self._coproduct_cache.get(m)
        if cached is not None:
            return cached
        if m == UNIT:
            result = {(UNIT, UNIT): 1}
        elif m.tau:
            rest = MilnorMonomial(m.tau[1:], m.zeta)
            result = self.tensor_mul(
                self._generator_coproduct("tau", m.tau[0]), self.coproduct_monomial(rest), (self, self)
            )
        else:
            k = max(i for i, e in enumerate(m.zeta) if e)
            e = m.zeta[k]
            rest = make_milnor((), m.zeta[:k])
            if e % self.p == 0:
                # all terms of psi(zeta_k^{e/p}) are even, so Frobenius applies
                root = self.coproduct_monomial(_zeta_mono(k + 1, e // self.p))
                power = self.frobenius(root, (self, self))
            elif e == 1:
                power = self._generator_coproduct("zeta", k + 1)
            else:
                power = self.tensor_mul(
                    self.coproduct_monomial(_zeta_mono(k + 1, e - 1)),
                    self._generator_coproduct("zeta", k + 1),
                    (self, self),
                )
            result = power if rest == UNIT else self.tensor_mul(self.coproduct_monomial(rest), power, (self, self))
        self._coproduct_cache[m] = result
        return result

    def coproduct(self, x: SteenrodElement) -> "TensorElement":
        terms: dict = {}
        for m, c in x.terms.items():
            for k, v in self.coproduct_monomial(m).items():
                terms[k] = terms.get(k, 0) + c * v
        return TensorElement((self, self), terms)

    def reduced_coproduct_monomial(self, m: MilnorMonomial) -> dict:
        """psi(m) - m (x) 1 - 1 (x) m, keeping only positive-degree pairs."""
        return {(a, b): c for a, b, c in self.reduced_coproduct_list(m)}

    def reduced_coproduct_list(self, m: MilnorMonomial) -> tuple:
        """The reduced coproduct as a cached tuple of (left, right, coeff)."""
        cached = self._reduced_cache.get(m)
        if cached is None:
            cached = tuple(
                (a, b, c) for (a, b), c in self.coproduct_monomial(m).items() if a != UNIT and b != UNIT
            )
            self._reduced_cache[m] = cached
        return cached

    # -- tensor arithmetic --------------------------------------------------------
    def tensor_mul(self, t1: dict, t2: dict, factors) -> dict:
        return tensor_mul_dicts(t1, t2, factors, self.p)

    def frobenius(self, t: dict, factors) -> dict:
        p = self.p
        out = {}
        for key, c in t.items():
            new = []
            for alg, m in zip(factors, key):
                r = power_monomial(alg, m, p)
                if r is None:
                    break
                new.append(r)
            else:
                out[tuple(new)] = (out.get(tuple(new), 0) + c) % p
        return {k: v for k, v in out.items() if v}


def _zeta_mono(i: int, e: int) -> MilnorMonomial:
    if i == 0 or e == 0:
        return UNIT
    z = [0] * i
    z[i - 1] = e
    return MilnorMonomial((), tuple(z))


def _partitions(n: int, parts: list[int]):
    """Exponent vectors (e_1, ..., e_k) with sum e_i * parts[i] = n."""
    if not parts:
        if n == 0:
            yield ()
        return
    *head, last = parts
    for e in range(n // last + 1):
        for rest in _partitions(n - e * last, head):
            yield rest + (e,)


def power_monomial(alg, m, e: int):
    """m^e for an even (or p = 2) monomial, or None if it vanishes."""
    if isinstance(m, MilnorMonomial):
        if m.tau:
            return None if e > 1 else m
        return MilnorMonomial((), tuple(x * e for x in m.zeta))
    exps = {n: k * e for n, k in m}
    return alg.make_monomial(exps)


def tensor_mul_dicts(t1: dict, t2: dict, factors, p: int) -> dict:
    """Product in a tensor product of graded-commutative algebras.

    (x_1 (x) ... (x) x_k)(y_1 (x) ... (x) y_k) picks up (-1)^{|x_i||y_j|}
    for every i > j.
    """
    out: dict = {}
    k = len(factors)
    odd_signs = p != 2
    for key1, c1 in t1.items():
        degs1 = [factors[i].degree(key1[i]) for i in range(k)] if odd_signs else None
        for key2, c2 in t2.items():
            sign = c1 * c2
            new = []
            for i in range(k):
                r = factors[i].mul_monomials(key1[i], key2[i])
                if r is None:
                    break
                sign *= r[0]
                new.append(r[1])
            else:
                if odd_signs:
                    odd_after = 0
                    flips = 0
                    for j in range(k - 1, -1, -1):
                        if odd_after and factors[j].degree(key2[j]) % 2:
                            flips += odd_after
                        if degs1[j] % 2:
                            odd_after += 1
                    if flips % 2:
                        sign = -sign
                key = tuple(new)
                out[key] = (out.get(key, 0) + sign) % p
    return {k_: v for k_, v in out.items() if v}


class TensorElement(LinearCombination):
    """Element of a tensor product; keys are tuples of monomials, one per factor."""

    __slots__ = ("factors",)

    def __init__(self, factors, terms=()):
        self.factors = tuple(factors)
        super().__init__(terms, factors[0].field)

    def _new(self, terms):
        return TensorElement(self.factors, terms)

    def _check(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        return other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        return TensorElement(self.factors, tensor_mul_dicts(self.terms, other.terms, self.factors, self.field.p))

    def __pow__(self, e: int):
        unit = tuple(f.unit_monomial for f in self.factors)
        out = TensorElement(self.factors, {unit: 1})
        for _ in range(e):
            out = out * self
        return out

    def __repr__(self):
        if not self.terms:
            return "0"
        def key(kv):
            return tuple(f.sort_key(m) for f, m in zip(self.factors, kv[0]))
        parts = []
        for k, c in sorted(self.terms.items(), key=key):
            name = "⊗".join(f.format_monomial(m) for f, m in zip(self.factors, k))
            parts.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# comodules


class Comodule:
    """A left A(p)_*-comodule algebra given by coactions on generators.

    ``algebra`` is a :class:`FreeCommAlgebra` (or the dual Steenrod algebra
    itself, for the comodule A(p)_* over itself).  ``image`` optionally maps
    generator names to elements of A(p)_* under an injective algebra map; it
    is what lets Dyer-Lashof operations be evaluated on the comodule.
    """

    def __init__(self, name: str, algebra, steenrod: DualSteenrodAlgebra, table=None, image=None):
        self.name = name
        self.algebra = algebra
        self.steenrod = steenrod
        self.p = steenrod.p
        self.field = steenrod.field
        self.table = {} if table is None else dict(table)
        self.image = image
        self._cache: dict = {}
        self._reduced_cache: dict = {}
        self._is_self = isinstance(algebra, DualSteenrodAlgebra)
        if not self._is_self:
            for g in algebra.generators:
                if g.name not in self.table:
                    raise KeyError(f"generator {g.name} missing from the coaction table")

    def __repr__(self):
        return f"Comodule({self.name}, p={self.p})"

    @property
    def factors(self):
        return (self.steenrod, self.algebra)

    def degree(self, m) -> int:
        return self.algebra.degree(m)

    def basis(self, d: int):
        return self.algebra.basis(d)

    @property
    def unit_monomial(self):
        return self.algebra.unit_monomial if self._is_self else ()

    def format_monomial(self, m) -> str:
        return self.algebra.format_monomial(m)

    def gen(self, name: str):
        return self.algebra.gen(name)

    def coaction_monomial(self, m) -> dict:
        cached = self._cache.get(m)
        if cached is not None:
            return cached
        if self._is_self:
            result = self.steenrod.coproduct_monomial(m)
        elif not m:
            result = {(UNIT, ()): 1}
        else:
            result = {(UNIT, ()): 1}
            p = self.p
            for name, e in m:
                gen = {k: c for k, c in self.table[name].items()}
                power = _power_dict(gen, e, self.factors, p)
                result = tensor_mul_dicts(result, power, self.factors, p)
        self._cache[m] = result
        return result

    def coaction(self, x) -> TensorElement:
        """psi(x) in A(p)_* (x) M."""
        terms: dict = {}
        for m, c in x.terms.items():
            for k, v in self.coaction_monomial(m).items():
                terms[k] = terms.get(k, 0) + c * v
        return TensorElement(self.factors, terms)

    def reduced_coaction_monomial(self, m) -> dict:
        return {(a, x): c for a, x, c in self.reduced_coaction_list(m)}

    def reduced_coaction_list(self, m) -> tuple:
        """psi(m) - 1 (x) m as a cached tuple of (letter, module monomial, coeff)."""
        cached = self._reduced_cache.get(m)
        if cached is None:
            cached = tuple((a, x, c) for (a, x), c in self.coaction_monomial(m).items() if a != UNIT)
            self._reduced_cache[m] = cached
        return cached

    def check_counit(self, m) -> bool:
        got = {k[1]: c for k, c in self.coaction_monomial(m).items() if k[0] == UNIT}
        return got == {m: 1}

    def check_coassociativity(self, m) -> bool:
        A = self.steenrod
        p = self.p
        left: dict = {}
        right: dict = {}
        for (a, x), c in self.coaction_monomial(m).items():
            for (a1, a2), c2 in A.coproduct_monomial(a).items():
                key = (a1, a2, x)
                left[key] = (left.get(key, 0) + c * c2) % p
            for (b, y), c3 in self.coaction_monomial(x).items():
                key = (a, b, y)
                right[key] = (right.get(key, 0) + c * c3) % p
        return {k: v for k, v in left.items() if v} == {k: v for k, v in right.items() if v}

    def to_json(self) -> dict:
        if self._is_self:
            return {"field": str(self.field), "comodule": self.name, "generators": "A(p)_*"}
        data = self.algebra.to_json()
        data["comodule"] = self.name
        data["coaction"] = {
            g: [{"coeff": c, "steenrod": a.to_json(), "module": dict(x)} for (a, x), c in t.items()]
            for g, t in self.table.items()
        }
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Comodule":
        alg = FreeCommAlgebra.from_json(data)
        A = DualSteenrodAlgebra(alg.field.p)
        table = {}
        for g, terms in data["coaction"].items():
            table[g] = {
                (MilnorMonomial.from_json(t["steenrod"]), alg.make_monomial(t["module"])): t["coeff"]
                for t in terms
            }
        return cls(data["comodule"], alg, A, table)


def _power_dict(t: dict, e: int, factors, p: int) -> dict:
    unit = tuple(f.unit_monomial if hasattr(f, "unit_monomial") else () for f in factors)
    out = {unit: 1}
    base = t
    while e:
        if e & 1:
            out = tensor_mul_dicts(out, base, factors, p)
        e >>= 1
        if e:
            base = tensor_mul_dicts(base, base, factors, p)
    return out


FreeCommAlgebra.unit_monomial = ()


def steenrod_comodule(p: int) -> Comodule:
    A = DualSteenrodAlgebra(p)
    return Comodule("steenrod", A, A)


def trivial_comodule(p: int, gens: Iterable[tuple[str, int]] = ()) -> Comodule:
    """F_p (or F_p-algebra on the given generators) with trivial coaction."""
    A = DualSteenrodAlgebra(p)
    specs = []
    for name, d in gens:
        kind = "exterior" if (p != 2 and d % 2) else "polynomial"
        specs.append(GeneratorSpec(name, d, kind))
    alg = FreeCommAlgebra(specs, CoefficientField(p))
    table = {s.name: {(UNIT, ((s.name, 1),)): 1} for s in specs}
    return Comodule("trivial", alg, A, table)


def _generator_tower(p: int, prefix: str, n: int, square: bool, degree) -> Comodule:
    """Polynomial comodule on prefix_1..prefix_n with psi(g_r) = sum zeta_j^e (x) g_{r-j}^{p^j}."""
    A = DualSteenrodAlgebra(p)
    specs = [GeneratorSpec(f"{prefix}_{r}", degree(r), "polynomial") for r in range(1, n + 1)]
    alg = FreeCommAlgebra(specs, CoefficientField(p))
    e = 2 if square else 1
    table = {}
    for r in range(1, n + 1):
        terms = {}
        for j in range(r + 1):
            lower = () if r - j == 0 else ((f"{prefix}_{r - j}", p**j),)
            terms[(_zeta_mono(j, e), lower)] = 1
        table[f"{prefix}_{r}"] = terms
    return A, alg, table


def tower_comodule(p: int, n: int, variant: str | None = None) -> Comodule:
    """The stage-n comodule F_p[z_1, ..., z_n].

    At odd p the coaction is psi(z_r) = sum_j zeta_j (x) z_{r-j}^{p^j} with
    |z_r| = 2(p^r - 1).  At p = 2 two variants exist: ``"square"`` uses
    zeta_j^2 and |z_r| = 2(2^r - 1) (the t_n pattern), ``"plain"`` uses
    zeta_j and |z_r| = 2^r - 1 (the pattern of the generator-solving lemma).
    """
    if variant is None:
        variant = "square" if p == 2 else "plain"
    if p != 2 and variant != "plain":
        raise ValueError("the square variant only exists at p = 2")
    square = variant == "square"
    if p == 2 and not square:
        degree = lambda r: 2**r - 1  # noqa: E731
    else:
        degree = lambda r: 2 * (p**r - 1)  # noqa: E731
    A, alg, table = _generator_tower(p, "z", n, square, degree)
    return Comodule(f"tower[{n}]" + ("" if p != 2 else f"/{variant}"), alg, A, table)


def bp_comodule(p: int, max_degree: int) -> Comodule:
    """H_*(BP; F_p) = F_p[t_1, t_2, ...] truncated to generators of degree <= max_degree."""
    n = 0
    while 2 * (p ** (n + 1) - 1) <= max_degree:
        n += 1
    square = p == 2
    A, alg, table = _generator_tower(p, "t", n, square, lambda r: 2 * (p**r - 1))
    e = 2 if square else 1
    image = {f"t_{r}": A.zeta(r, e) for r in range(1, n + 1)}
    return Comodule("bp", alg, A, table, image=image)


# ---------------------------------------------------------------------------
# solvers


@dataclass
class CoalgebraReport:
    p: int
    cutoff: int
    checked: int = 0
    failure: str | None = None

    @property
    def ok(self) -> bool:
        return self.failure is None


def check_coalgebra(A: DualSteenrodAlgebra, N: int) -> CoalgebraReport:
    """Counit and coassociativity of psi on every basis monomial of degree <= N.

    Both (psi (x) 1)psi(m) and (1 (x) psi)psi(m) are expanded from psi
    itself; coproducts are stored as index arrays so the expansion and the
    comparison mod p are vectorized.
    """
    p = A.p
    report = CoalgebraReport(p, N)
    mons = [m for d in range(N + 1) for m in A.basis(d)]
    index = {m: i for i, m in enumerate(mons)}
    K = len(mons)
    left, right, coef, ptr = [], [], [], [0]
    for m in mons:
        for (a, b), c in A.coproduct_monomial(m).items():
            left.append(index[a])
            right.append(index[b])
            coef.append(c)
        ptr.append(len(left))
    L = np.array(left, dtype=np.int64)
    R = np.array(right, dtype=np.int64)
    C = np.array(coef, dtype=np.int64)
    P = np.array(ptr, dtype=np.int64)
    unit = index[UNIT]

    def expand(rows):
        # all coproduct terms of the monomials in ``rows``, plus the owning row
        counts = P[rows + 1] - P[rows]
        owner = np.repeat(np.arange(len(rows)), counts)
        starts = np.repeat(P[rows], counts)
        offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
        pos = starts + offsets
        return owner, L[pos], R[pos], C[pos]

    for i, m in enumerate(mons):
        lo, hi = P[i], P[i + 1]
        a, b, c = L[lo:hi], R[lo:hi], C[lo:hi]
        # counit on either side recovers m
        if C[lo:hi][(a == unit) & (b == i)].sum() % p != 1 or C[lo:hi][(b == unit) & (a == i)].sum() % p != 1:
            report.failure = f"counit fails on {A.format_monomial(m)}"
            return report
        o1, a1, a2, c1 = expand(a)
        key_l = (a1 * K + a2) * K + b[o1]
        o2, b1, b2, c2 = expand(b)
        key_r = (a[o2] * K + b1) * K + b2
        keys = np.concatenate([key_l, key_r])
        vals = np.concatenate([c[o1] * c1, -(c[o2] * c2)])
        uniq, inv = np.unique(keys, return_inverse=True)
        total = np.zeros(len(uniq), dtype=np.int64)
        np.add.at(total, inv, vals)
        if np.any(total % p):
            report.failure = f"coassociativity fails on {A.format_monomial(m)}"
            return report
        report.checked += 1
    return report


def _matrix_of(columns: list[dict], row_index: dict, p: int) -> np.ndarray:
    M = np.zeros((len(row_index), len(columns)), dtype=np.int64)
    for j, col in enumerate(columns):
        for k, c in col.items():
            M[row_index[k], j] = c % p
    return M


def primitives_in_degree(M: Comodule, d: int) -> list:
    """Basis of the kernel of x -> psi(x) - 1 (x) x in degree d."""
    basis = M.basis(d)
    if not basis:
        return []
    cols = [M.reduced_coaction_monomial(m) for m in basis]
    rows = {}
    for col in cols:
        for k in col:
            rows.setdefault(k, len(rows))
    mat = _matrix_of(cols, rows, M.p)
    out = []
    for v in linalg.nullspace(mat, M.p):
        terms = {basis[i]: int(c) for i, c in enumerate(v) if c}
        if M._is_self:
            out.append(SteenrodElement(M.algebra, terms))
        else:
            out.append(Element(M.algebra, terms))
    return out


class SolveError(RuntimeError):
    pass


def solve_generator_sequence(p: int, n_max: int, square: bool = False) -> list[SteenrodElement]:
    """Solve psi(s_n) = sum_{0<=j<=n} zeta_j^e (x) s_{n-j}^{p^j} for s_1..s_{n_max}.

    ``square`` (p = 2 only) uses zeta_j^2 and |s_n| = 2(2^n - 1).  The
    solution is unique because A(p)_* has no positive-degree elements x with
    psi(x) = 1 (x) x; non-uniqueness or inconsistency raises SolveError.
    """
    A = DualSteenrodAlgebra(p)
    e = 2 if square else 1
    if square and p != 2:
        raise ValueError("square variant is p = 2 only")
    sols: list[SteenrodElement] = []
    for n in range(1, n_max + 1):
        d = 2 * (p**n - 1) if (p != 2 or square) else 2**n - 1
        basis = A.basis(d)
        rhs = TensorElement((A, A), {})
        for j in range(1, n + 1):
            lower = A.one() if n - j == 0 else sols[n - j - 1] ** (p**j)
            rhs = rhs + TensorElement(
                (A, A), {(zj, m): c for zj in A.zeta(j, e).terms for m, c in lower.terms.items()}
            )
        cols = [
            {k: c for k, c in A.coproduct_monomial(b).items() if k[0] != UNIT} for b in basis
        ]
        rows = {}
        for col in cols + [rhs.terms]:
            for k in col:
                rows.setdefault(k, len(rows))
        mat = _matrix_of(cols, rows, p)
        b = np.zeros(len(rows), dtype=np.int64)
        for k, c in rhs.terms.items():
            b[rows[k]] = c
        x = linalg.solve(mat, b, p)
        if x is None:
            raise SolveError(f"no solution for s_{n}")
        if linalg.rank(mat, p) != len(basis):
            raise SolveError(f"solution for s_{n} is not unique")
        sols.append(SteenrodElement(A, {basis[i]: int(c) for i, c in enumerate(x) if c}))
    return sols


# ---------------------------------------------------------------------------
# cross-check against the classical presentation


def classical_antipode(p: int, N: int) -> tuple[DualSteenrodAlgebra, dict, dict]:
    """chi(xi_n) and chi(tau_n) in the classical xi/tau basis, degrees <= N."""
    C = DualSteenrodAlgebra(p, conjugate=False)
    chi_xi = {0: C.one()}
    n = 1
    while C.zeta_degree(n) <= N:
        acc = C.zero()
        for i in range(n):
            acc = acc + C.xi(n - i, p**i) * chi_xi[i]
        chi_xi[n] = -acc
        n += 1
    chi_tau = {}
    if p != 2:
        n = 0
        while C.tau_degree(n) <= N:
            acc = C.tau(n)
            for i in range(n):
                acc = acc + C.xi(n - i, p**i) * chi_tau[i]
            chi_tau[n] = -acc
            n += 1
    return C, chi_xi, chi_tau


@dataclass
class ConsistencyReport:
    p: int
    cutoff: int
    checked: list = field(default_factory=list)
    disagreement: str | None = None

    @property
    def ok(self) -> bool:
        return self.disagreement is None


def conjugate_consistency_check(p: int, N: int) -> ConsistencyReport:
    """Compare the conjugate-generator coproducts with Milnor's xi/tau coproducts.

    Every zeta_n, tau-bar_n of degree <= N is rewritten in the classical
    basis via the antipode recursion sum_i xi_{n-i}^{p^i} chi(xi_i) = 0
    (and its tau analogue); its classical coproduct must equal the conjugate
    formula rewritten the same way.
    """
    report = ConsistencyReport(p, N)
    if N <= 0:
        return report
    A = DualSteenrodAlgebra(p)
    C, chi_xi, chi_tau = classical_antipode(p, N)
    image_cache: dict = {}

    def to_classical(m: MilnorMonomial) -> SteenrodElement:
        if m in image_cache:
            return image_cache[m]
        out = C.one()
        for i in m.tau:
            out = out * chi_tau[i]
        for k, e in enumerate(m.zeta):
            for _ in range(e):
                out = out * chi_xi[k + 1]
        image_cache[m] = out
        return out

    def tensor_to_classical(t: dict) -> dict:
        out: dict = {}
        for (a, b), c in t.items():
            for ma, ca in to_classical(a).terms.items():
                for mb, cb in to_classical(b).terms.items():
                    out[(ma, mb)] = (out.get((ma, mb), 0) + c * ca * cb) % p
        return {k: v for k, v in out.items() if v}

    gens = [("zeta", n) for n in chi_xi if n >= 1] + [("tau", n) for n in chi_tau]
    for kind, n in gens:
        mono = _zeta_mono(n, 1) if kind == "zeta" else MilnorMonomial((n,), ())
        classical = C.coproduct(to_classical(mono)).terms
        conj = tensor_to_classical(A.coproduct_monomial(mono))
        label = f"{kind}_{n}" if kind == "zeta" else f"taubar_{n}"
        if classical != conj:
            report.disagreement = label
            return report
        report.checked.append(label)
    return report


# ---------------------------------------------------------------------------
# parsing


_TOKEN = re.compile(r"(zeta|xi|tau|taubar)_(\d+)(?:\^(\d+))?")


def parse_steenrod(text: str, A: DualSteenrodAlgebra) -> SteenrodElement:
    """Parse sums like ``"zeta_2 + 2*zeta_1^3"`` or ``"taubar_0 zeta_1"``."""
    out = A.zero()
    text = text.replace("-", "+-")
    for term in filter(None, (t.strip() for t in text.split("+"))):
        coeff = 1
        if term.startswith("-"):
            coeff, term = -1, term[1:].strip()
        if "*" in term:
            c, term = term.split("*", 1)
            coeff *= int(c)
            term = term.strip()
        x = A.one()
        if term != "1":
            for tok in term.split():
                m = _TOKEN.fullmatch(tok)
                if not m:
                    raise ValueError(f"cannot parse {tok!r}")
                kind, i, e = m.group(1), int(m.group(2)), int(m.group(3) or 1)
                g = A.zeta(i) if kind in ("zeta", "xi") else A.tau(i)
                x = x * g**e
        out = out + x.scale(coeff)
    return out
