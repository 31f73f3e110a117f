"""Free graded-commutative algebras over F_p and Q.

Generators may be polynomial, exterior, p-truncated (x^p = 0) or divided
power.  A divided-power generator ``x`` is never stored as such: it is
expanded into the tower of truncated generators ``gamma{p^r}(x)`` and
``gamma_r(x)`` is resolved through :func:`divided_power_normal_form`.

Monomials are tuples of ``(generator name, exponent)`` pairs listed in the
algebra's generator order; that order is also the one used for Koszul signs.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable

SUPPORTED_PRIMES = (2, 3, 5, 7)

KINDS = ("polynomial", "exterior", "truncated", "divided-power")

Monomial = tuple  # tuple[tuple[str, int], ...]

_TOWER_RE = re.compile(r"^gamma(\d+)\((.+)\)$")


@dataclass(frozen=True)
class CoefficientField:
    """F_p for ``p`` prime, or Q when ``p == 0``."""

    p: int = 0

    def __post_init__(self):
        if self.p and self.p not in SUPPORTED_PRIMES:
            raise ValueError(f"unsupported prime {self.p}; expected one of {SUPPORTED_PRIMES}")

    @classmethod
    def prime(cls, p: int) -> "CoefficientField":
        return cls(p)

    @classmethod
    def rationals(cls) -> "CoefficientField":
        return cls(0)

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def reduce(self, c):
        if self.p:
            return int(c) % self.p
        return Fraction(c)

    def inverse(self, c):
        c = self.reduce(c)
        if not c:
            raise ZeroDivisionError("inverse of zero")
        if self.p:
            return pow(c, -1, self.p)
        return 1 / c

    def __str__(self):
        return f"F_{self.p}" if self.p else "Q"

    @classmethod
    def parse(cls, text: str) -> "CoefficientField":
        if text == "Q":
            return cls(0)
        m = re.fullmatch(r"F_(\d+)", text)
        if not m:
            raise ValueError(f"bad field {text!r}")
        return cls(int(m.group(1)))


def binomial_mod(n: int, k: int, p: int) -> int:
    """C(n, k) mod p by Lucas' theorem."""
    if k < 0 or n < 0 or k > n:
        return 0
    result = 1
    while n or k:
        n_digit, k_digit = n % p, k % p
        if k_digit > n_digit:
            return 0
        result = result * _small_binomial(n_digit, k_digit, p) % p
        n //= p
        k //= p
    return result


@lru_cache(maxsize=None)
def _small_binomial(n: int, k: int, p: int) -> int:
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


def p_adic_digits(r: int, p: int) -> list[int]:
    digits = []
    while r:
        digits.append(r % p)
        r //= p
    return digits


def divided_power_normal_form(r: int, p: int) -> tuple[int, tuple[tuple[int, int], ...]]:
    """Return ``(c_r, ((p^i, r_i), ...))`` with gamma_r = c_r * prod gamma_{p^i}^{r_i}.

    The unit is obtained by multiplying the factors together one at a time
    with gamma_j gamma_{p^i} = C(j + p^i, j) gamma_{j + p^i}; every step is a
    carry-free digit increment, so no factor vanishes mod p.
    """
    if r < 1:
        raise ValueError("r must be positive")
    digits = p_adic_digits(r, p)
    product = 1  # prod gamma_{p^i}^{r_i} = product * gamma_r
    j = 0
    for i, d in enumerate(digits):
        for _ in range(d):
            product = product * binomial_mod(j + p**i, j, p) % p
            j += p**i
    factors = tuple((p**i, d) for i, d in enumerate(digits) if d)
    return pow(product, -1, p), factors


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int
    kind: str = "polynomial"

    def to_json(self) -> dict:
        return {"name": self.name, "degree": self.degree, "kind": self.kind}


@dataclass(frozen=True)
class _Internal:
    key: tuple
    degree: int
    max_exponent: int | None  # None means unbounded
    odd: bool


class LinearCombination:
    """Finite linear combination of hashable basis keys over a coefficient field."""

    __slots__ = ("terms", "field")

    def __init__(self, terms, field: CoefficientField):
        self.field = field
        clean = {}
        for k, c in dict(terms).items():
            c = field.reduce(c)
            if c:
                clean[k] = c
        self.terms = clean

    def _new(self, terms):
        return type(self)(terms, self.field)

    def _check(self, other):
        if not isinstance(other, LinearCombination):
            return NotImplemented
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        return self._new(terms)

    def __neg__(self):
        return self._new({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._new({k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, LinearCombination):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms.items())

    def coefficient(self, key):
        return self.terms.get(key, 0)


class Element(LinearCombination):
    """An element of a :class:`FreeCommAlgebra`."""

    __slots__ = ("algebra",)

    def __init__(self, algebra: "FreeCommAlgebra", terms=()):
        super().__init__(terms, algebra.field)
        self.algebra = algebra

    def _new(self, terms):
        return Element(self.algebra, terms)

    def _check(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        if other.algebra is not self.algebra and other.algebra != self.algebra:
            raise ValueError("elements of different algebras")
        return other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return multiply(self, other)

    def __pow__(self, e: int):
        result = self.algebra.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def degrees(self) -> set[int]:
        return {self.algebra.degree(m) for m in self.terms}

    @property
    def degree(self) -> int | None:
        """The common degree of all terms, or None if inhomogeneous or zero."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.algebra.sort_key(kv[0]))

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            name = self.algebra.format_monomial(mono)
            if c == 1:
                parts.append(name)
            elif name == "1":
                parts.append(str(c))
            else:
                parts.append(f"{c}*{name}")
        return " + ".join(parts)


class FreeCommAlgebra:
    """Free graded-commutative algebra on a list of generators."""

    def __init__(self, gens: Iterable[GeneratorSpec], field: CoefficientField):
        self.generators = tuple(gens)
        self.field = field
        p = field.p
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise ValueError(f"duplicate generator name {dup!r}")
        self._specs = {g.name: g for g in self.generators}
        self._internal: dict[str, _Internal] = {}
        for idx, g in enumerate(self.generators):
            if g.kind not in KINDS:
                raise ValueError(f"unknown generator kind {g.kind!r}")
            if g.degree < 0:
                raise ValueError("negative degrees are not supported")
            if _TOWER_RE.match(g.name):
                raise ValueError(f"generator name {g.name!r} is reserved")
            odd = g.degree % 2 == 1
            if g.kind in ("truncated", "divided-power") and field.is_rational:
                raise ValueError(f"{g.kind} generators need a prime field")
            if p != 2:
                if g.kind == "exterior" and not odd and not field.is_rational:
                    raise ValueError(f"exterior generator {g.name} of even degree at odd p")
                if g.kind != "exterior" and odd:
                    raise ValueError(
                        f"{g.kind} generator {g.name} has odd degree; graded commutativity "
                        "forces it to be exterior"
                    )
            if g.kind == "divided-power":
                continue
            max_exp = {"polynomial": None, "exterior": 1, "truncated": (p or 0) - 1}[g.kind]
            self._internal[g.name] = _Internal((idx, 0), g.degree, max_exp, odd and p != 2)

    # -- presentation -----------------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, FreeCommAlgebra)
            and self.generators == other.generators
            and self.field == other.field
        )

    def __hash__(self):
        return hash((self.generators, self.field))

    def __repr__(self):
        gens = ", ".join(f"{g.name}:{g.degree}:{g.kind}" for g in self.generators)
        return f"FreeCommAlgebra[{self.field}]({gens})"

    def spec(self, name: str) -> GeneratorSpec:
        return self._specs[name]

    def tower_name(self, name: str, r: int) -> str:
        """Internal name of gamma_{p^r}(name)."""
        return f"gamma{self.field.p ** r}({name})"

    def info(self, name: str) -> _Internal:
        try:
            return self._internal[name]
        except KeyError:
            pass
        m = _TOWER_RE.match(name)
        if not m or m.group(2) not in self._specs:
            raise KeyError(f"unknown generator {name!r}")
        base = self._specs[m.group(2)]
        if base.kind != "divided-power":
            raise KeyError(f"{base.name} is not a divided-power generator")
        p = self.field.p
        power = int(m.group(1))
        r = 0
        while p**r < power:
            r += 1
        if p**r != power:
            raise KeyError(f"tower index {power} is not a power of {p}")
        idx = self.generators.index(base)
        info = _Internal((idx, r), base.degree * power, p - 1, False)
        self._internal[name] = info
        return info

    def internal_generators(self, max_degree: int) -> list[str]:
        """Internal (non divided-power) generator names of degree <= max_degree."""
        out = []
        for g in self.generators:
            if g.kind != "divided-power":
                if g.degree <= max_degree:
                    out.append(g.name)
                continue
            if g.degree == 0:
                raise ValueError("degree-0 divided-power generator")
            r = 0
            while g.degree * self.field.p**r <= max_degree:
                out.append(self.tower_name(g.name, r))
                r += 1
        return sorted(out, key=lambda n: self.info(n).key)

    # -- monomials ----------------------------------------------------------
    def degree(self, mono: Monomial) -> int:
        return sum(self.info(n).degree * e for n, e in mono)

    def sort_key(self, mono: Monomial):
        return (self.degree(mono), tuple(n for n, _ in mono), tuple(e for _, e in mono))

    def format_monomial(self, mono: Monomial) -> str:
        if not mono:
            return "1"
        return " ".join(n if e == 1 else f"{n}^{e}" for n, e in mono)

    def make_monomial(self, exponents: dict[str, int]) -> Monomial | None:
        """Canonical monomial from an exponent table, or None if it vanishes."""
        items = []
        for n, e in exponents.items():
            if e < 0:
                raise ValueError("negative exponent")
            if e == 0:
                continue
            info = self.info(n)
            if info.max_exponent is not None and e > info.max_exponent:
                return None
            items.append((n, e))
        items.sort(key=lambda ne: self.info(ne[0]).key)
        return tuple(items)

    def mul_monomials(self, a: Monomial, b: Monomial):
        """Product of two monomials as ``(sign, monomial)`` or None if zero."""
        if not a:
            return 1, b
        if not b:
            return 1, a
        exps = dict(a)
        for n, e in b:
            exps[n] = exps.get(n, 0) + e
        mono = self.make_monomial(exps)
        if mono is None:
            return None
        sign = 1
        if self.field.p != 2:
            odd_a = [self.info(n).key for n, e in a if self.info(n).odd]
            if odd_a:
                for n, e in b:
                    info = self.info(n)
                    if info.odd:
                        sign *= (-1) ** sum(1 for k in odd_a if k > info.key)
        return sign, mono

    def basis(self, d: int) -> list[Monomial]:
        """All monomials of degree d, sorted."""
        if d < 0:
            return []
        gens = self.internal_generators(d)
        for n in gens:
            if self.info(n).degree == 0:
                raise ValueError(f"degree-0 generator {n} gives an infinite basis")
        out = []

        def rec(i, remaining, acc):
            if remaining == 0:
                out.append(tuple(acc))
                return
            if i == len(gens):
                return
            info = self.info(gens[i])
            top = remaining // info.degree
            if info.max_exponent is not None:
                top = min(top, info.max_exponent)
            for e in range(top, -1, -1):
                if e:
                    acc.append((gens[i], e))
                rec(i + 1, remaining - e * info.degree, acc)
                if e:
                    acc.pop()

        rec(0, d, [])
        return sorted(out, key=self.sort_key)

    # -- elements -------------------------------------------------------------
    def zero(self) -> Element:
        return Element(self, {})

    def one(self) -> Element:
        return Element(self, {(): 1})

    def scalar(self, c) -> Element:
        return Element(self, {(): c})

    def monomial(self, mono: Monomial, c=1) -> Element:
        return Element(self, {mono: c})

    def gen(self, name: str) -> Element:
        spec = self._specs.get(name)
        if spec is not None and spec.kind == "divided-power":
            return self.gamma(name, 1)
        self.info(name)
        return Element(self, {((name, 1),): 1})

    def gamma(self, name: str, r: int) -> Element:
        """gamma_r(x) for a divided-power generator x, in TP-tower normal form."""
        if self._specs[name].kind != "divided-power":
            raise ValueError(f"{name} is not a divided-power generator")
        if r == 0:
            return self.one()
        c, factors = divided_power_normal_form(r, self.field.p)
        exps = {f"gamma{q}({name})": e for q, e in factors}
        return Element(self, {self.make_monomial(exps): c})

    def poincare_series(self, N: int) -> "PoincareSeries":
        return poincare_series(self, N)

    def to_json(self, N: int | None = None) -> dict:
        out = {
            "field": str(self.field),
            "generators": [g.to_json() for g in self.generators],
        }
        if N is not None:
            out["series"] = list(self.poincare_series(N).coefficients)
        return out

    @classmethod
    def from_json(cls, data: dict) -> "FreeCommAlgebra":
        field = CoefficientField.parse(data["field"])
        gens = [GeneratorSpec(g["name"], g["degree"], g["kind"]) for g in data["generators"]]
        return cls(gens, field)


def make_algebra(gens: Iterable[GeneratorSpec], field: CoefficientField) -> FreeCommAlgebra:
    return FreeCommAlgebra(gens, field)


def multiply(a: Element, b: Element) -> Element:
    """Graded-commutative product with Koszul signs and all relations applied."""
    if a.algebra != b.algebra:
        raise ValueError("elements of different algebras")
    A = a.algebra
    terms: dict = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            r = A.mul_monomials(ma, mb)
            if r is None:
                continue
            sign, m = r
            terms[m] = terms.get(m, 0) + sign * ca * cb
    return Element(A, terms)


@dataclass(frozen=True)
class PoincareSeries:
    """Dimensions c_0..c_N of a graded vector space, exact below the cutoff N."""

    coefficients: tuple[int, ...]

    @property
    def cutoff(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, d: int) -> int:
        return self.coefficients[d]

    def __mul__(self, other: "PoincareSeries") -> "PoincareSeries":
        N = min(self.cutoff, other.cutoff)
        out = [0] * (N + 1)
        for i, a in enumerate(self.coefficients[: N + 1]):
            if a:
                for j, b in enumerate(other.coefficients[: N + 1 - i]):
                    out[i + j] += a * b
        return PoincareSeries(tuple(out))

    def truncate(self, N: int) -> "PoincareSeries":
        return PoincareSeries(self.coefficients[: N + 1])

    @classmethod
    def one(cls, N: int) -> "PoincareSeries":
        return cls(tuple([1] + [0] * N))

    @classmethod
    def polynomial(cls, d: int, N: int) -> "PoincareSeries":
        """1/(1 - t^d)."""
        if d <= 0:
            raise ValueError("polynomial generator of non-positive degree")
        return cls(tuple(1 if k % d == 0 else 0 for k in range(N + 1)))

    @classmethod
    def truncated(cls, d: int, height: int, N: int) -> "PoincareSeries":
        """1 + t^d + ... + t^{(height-1)d}."""
        if d <= 0:
            raise ValueError("generator of non-positive degree")
        return cls(tuple(1 if k % d == 0 and k // d < height else 0 for k in range(N + 1)))

    @classmethod
    def exterior(cls, d: int, N: int) -> "PoincareSeries":
        return cls.truncated(d, 2, N)

    @classmethod
    def product(cls, factors: Iterable["PoincareSeries"], N: int) -> "PoincareSeries":
        out = cls.one(N)
        for f in factors:
            out = out * f
        return out

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coefficients):
            if c:
                mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
                terms.append(mono if c == 1 and k else f"{c}{mono}")
        terms.append(f"O(t^{self.cutoff + 1})")
        return " + ".join(terms)


def poincare_series(A: FreeCommAlgebra, N: int) -> PoincareSeries:
    factors = []
    for name in A.internal_generators(N):
        info = A.info(name)
        if info.degree == 0:
            raise ValueError(f"degree-0 generator {name} gives infinite dimensions")
        if info.max_exponent is None:
            factors.append(PoincareSeries.polynomial(info.degree, N))
        else:
            factors.append(PoincareSeries.truncated(info.degree, info.max_exponent + 1, N))
    for g in A.generators:
        if g.degree == 0:
            raise ValueError(f"degree-0 generator {g.name} gives infinite dimensions")
    return PoincareSeries.product(factors, N)


def tensor(A: FreeCommAlgebra, B: FreeCommAlgebra) -> FreeCommAlgebra:
    """A ⊗ B as a free algebra on the disjoint union of generators."""
    if A.field != B.field:
        raise ValueError("different coefficient fields")
    return FreeCommAlgebra(itertools.chain(A.generators, B.generators), A.field)
