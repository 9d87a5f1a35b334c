"""Free graded-commutative algebras over Q.

A monomial is a tuple of exponents indexed by the algebra's canonical
generator order (degree first, then declaration order).  Odd generators have
exponent 0 or 1.  The Koszul sign of a product is folded into the
coefficient, so every :class:`Element` has a unique normal form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

Monomial = tuple[int, ...]


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    degree: int

    def __post_init__(self):
        if not isinstance(self.degree, int) or self.degree < 1:
            raise ValueError(f"generator {self.name!r} must have positive integer degree")
        if not self.name:
            raise ValueError("generator name must be nonempty")


class GradedAlgebra:
    """The free graded-commutative algebra on a list of generators."""

    def __init__(self, generators: Iterable[GeneratorSpec]):
        declared = tuple(generators)
        names = [g.name for g in declared]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise ValueError(f"duplicate generator names: {dup}")
        self.declared = declared
        order = sorted(range(len(declared)), key=lambda i: (declared[i].degree, i))
        self.generators: tuple[GeneratorSpec, ...] = tuple(declared[i] for i in order)
        self.names = tuple(g.name for g in self.generators)
        self.degrees = tuple(g.degree for g in self.generators)
        self.index = {name: k for k, name in enumerate(self.names)}
        self.odd = tuple(d % 2 == 1 for d in self.degrees)
        self.ngens = len(self.generators)
        self._mul_cache: dict[tuple[Monomial, Monomial], tuple[int, Monomial] | None] = {}
        self._basis_cache: dict[int, tuple[Monomial, ...]] = {}

    # identity is the generator list, so independently built copies compare equal
    def _key(self):
        return tuple((g.name, g.degree) for g in self.declared)

    def __eq__(self, other) -> bool:
        return isinstance(other, GradedAlgebra) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        gens = ", ".join(f"{g.name}:{g.degree}" for g in self.generators)
        return f"GradedAlgebra({gens})"

    # --- constructors -------------------------------------------------
    def unit_monomial(self) -> Monomial:
        return (0,) * self.ngens

    def one(self) -> "Element":
        return Element(self, {self.unit_monomial(): Fraction(1)})

    def zero(self) -> "Element":
        return Element(self, {})

    def scalar(self, c) -> "Element":
        return Element(self, {self.unit_monomial(): Fraction(c)})

    def gen(self, name: str) -> "Element":
        if name not in self.index:
            raise KeyError(f"unknown generator {name!r}")
        e = [0] * self.ngens
        e[self.index[name]] = 1
        return Element(self, {tuple(e): Fraction(1)})

    def gens(self, *names: str) -> list["Element"]:
        return [self.gen(n) for n in names]

    def monomial(self, exps: Mapping[str, int] | Sequence[int]) -> "Element":
        if isinstance(exps, Mapping):
            e = [0] * self.ngens
            for name, k in exps.items():
                e[self.index[name]] = k
            exps = e
        mono = tuple(exps)
        self._check_monomial(mono)
        return Element(self, {mono: Fraction(1)})

    def _check_monomial(self, mono: Monomial):
        if len(mono) != self.ngens:
            raise ValueError("monomial has wrong length")
        for k, e in enumerate(mono):
            if e < 0 or (self.odd[k] and e > 1):
                raise ValueError(f"invalid exponent {e} for generator {self.names[k]}")

    # --- monomial arithmetic ------------------------------------------
    def mono_degree(self, mono: Monomial) -> int:
        return sum(e * d for e, d in zip(mono, self.degrees))

    def mono_mul(self, m1: Monomial, m2: Monomial) -> tuple[int, Monomial] | None:
        """Product of two monomials as (sign, monomial), or None if it vanishes."""
        key = (m1, m2)
        cached = self._mul_cache.get(key, False)
        if cached is not False:
            return cached
        sign = 1
        out = list(m1)
        odd = self.odd
        # moving each odd factor of m2 left past the odd factors of m1 that sit after it
        later_odd = 0
        result: tuple[int, Monomial] | None
        for k in range(self.ngens - 1, -1, -1):
            if odd[k]:
                if m2[k]:
                    if m1[k]:
                        result = None
                        self._mul_cache[key] = result
                        return result
                    if later_odd % 2:
                        sign = -sign
                if m1[k]:
                    later_odd += 1
            out[k] += m2[k]
        result = (sign, tuple(out))
        self._mul_cache[key] = result
        return result

    def basis(self, degree: int) -> tuple[Monomial, ...]:
        """All monomials of the given degree, in descending lexicographic order."""
        if degree < 0:
            return ()
        cached = self._basis_cache.get(degree)
        if cached is not None:
            return cached
        out: list[Monomial] = []
        n = self.ngens
        degs = self.degrees
        odd = self.odd
        cur = [0] * n

        def rec(k: int, remaining: int):
            if remaining == 0:
                out.append(tuple(cur))
                return
            if k == n:
                return
            d = degs[k]
            top = 1 if odd[k] else remaining // d
            top = min(top, remaining // d)
            for e in range(top, -1, -1):
                cur[k] = e
                rec(k + 1, remaining - e * d)
            cur[k] = 0

        rec(0, degree)
        result = tuple(out)
        self._basis_cache[degree] = result
        return result

    def render_monomial(self, mono: Monomial) -> str:
        parts = []
        for k, e in enumerate(mono):
            if e == 1:
                parts.append(self.names[k])
            elif e > 1:
                parts.append(f"{self.names[k]}^{e}")
        return "^".join(parts) if parts else "1"


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


class Element:
    """A finite Q-linear combination of normalized monomials."""

    __slots__ = ("algebra", "_terms", "_hash")

    def __init__(self, algebra: GradedAlgebra, terms: Mapping[Monomial, Fraction] | None = None):
        self.algebra = algebra
        clean = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    clean[mono] = c if isinstance(c, Fraction) else Fraction(c)
        self._terms = clean
        self._hash = None

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def degrees(self) -> set[int]:
        return {self.algebra.mono_degree(m) for m in self._terms}

    def degree(self) -> int | None:
        """Degree if homogeneous and nonzero, else None."""
        ds = self.degrees()
        return ds.pop() if len(ds) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def homogeneous_part(self, degree: int) -> "Element":
        alg = self.algebra
        return Element(alg, {m: c for m, c in self._terms.items() if alg.mono_degree(m) == degree})

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.algebra is not self.algebra and other.algebra != self.algebra:
                raise ValueError("elements live in different algebras")
            return other
        if isinstance(other, (int, Fraction)):
            return self.algebra.scalar(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self._terms)
        for m, c in other._terms.items():
            terms[m] = terms.get(m, 0) + c
        return Element(self.algebra, terms)

    __radd__ = __add__

    def __neg__(self):
        return Element(self.algebra, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "Element":
        c = Fraction(c)
        if not c:
            return self.algebra.zero()
        return Element(self.algebra, {m: c * v for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return multiply(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = self.algebra.one()
        for _ in range(k):
            out = out * self
        return out

    def bar(self) -> "Element":
        return bar_involution(self)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.algebra.scalar(other)
        if not isinstance(other, Element):
            return NotImplemented
        return self.algebra == other.algebra and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        alg = self.algebra
        return sorted(self._terms.items(), key=lambda mc: (alg.mono_degree(mc[0]), tuple(-e for e in mc[0])))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        alg = self.algebra
        out = []
        for i, (m, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            a = abs(c)
            body = alg.render_monomial(m)
            if body == "1":
                text = _fmt_coeff(a)
            elif a == 1:
                text = body
            else:
                text = f"{_fmt_coeff(a)}*{body}"
            if i == 0:
                out.append(("-" if c < 0 else "") + text)
            else:
                out.append(f" {sign} {text}")
        return "".join(out)

    def __repr__(self) -> str:
        return f"Element({self})"

    def support_generators(self) -> set[str]:
        names = self.algebra.names
        return {names[k] for m in self._terms for k, e in enumerate(m) if e}


def multiply(a: Element, b: Element) -> Element:
    """Graded-commutative product with Koszul signs."""
    if a.algebra != b.algebra:
        raise ValueError("elements live in different algebras")
    alg = a.algebra
    terms: dict[Monomial, Fraction] = {}
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            r = alg.mono_mul(m1, m2)
            if r is None:
                continue
            sign, m = r
            v = c1 * c2 if sign > 0 else -(c1 * c2)
            terms[m] = terms.get(m, 0) + v
    return Element(alg, terms)


def bar_involution(a: Element) -> Element:
    """a -> (-1)^deg a, applied to each homogeneous component."""
    alg = a.algebra
    return Element(alg, {m: (-c if alg.mono_degree(m) % 2 else c) for m, c in a._terms.items()})


@dataclass(frozen=True)
class LinearSlice:
    """Coordinates on the degree-``degree`` part of a free algebra."""

    algebra: GradedAlgebra
    degree: int
    basis: tuple[Monomial, ...]
    cap: int

    def __post_init__(self):
        object.__setattr__(self, "_pos", {m: i for i, m in enumerate(self.basis)})

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def position(self, mono: Monomial) -> int:
        return self._pos[mono]  # type: ignore[attr-defined]

    def vector(self, e: Element) -> list[Fraction]:
        v = [Fraction(0)] * len(self.basis)
        pos = self._pos  # type: ignore[attr-defined]
        for m, c in e.items():
            if m not in pos:
                raise ValueError(f"element {e} has a term outside degree {self.degree}")
            v[pos[m]] = c
        return v

    def element(self, v: Sequence) -> Element:
        return Element(self.algebra, {m: Fraction(c) for m, c in zip(self.basis, v) if c})

    def elements(self) -> Iterator[Element]:
        for m in self.basis:
            yield Element(self.algebra, {m: Fraction(1)})


def _algebra_of(obj) -> GradedAlgebra:
    if isinstance(obj, GradedAlgebra):
        return obj
    alg = getattr(obj, "algebra", None)
    if isinstance(alg, GradedAlgebra):
        return alg
    raise TypeError(f"cannot find an algebra in {obj!r}")


def monomial_basis(presentation, degree: int) -> LinearSlice:
    """Basis slice of the given degree; accepts an algebra or a presentation."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    alg = _algebra_of(presentation)
    return LinearSlice(alg, degree, alg.basis(degree), degree)
