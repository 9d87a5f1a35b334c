"""Presentations of free DGAs, their cohomology, cup products and maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .gca import Element, GeneratorSpec, GradedAlgebra, Monomial, LinearSlice, monomial_basis, multiply
from .linalg import LinearSolver, Subspace, columns_to_matrix, rref


class DGAPresentation:
    """Generators with degrees together with the images of the differential.

    Generators missing from ``differentials`` are closed.  Values may be
    :class:`Element` instances over this presentation's algebra or callables
    taking the algebra and returning one.
    """

    def __init__(self, generators: Iterable[GeneratorSpec | tuple[str, int]],
                 differentials: Mapping[str, Element] | None = None, name: str | None = None):
        specs = [g if isinstance(g, GeneratorSpec) else GeneratorSpec(*g) for g in generators]
        self.algebra = GradedAlgebra(specs)
        self.name = name
        diffs = {}
        for gname, img in (differentials or {}).items():
            if gname not in self.algebra.index:
                raise KeyError(f"differential given for unknown generator {gname!r}")
            if callable(img) and not isinstance(img, Element):
                img = img(self.algebra)
            if isinstance(img, int) and img == 0:
                img = self.algebra.zero()
            if not isinstance(img, Element):
                raise TypeError(f"differential of {gname!r} is not an Element")
            if img.algebra != self.algebra:
                img = _rebase(img, self.algebra)
            diffs[gname] = img
        self.differentials: dict[str, Element] = {
            g.name: diffs.get(g.name, self.algebra.zero()) for g in self.algebra.declared
        }
        self._dgen = tuple(self.differentials[n] for n in self.algebra.names)
        self._dmono: dict[Monomial, Element] = {}
        self._cohomology: dict[int, CohomologySlice] = {}
        self._dmatrix: dict[int, list[list[Fraction]]] = {}

    @property
    def generators(self) -> tuple[GeneratorSpec, ...]:
        return self.algebra.declared

    def gen(self, name: str) -> Element:
        return self.algebra.gen(name)

    def gens(self, *names: str) -> list[Element]:
        return self.algebra.gens(*names)

    def one(self) -> Element:
        return self.algebra.one()

    def zero(self) -> Element:
        return self.algebra.zero()

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"<DGAPresentation{label}: {len(self.generators)} generators>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DGAPresentation):
            return NotImplemented
        return self.algebra == other.algebra and self.differentials == other.differentials

    def __hash__(self):
        return hash(self.algebra)

    # --- differential -------------------------------------------------
    def d_monomial(self, mono: Monomial) -> Element:
        cached = self._dmono.get(mono)
        if cached is not None:
            return cached
        alg = self.algebra
        total = alg.zero()
        prefix_deg = 0
        for k, e in enumerate(mono):
            if not e:
                continue
            dg = self._dgen[k]
            if dg:
                prefix = list(mono[:k]) + [0] * (alg.ngens - k)
                suffix = [0] * (k + 1) + list(mono[k + 1:])
                if alg.odd[k]:
                    middle = dg
                else:
                    low = [0] * alg.ngens
                    low[k] = e - 1
                    middle = Element(alg, {tuple(low): Fraction(e)}) * dg
                term = Element(alg, {tuple(prefix): Fraction(1)}) * middle * Element(alg, {tuple(suffix): Fraction(1)})
                if prefix_deg % 2:
                    term = -term
                total = total + term
            prefix_deg += e * alg.degrees[k]
        self._dmono[mono] = total
        return total

    def d(self, e: Element) -> Element:
        if e.algebra != self.algebra:
            raise ValueError("element does not belong to this presentation")
        terms: dict[Monomial, Fraction] = {}
        for mono, c in e.items():
            for m2, c2 in self.d_monomial(mono).items():
                terms[m2] = terms.get(m2, 0) + c * c2
        return Element(self.algebra, terms)

    def d_matrix(self, degree: int) -> list[list[Fraction]]:
        """Matrix of d from degree ``degree`` to ``degree + 1`` in monomial bases."""
        cached = self._dmatrix.get(degree)
        if cached is not None:
            return cached
        src = monomial_basis(self, degree)
        tgt = monomial_basis(self, degree + 1)
        cols = [tgt.vector(self.d_monomial(m)) for m in src.basis]
        mat = columns_to_matrix(cols, tgt.dim) if cols else [[] for _ in range(tgt.dim)]
        self._dmatrix[degree] = mat
        return mat

    def cohomology(self, degree: int) -> "CohomologySlice":
        cached = self._cohomology.get(degree)
        if cached is None:
            cached = CohomologySlice(self, degree)
            self._cohomology[degree] = cached
        return cached

    # convenience wrappers
    def class_of(self, e: Element) -> "CohClass":
        deg = e.degree()
        if deg is None:
            if e.is_zero():
                raise ValueError("zero element has no degree; use CohClass.zero")
            raise ValueError(f"element {e} is not homogeneous")
        return self.cohomology(deg).class_of(e)

    def rep(self, cls: "CohClass") -> Element:
        return self.cohomology(cls.degree).representative(cls)


def _rebase(e: Element, alg: GradedAlgebra) -> Element:
    """Move an element to an algebra with the same generator names."""
    return dga_homomorphism_apply({n: alg.gen(n) for n in e.algebra.names}, e, target=alg)


def differential(p: DGAPresentation, e: Element) -> Element:
    return p.d(e)


@dataclass(frozen=True)
class CohClass:
    """A cohomology class as coordinates in the chosen basis of H^degree."""

    degree: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    @classmethod
    def zero(cls, p: DGAPresentation, degree: int) -> "CohClass":
        return cls(degree, (Fraction(0),) * p.cohomology(degree).dim)

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "CohClass") -> "CohClass":
        if self.degree != other.degree or len(self.coords) != len(other.coords):
            raise ValueError("adding classes of different degrees")
        return CohClass(self.degree, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "CohClass":
        return CohClass(self.degree, tuple(-a for a in self.coords))

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def scale(self, c) -> "CohClass":
        c = Fraction(c)
        return CohClass(self.degree, tuple(c * a for a in self.coords))

    def __rmul__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(c)
        return NotImplemented

    def to_json(self):
        return {"degree": self.degree, "coords": [str(c) for c in self.coords]}


class CohomologySlice:
    """H^degree with deterministic cocycle representatives.

    Representatives are the kernel basis vectors that become pivots when the
    image basis is listed first and the whole family is row reduced.
    """

    def __init__(self, p: DGAPresentation, degree: int):
        self.presentation = p
        self.degree = degree
        self.slice: LinearSlice = monomial_basis(p, degree)
        n = self.slice.dim
        dout = p.d_matrix(degree)
        kernel = LinearSolver(dout, ncols=n).kernel() if n else []
        if degree >= 1:
            din = p.d_matrix(degree - 1)
            prev_dim = len(monomial_basis(p, degree - 1))
            self._din_solver = LinearSolver(din, ncols=prev_dim)
            _, piv = rref(din) if din and prev_dim else ([], [])
            image = [[din[r][c] for r in range(n)] for c in piv]
        else:
            self._din_solver = None
            image = []
        self.kernel_dim = len(kernel)
        self.image_dim = len(image)
        family = image + [list(v) for v in kernel]
        # columns of the family matrix are the vectors; pivots pick a complement
        if family:
            _, piv = rref(columns_to_matrix(family, n))
        else:
            piv = []
        chosen = [family[c] for c in piv if c >= len(image)]
        self.representatives: tuple[Element, ...] = tuple(self.slice.element(v) for v in chosen)
        self.dim = len(chosen)
        if self.dim != self.kernel_dim - self.image_dim:
            raise AssertionError("rank-nullity failure in cohomology computation")
        basis = image + chosen
        self._coord_solver = LinearSolver(columns_to_matrix(basis, n), ncols=len(basis)) if basis else None
        self._nimage = len(image)

    def __len__(self) -> int:
        return self.dim

    def basis_classes(self) -> list[CohClass]:
        out = []
        for i in range(self.dim):
            v = [Fraction(0)] * self.dim
            v[i] = Fraction(1)
            out.append(CohClass(self.degree, tuple(v)))
        return out

    def zero_class(self) -> CohClass:
        return CohClass(self.degree, (Fraction(0),) * self.dim)

    def is_closed(self, e: Element) -> bool:
        return self.presentation.d(e).is_zero()

    def class_of(self, e: Element) -> CohClass:
        if e.is_zero():
            return self.zero_class()
        if e.degree() != self.degree:
            raise ValueError(f"element {e} is not homogeneous of degree {self.degree}")
        if not self.is_closed(e):
            raise ValueError(f"element {e} is not closed")
        if self._coord_solver is None:
            return self.zero_class()
        x = self._coord_solver.solve(self.slice.vector(e))
        if x is None:
            raise AssertionError("closed element outside the kernel span")
        return CohClass(self.degree, tuple(x[self._nimage:]))

    def representative(self, cls: CohClass) -> Element:
        if cls.degree != self.degree or len(cls.coords) != self.dim:
            raise ValueError("class does not belong to this slice")
        out = self.presentation.zero()
        for c, r in zip(cls.coords, self.representatives):
            if c:
                out = out + r.scale(c)
        return out

    def primitive(self, e: Element) -> Element | None:
        """Some b with d b = e, or None when e is not exact."""
        if e.is_zero():
            if self.degree == 0:
                return self.presentation.zero()
            return self.presentation.zero()
        if self._din_solver is None:
            return None
        x = self._din_solver.solve(self.slice.vector(e))
        if x is None:
            return None
        return monomial_basis(self.presentation, self.degree - 1).element(x)


class NotClosedError(ValueError):
    pass


def cohomology(p: DGAPresentation, degree: int) -> CohomologySlice:
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    return p.cohomology(degree)


def is_exact(p: DGAPresentation, e: Element) -> Element | None:
    """Return a primitive of the closed element ``e`` or None."""
    if e.is_zero():
        return p.zero()
    deg = e.degree()
    if deg is None:
        raise ValueError(f"element {e} is not homogeneous")
    if not p.d(e).is_zero():
        raise NotClosedError(f"element {e} is not closed")
    return p.cohomology(deg).primitive(e)


def cup(p: DGAPresentation, u: CohClass, v: CohClass) -> CohClass:
    prod = p.rep(u) * p.rep(v)
    deg = u.degree + v.degree
    return p.cohomology(deg).class_of(prod)


@dataclass
class DecomposableSubspace:
    degree: int
    ambient_dim: int
    subspace: Subspace

    @property
    def basis(self) -> tuple[tuple[Fraction, ...], ...]:
        return self.subspace.basis

    @property
    def dim(self) -> int:
        return self.subspace.rank

    def contains(self, cls: CohClass) -> bool:
        if cls.degree != self.degree:
            raise ValueError("class of the wrong degree")
        return self.subspace.contains(cls.coords)

    def classes(self) -> list[CohClass]:
        return [CohClass(self.degree, v) for v in self.basis]


def decomposable_subspace(p: DGAPresentation, degree: int) -> DecomposableSubspace:
    """Span of all products H^a . H^b with a, b >= 1 and a + b = degree."""
    target = p.cohomology(degree)
    vecs = []
    for a in range(1, degree):
        b = degree - a
        if a > b:
            break
        left = p.cohomology(a).representatives
        right = p.cohomology(b).representatives
        for x in left:
            for y in right:
                prod = x * y
                if prod:
                    vecs.append(target.class_of(prod).coords)
    return DecomposableSubspace(degree, target.dim, Subspace(target.dim, vecs))


def _fresh_name(name: str, taken: set[str]) -> str:
    while name in taken:
        name = name + "_"
    return name


def tensor_product(p: DGAPresentation, q: DGAPresentation, name: str | None = None) -> DGAPresentation:
    """Tensor product of presentations; clashing names in ``q`` get a trailing underscore."""
    taken = {g.name for g in p.generators}
    rename = {}
    for g in q.generators:
        new = _fresh_name(g.name, taken)
        rename[g.name] = new
        taken.add(new)
    gens = list(p.generators) + [GeneratorSpec(rename[g.name], g.degree) for g in q.generators]
    alg = GradedAlgebra(gens)
    from_p = {n: alg.gen(n) for n in p.algebra.names}
    from_q = {n: alg.gen(rename[n]) for n in q.algebra.names}
    diffs = {}
    for n, img in p.differentials.items():
        diffs[n] = dga_homomorphism_apply(from_p, img, target=alg)
    for n, img in q.differentials.items():
        diffs[rename[n]] = dga_homomorphism_apply(from_q, img, target=alg)
    if name is None and p.name and q.name:
        name = f"{p.name}*{q.name}"
    return DGAPresentation(gens, diffs, name=name)


def dga_homomorphism_apply(images: Mapping[str, object], e: Element, target=None):
    """Extend a generator assignment multiplicatively and linearly to ``e``.

    ``target`` is anything with ``one()`` and ``zero()`` whose elements
    support ``+``, ``*`` and ``scale``; it defaults to the algebra of the first
    image.
    """
    if target is None:
        first = next(iter(images.values()), None)
        if first is None:
            raise ValueError("cannot infer the target of an empty map")
        target = getattr(first, "algebra", None) or getattr(first, "ring")
    alg = e.algebra
    result = target.zero()
    power_cache: dict[tuple[int, int], object] = {}
    for mono, c in e.items():
        term = target.one()
        for k, ex in enumerate(mono):
            if not ex:
                continue
            key = (k, ex)
            pw = power_cache.get(key)
            if pw is None:
                name = alg.names[k]
                if name not in images:
                    raise KeyError(f"map does not define generator {name!r}")
                pw = target.one()
                for _ in range(ex):
                    pw = pw * images[name]
                power_cache[key] = pw
            term = term * pw
        result = result + term.scale(c)
    return result


class CohomologyRing:
    """H*(p) truncated at ``cap``, viewed as a DGA with zero differential."""

    def __init__(self, p: DGAPresentation, cap: int):
        self.presentation = p
        self.cap = cap

    def one(self) -> "RingElement":
        return RingElement(self, {0: (Fraction(1),)})

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def element(self, cls: CohClass) -> "RingElement":
        return RingElement(self, {cls.degree: cls.coords})

    def basis_element(self, degree: int, i: int) -> "RingElement":
        return self.element(self.presentation.cohomology(degree).basis_classes()[i])

    def d(self, x: "RingElement") -> "RingElement":
        return self.zero()


class RingElement:
    __slots__ = ("ring", "parts")

    def __init__(self, ring: CohomologyRing, parts: Mapping[int, Sequence[Fraction]]):
        self.ring = ring
        self.parts = {k: tuple(Fraction(c) for c in v) for k, v in parts.items() if any(v) and k <= ring.cap}

    def is_zero(self) -> bool:
        return not self.parts

    def __bool__(self):
        return bool(self.parts)

    def degree(self) -> int | None:
        return next(iter(self.parts)) if len(self.parts) == 1 else None

    def cls(self, degree: int | None = None) -> CohClass:
        p = self.ring.presentation
        if degree is None:
            degree = self.degree()
            if degree is None:
                raise ValueError("element is zero or inhomogeneous; give a degree")
        coords = self.parts.get(degree)
        return CohClass(degree, coords) if coords else CohClass.zero(p, degree)

    def __add__(self, other: "RingElement") -> "RingElement":
        parts = dict(self.parts)
        for k, v in other.parts.items():
            if k in parts:
                parts[k] = tuple(a + b for a, b in zip(parts[k], v))
            else:
                parts[k] = v
        return RingElement(self.ring, parts)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "RingElement":
        c = Fraction(c)
        return RingElement(self.ring, {k: tuple(c * a for a in v) for k, v in self.parts.items()})

    def __mul__(self, other: "RingElement") -> "RingElement":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        p = self.ring.presentation
        out = self.ring.zero()
        for k1, v1 in self.parts.items():
            for k2, v2 in other.parts.items():
                if k1 + k2 > self.ring.cap:
                    continue
                u = cup(p, CohClass(k1, v1), CohClass(k2, v2))
                out = out + RingElement(self.ring, {k1 + k2: u.coords})
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return self.is_zero()
        return isinstance(other, RingElement) and self.parts == other.parts

    def __hash__(self):
        return hash(tuple(sorted(self.parts.items())))

    def __repr__(self):
        return f"RingElement({self.parts})"


class HomomorphismError(ValueError):
    pass


@dataclass
class DGAHomomorphism:
    """A map of DGAs out of a free presentation, given on generators.

    ``target`` is either a :class:`DGAPresentation` or a
    :class:`CohomologyRing` (zero differential).
    """

    source: DGAPresentation
    target: object
    images: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for g in self.source.generators:
            if g.name not in self.images:
                raise HomomorphismError(f"no image given for generator {g.name!r}")
            img = self.images[g.name]
            if img:
                deg = img.degree()
                if deg != g.degree:
                    raise HomomorphismError(
                        f"image of {g.name!r} has degree {deg}, expected {g.degree}")
        for g in self.source.generators:
            lhs = self.apply(self.source.differentials[g.name])
            rhs = self._target_d(self.images[g.name])
            if not (lhs - rhs).is_zero():
                raise HomomorphismError(f"map does not commute with d on generator {g.name!r}")

    @property
    def _target_ring(self):
        if isinstance(self.target, DGAPresentation):
            return self.target.algebra
        return self.target

    def _target_d(self, x):
        return self.target.d(x)

    def apply(self, e: Element):
        return dga_homomorphism_apply(self.images, e, target=self._target_ring)

    __call__ = apply

    @classmethod
    def identity(cls, p: DGAPresentation) -> "DGAHomomorphism":
        return cls(p, p, {n: p.gen(n) for n in p.algebra.names})


@dataclass
class ValidationReport:
    d_squared_zero: bool
    d_squared_failures: list[str]
    homogeneous: bool
    homogeneity_failures: list[str]
    reducible: bool
    ordered: bool
    minimal: bool
    cap: int
    connected: bool
    simply_connected: bool
    betti: dict[int, int]

    @property
    def ok(self) -> bool:
        return self.d_squared_zero and self.homogeneous

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "d_squared_zero": self.d_squared_zero,
            "d_squared_failures": self.d_squared_failures,
            "homogeneous": self.homogeneous,
            "homogeneity_failures": self.homogeneity_failures,
            "reducible": self.reducible,
            "ordered": self.ordered,
            "minimal": self.minimal,
            "checked_up_to_degree": self.cap,
            "connected": self.connected,
            "simply_connected": self.simply_connected,
            "betti": {str(k): v for k, v in sorted(self.betti.items())},
        }


def validate(p: DGAPresentation, cap: int | None = None) -> ValidationReport:
    alg = p.algebra
    if cap is None:
        cap = max(alg.degrees, default=0) + 1
    sq_fail, hom_fail = [], []
    for g in alg.generators:
        img = p.differentials[g.name]
        if img and img.degrees() != {g.degree + 1}:
            hom_fail.append(g.name)
        if p.d(img):
            sq_fail.append(g.name)
    # reducible: no linear terms in any differential image
    reducible = all(sum(m) != 1 for g in alg.generators for m, _ in p.differentials[g.name].items())
    # nilpotence of the generator order: greedy topological sort
    placed: set[str] = set()
    remaining = [g.name for g in alg.declared]
    progress = True
    while remaining and progress:
        progress = False
        for n in list(remaining):
            if p.differentials[n].support_generators() <= placed:
                placed.add(n)
                remaining.remove(n)
                progress = True
    ordered = not remaining
    betti = {}
    homogeneous = not hom_fail
    if homogeneous:
        for k in range(0, cap + 1):
            betti[k] = p.cohomology(k).dim
    connected = betti.get(0) == 1 if homogeneous else False
    simply_connected = connected and betti.get(1, 0) == 0
    return ValidationReport(
        d_squared_zero=not sq_fail,
        d_squared_failures=sq_fail,
        homogeneous=homogeneous,
        homogeneity_failures=hom_fail,
        reducible=reducible,
        ordered=ordered,
        minimal=reducible and ordered and homogeneous,
        cap=cap,
        connected=connected,
        simply_connected=simply_connected,
        betti=betti,
    )
