"""Builders for the standard example algebras and the weight grading on Witt models."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .dga import DGAPresentation, tensor_product
from .gca import Element, GeneratorSpec
from .linalg import Subspace


class LieAlgebraError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class LieAlgebraSpec:
    """Structure constants ``[e_i, e_j] = sum_k c[(i, j)][k] e_k`` (1-indexed)."""

    def __init__(self, dimension: int, brackets: Mapping[tuple[int, int], Mapping[int, object]]):
        self.dimension = dimension
        table: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), vec in brackets.items():
            if not (1 <= i <= dimension and 1 <= j <= dimension):
                raise LieAlgebraError(f"bracket index out of range: ({i},{j})", (i, j))
            clean = {k: Fraction(c) for k, c in vec.items() if Fraction(c)}
            for k in clean:
                if not 1 <= k <= dimension:
                    raise LieAlgebraError(f"basis index {k} out of range", (i, j))
            if i == j:
                if clean:
                    raise LieAlgebraError(f"[e{i},e{i}] must vanish", (i, i))
                continue
            a, b, s = (i, j, 1) if i < j else (j, i, -1)
            signed = {k: s * c for k, c in clean.items()}
            prev = table.get((a, b))
            if prev is not None and prev != signed:
                raise LieAlgebraError(f"brackets ({a},{b}) and ({b},{a}) are not antisymmetric", (a, b))
            table[(a, b)] = signed
        self._table = table

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return dict(self._table.get((i, j), {}))
        return {k: -c for k, c in self._table.get((j, i), {}).items()}

    def bracket(self, u: Mapping[int, Fraction], v: Mapping[int, Fraction]) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.bracket_basis(i, j).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def jacobi_failure(self):
        n = self.dimension
        for i, j, k in combinations(range(1, n + 1), 3):
            ei, ej, ek = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
            total: dict[int, Fraction] = {}
            for x, y, z in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
                for idx, c in self.bracket(self.bracket(x, y), z).items():
                    total[idx] = total.get(idx, 0) + c
            if any(total.values()):
                return (i, j, k)
        return None

    def lower_central_series(self) -> list[int]:
        """Dimensions of g, [g,g], [g,[g,g]], ... until they stabilize."""
        n = self.dimension
        current = Subspace(n, [[Fraction(int(r == c)) for c in range(n)] for r in range(n)])
        dims = [current.rank]
        while current.rank:
            vecs = []
            for i in range(1, n + 1):
                for row in current.basis:
                    u = {k + 1: c for k, c in enumerate(row) if c}
                    w = self.bracket({i: Fraction(1)}, u)
                    vecs.append([w.get(k + 1, Fraction(0)) for k in range(n)])
            nxt = Subspace(n, vecs)
            if nxt.rank == current.rank:
                break
            current = nxt
            dims.append(current.rank)
        return dims

    def is_nilpotent(self) -> bool:
        return self.lower_central_series()[-1] == 0

    def check(self):
        w = self.jacobi_failure()
        if w is not None:
            raise LieAlgebraError(f"Jacobi identity fails on e{w[0]}, e{w[1]}, e{w[2]}", w)
        series = self.lower_central_series()
        if series[-1] != 0:
            raise LieAlgebraError(
                f"not nilpotent: lower central series stalls at dimension {series[-1]}", tuple(series))


def chevalley_eilenberg(spec: LieAlgebraSpec, prefix: str = "a", names: list[str] | None = None,
                        check: bool = True) -> DGAPresentation:
    """Dual complex with ``d a_k = sum_{i<j} c_k^{ij} a_i a_j``."""
    if check:
        spec.check()
    n = spec.dimension
    names = names or [f"{prefix}{k}" for k in range(1, n + 1)]
    gens = [GeneratorSpec(nm, 1) for nm in names]

    def build(alg):
        out = {nm: alg.zero() for nm in names}
        for (i, j), vec in spec._table.items():
            prod = alg.gen(names[i - 1]) * alg.gen(names[j - 1])
            for k, c in vec.items():
                out[names[k - 1]] = out[names[k - 1]] + prod.scale(c)
        return out

    tmp = DGAPresentation(gens)
    return DGAPresentation(gens, build(tmp.algebra))


def heisenberg() -> DGAPresentation:
    gens = [GeneratorSpec(n, 1) for n in ("a1", "a2", "a3")]
    return DGAPresentation(gens, {"a3": lambda A: A.gen("a1") * A.gen("a2")}, name="heisenberg")


def generalized_heisenberg(n: int) -> DGAPresentation:
    if n < 1:
        raise ValueError("n must be at least 1")
    names = []
    for i in range(1, n + 1):
        names += [f"alpha{i}p", f"alpha{i}m"]
    gens = [GeneratorSpec(nm, 1) for nm in names] + [GeneratorSpec("beta", 1)]

    def dbeta(A):
        out = A.zero()
        for i in range(1, n + 1):
            out = out + A.gen(f"alpha{i}p") * A.gen(f"alpha{i}m")
        return out

    return DGAPresentation(gens, {"beta": dbeta}, name=f"generalized_heisenberg({n})")


def witt_brackets(n: int) -> LieAlgebraSpec:
    """``[e_i, e_j] = (j - i) e_{i+j}`` for ``i + j <= n``."""
    table = {}
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if i + j <= n:
                table[(i, j)] = {i + j: j - i}
    return LieAlgebraSpec(n, table)


def witt_model(n: int) -> DGAPresentation:
    if n < 3:
        raise ValueError("n must be at least 3")
    names = [f"w{k}" for k in range(1, n + 1)]
    gens = [GeneratorSpec(nm, 1) for nm in names]

    def builder(k):
        def f(A):
            out = A.zero()
            for i in range(1, k):
                j = k - i
                if i < j:
                    out = out + (A.gen(f"w{i}") * A.gen(f"w{j}")).scale(k - 2 * i)
            return out
        return f

    return DGAPresentation(gens, {f"w{k}": builder(k) for k in range(3, n + 1)}, name=f"witt({n})")


def symplectic_class(m: int, p: DGAPresentation | None = None) -> Element:
    """The closed 2-form sum_i (2(m-i)+1) w_i w_{2m-i+1} on witt_model(2m)."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if p is None:
        p = witt_model(2 * m)
    A = p.algebra
    out = A.zero()
    for i in range(1, m + 1):
        out = out + (A.gen(f"w{i}") * A.gen(f"w{2 * m - i + 1}")).scale(2 * (m - i) + 1)
    return out


def sphere_model(n: int) -> DGAPresentation:
    if n < 2:
        raise ValueError("n must be at least 2")
    if n % 2:
        return DGAPresentation([GeneratorSpec("x", n)], name=f"S{n}")
    return DGAPresentation([GeneratorSpec("x", n), GeneratorSpec("y", 2 * n - 1)],
                           {"y": lambda A: A.gen("x") ** 2}, name=f"S{n}")


def circle_model() -> DGAPresentation:
    return DGAPresentation([GeneratorSpec("t", 1)], name="circle")


def point_model() -> DGAPresentation:
    return DGAPresentation([], name="point")


def kodaira_thurston() -> DGAPresentation:
    p = tensor_product(heisenberg(), circle_model())
    p.name = "kodaira_thurston"
    return p


# --- weight grading and filtration on Witt models --------------------------

_WITT_NAME = re.compile(r"^w(\d+)$")


def witt_index(name: str) -> int:
    m = _WITT_NAME.match(name)
    if not m:
        raise ValueError(f"generator {name!r} is not a Witt generator")
    return int(m.group(1))


@dataclass(frozen=True)
class BigradedElementView:
    element: Element
    deg1: int | None
    deg2: int | None
    deg2_multiset: tuple[int, ...]
    filtration_level: int


def _mono_weights(e: Element):
    names = e.algebra.names
    idx = [witt_index(n) for n in names]
    for mono, _ in e.items():
        yield sum(mono), sum(k * x for k, x in zip(idx, mono)), max((i for i, x in zip(idx, mono) if x), default=0)


def filtration_level(e: Element) -> int:
    """Smallest k with e in the subalgebra on w1..wk (0 for the zero element)."""
    if e.is_zero():
        return 0
    return max(1, max(top for _, _, top in _mono_weights(e)))


def bigrade(e: Element) -> BigradedElementView:
    data = list(_mono_weights(e))
    d1s = {d1 for d1, _, _ in data}
    d2s = sorted({d2 for _, d2, _ in data})
    return BigradedElementView(
        element=e,
        deg1=d1s.pop() if len(d1s) == 1 else None,
        deg2=d2s[0] if len(d2s) == 1 else None,
        deg2_multiset=tuple(d2s),
        filtration_level=filtration_level(e),
    )


def check_filtration_product(a: Element, b: Element) -> bool:
    return filtration_level(a * b) <= max(filtration_level(a), filtration_level(b))


def check_filtration_differential(p: DGAPresentation, a: Element) -> dict:
    """Compare f(d a) with f(a).

    ``strict_drop`` is the general claim f(d a) < f(a).  For deg1 = 1 the
    sharper claim f(d a) = f(a) - 1 is reported under ``exact_drop``; it only
    makes sense when f(a) >= 3 since w1 and w2 are closed.
    """
    fa = filtration_level(a)
    fda = filtration_level(p.d(a))
    view = bigrade(a)
    out = {"f": fa, "f_d": fda, "strict_drop": fda < fa or (fa == 0)}
    if view.deg1 == 1:
        out["exact_drop"] = fda == fa - 1 if fa >= 3 else None
    return out


def symplectic_connection_matrix(m: int, p: DGAPresentation | None = None):
    """The (2m+2)x(2m+2) connection on witt_model(2m) whose curvature is the symplectic class.

    Entries (i, j) with i <= 2m, j <= 2m+1 are (j - 2 - m) w_{j-i}; the last
    column holds w_{2m+2-i} in rows i >= 2.
    """
    from .connection import FormMatrix

    if p is None:
        p = witt_model(2 * m)
    A = p.algebra
    n = 2 * m + 2
    entries = {}
    for i in range(1, 2 * m + 1):
        for j in range(i + 1, 2 * m + 2):
            c = j - 2 - m
            if c:
                entries[(i, j)] = A.gen(f"w{j - i}").scale(c)
    for i in range(2, 2 * m + 2):
        entries[(i, n)] = A.gen(f"w{2 * m + 2 - i}")
    return FormMatrix(A, n, entries)
