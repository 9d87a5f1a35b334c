"""Defining systems and Massey products, ordinary and matrix.

Conventions
-----------
A defining system ``X(i, j)`` satisfies ``d X(i,j) = sum_r Xbar(i,r) X(r+1,j)``
and has cocycle ``c(A) = sum_r Xbar(1,r) X(r+1,n)``.  The *classical* value is
``[c(A)]``.  The *generalized* value is the class of the curvature corner
``mu(A) = dA - Abar A`` of the block matrix, which is ``-[c(A)]``.
Triple products report the generalized value as ``value`` and the classical
one as ``classical_value``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .dga import CohClass, DGAPresentation, decomposable_subspace
from .gca import Element
from .linalg import Subspace

DEFAULT_GRID = (0, 1, -1, 2, -2)


class UndefinedProduct(ValueError):
    """Raised when some required cup product or sub-product obstruction is nonzero."""

    def __init__(self, message: str, position=None):
        super().__init__(message)
        self.position = position


class InvariantViolation(ValueError):
    def __init__(self, message: str, failures=None):
        super().__init__(message)
        self.failures = failures or []


class BudgetExhausted(RuntimeError):
    pass


# --- matrices of elements -------------------------------------------------

class EMatrix:
    """A rectangular matrix of (homogeneous) algebra elements."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        self.entries = tuple(tuple(r) for r in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        if any(len(r) != self.cols for r in self.entries):
            raise ValueError("ragged matrix")

    @classmethod
    def zeros(cls, zero, rows: int, cols: int) -> "EMatrix":
        return cls([[zero] * cols for _ in range(rows)])

    def __getitem__(self, rc):
        r, c = rc
        return self.entries[r][c]

    def map(self, f) -> "EMatrix":
        return EMatrix([[f(x) for x in row] for row in self.entries])

    def bar(self) -> "EMatrix":
        return self.map(lambda x: x.bar())

    def d(self, p) -> "EMatrix":
        return self.map(p.d)

    def __add__(self, other: "EMatrix") -> "EMatrix":
        self._same_shape(other)
        return EMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "EMatrix") -> "EMatrix":
        self._same_shape(other)
        return EMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self):
        return self.map(lambda x: -x)

    def scale(self, c) -> "EMatrix":
        return self.map(lambda x: x.scale(c))

    def __mul__(self, other: "EMatrix") -> "EMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        out = []
        for r in range(self.rows):
            row = []
            for c in range(other.cols):
                acc = None
                for k in range(self.cols):
                    a = self.entries[r][k]
                    b = other.entries[k][c]
                    if a.is_zero() or b.is_zero():
                        continue
                    t = a * b
                    acc = t if acc is None else acc + t
                if acc is None:
                    acc = _zero_like(self.entries[r][0] if self.cols else other.entries[0][c])
                row.append(acc)
            out.append(row)
        return EMatrix(out)

    def _same_shape(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def __eq__(self, other) -> bool:
        return isinstance(other, EMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(x) for x in row) for row in self.entries) + "]"

    __repr__ = __str__


def _zero_like(x):
    if isinstance(x, Element):
        return x.algebra.zero()
    return x.zero_like()


# --- matrices of classes --------------------------------------------------

@dataclass(frozen=True)
class ClassMatrix:
    """A rectangular matrix of positive-degree cohomology classes."""

    entries: tuple[tuple[CohClass, ...], ...]

    def __post_init__(self):
        ents = tuple(tuple(r) for r in self.entries)
        object.__setattr__(self, "entries", ents)
        if not ents or not ents[0]:
            raise ValueError("class matrix must be nonempty")
        if any(len(r) != len(ents[0]) for r in ents):
            raise ValueError("ragged class matrix")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    @property
    def degrees(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(c.degree for c in row) for row in self.entries)

    def __getitem__(self, rc) -> CohClass:
        return self.entries[rc[0]][rc[1]]

    @classmethod
    def scalar(cls, c: CohClass) -> "ClassMatrix":
        return cls(((c,),))

    @classmethod
    def from_elements(cls, p: DGAPresentation, rows, degrees=None) -> "ClassMatrix":
        """Classes of closed elements; zero entries take their degree from ``degrees``."""
        out = []
        for r, row in enumerate(rows):
            cur = []
            for c, e in enumerate(row):
                if isinstance(e, int) and e == 0:
                    e = p.zero()
                if e.is_zero():
                    if degrees is None:
                        raise ValueError(f"entry ({r},{c}) is zero; its degree must be given")
                    cur.append(CohClass.zero(p, degrees[r][c]))
                else:
                    cur.append(p.class_of(e))
            out.append(cur)
        return cls(out)

    def is_scalar(self) -> bool:
        return self.rows == 1 and self.cols == 1

    def is_zero(self) -> bool:
        return all(c.is_zero() for row in self.entries for c in row)

    def representative(self, p: DGAPresentation) -> EMatrix:
        return EMatrix([[p.rep(c) for c in row] for row in self.entries])

    def flat(self) -> tuple[Fraction, ...]:
        return tuple(x for row in self.entries for c in row for x in c.coords)

    def scale(self, t) -> "ClassMatrix":
        return ClassMatrix(tuple(tuple(c.scale(t) for c in row) for row in self.entries))

    def __neg__(self):
        return self.scale(-1)

    def to_json(self):
        return [[c.to_json() for c in row] for row in self.entries]


def bar_class(c: CohClass) -> CohClass:
    return -c if c.degree % 2 else c


def multipliable(X: Sequence[Sequence[int]], Y: Sequence[Sequence[int]]) -> bool:
    """Degree-matrix test: inner sizes agree and deg x_ij + deg y_jk is independent of j."""
    q = len(X[0])
    if q != len(Y):
        return False
    for i in range(len(X)):
        for k in range(len(Y[0])):
            if len({X[i][j] + Y[j][k] for j in range(q)}) != 1:
                return False
    return True


def degree_star(X, Y):
    if not multipliable(X, Y):
        raise UndefinedProduct("degree matrices are not multipliable")
    return tuple(tuple(X[i][0] + Y[0][k] for k in range(len(Y[0]))) for i in range(len(X)))


def _shift(K, m):
    return tuple(tuple(x + m for x in row) for row in K)


def block_degrees(deg_mats: Sequence, i: int, j: int):
    """Degree matrix of X(i, j) (1-based): (D_i - 1) * ... * (D_j - 1) + 1."""
    acc = _shift(deg_mats[i - 1], -1)
    for r in range(i + 1, j + 1):
        acc = degree_star(acc, _shift(deg_mats[r - 1], -1))
    return _shift(acc, 1)


def product_degrees(deg_mats: Sequence):
    """Degree matrix of c(A): D_1 * ... * D_n - n + 2."""
    n = len(deg_mats)
    return _shift(block_degrees(deg_mats, 1, n), 1)


def check_multipliable(classes: Sequence[ClassMatrix]):
    for k in range(len(classes) - 1):
        if not multipliable(classes[k].degrees, classes[k + 1].degrees):
            raise UndefinedProduct(f"class matrices {k + 1} and {k + 2} are not multipliable", k + 1)
    for k, V in enumerate(classes):
        for row in V.entries:
            for c in row:
                if c.degree < 1:
                    raise ValueError(f"class matrix {k + 1} has an entry of degree {c.degree}")


# --- defining systems -----------------------------------------------------

@dataclass
class DefiningSystem:
    """Blocks ``X(i, j)`` for 1 <= i <= j <= n, (i, j) != (1, n), as :class:`EMatrix`."""

    arity: int
    blocks: dict[tuple[int, int], EMatrix]

    def __getitem__(self, ij) -> EMatrix:
        return self.blocks[ij]

    def positions(self) -> list[tuple[int, int]]:
        n = self.arity
        return [(i, i + k) for k in range(0, n - 1) for i in range(1, n - k + 1) if (i, i + k) != (1, n)]

    def cocycle(self) -> EMatrix:
        n = self.arity
        acc = None
        for r in range(1, n):
            t = self.blocks[(1, r)].bar() * self.blocks[(r + 1, n)]
            acc = t if acc is None else acc + t
        return acc

    def map(self, f) -> "DefiningSystem":
        return DefiningSystem(self.arity, {k: v.map(f) for k, v in self.blocks.items()})

    def with_block(self, ij, block: EMatrix) -> "DefiningSystem":
        b = dict(self.blocks)
        b[ij] = block
        return DefiningSystem(self.arity, b)

    def is_scalar(self) -> bool:
        return all(b.rows == 1 and b.cols == 1 for b in self.blocks.values())


@dataclass
class Failure:
    condition: int
    position: tuple[int, int]
    detail: str

    def to_json(self):
        return {"condition": self.condition, "position": list(self.position), "detail": self.detail}


@dataclass
class SystemCheck:
    ok: bool
    failures: list[Failure]

    def __bool__(self):
        return self.ok


def check_system(p: DGAPresentation, system: DefiningSystem,
                 classes: Sequence[ClassMatrix] | None = None) -> SystemCheck:
    """Check conditions 1-3 of a defining system; collects every failure."""
    n = system.arity
    failures: list[Failure] = []
    expected = {(i, i + k) for k in range(n - 1) for i in range(1, n - k + 1)} - {(1, n)}
    missing = expected - set(system.blocks)
    for pos in sorted(missing):
        failures.append(Failure(0, pos, "block missing"))
    if missing:
        return SystemCheck(False, failures)
    deg_mats = None
    if classes is not None:
        if len(classes) != n:
            failures.append(Failure(1, (0, 0), f"expected {n} class matrices, got {len(classes)}"))
            return SystemCheck(False, failures)
        deg_mats = [V.degrees for V in classes]
        for i in range(1, n + 1):
            X = system.blocks[(i, i)]
            V = classes[i - 1]
            if (X.rows, X.cols) != (V.rows, V.cols):
                failures.append(Failure(1, (i, i), "shape does not match the class matrix"))
                continue
            for r in range(X.rows):
                for c in range(X.cols):
                    e = X[r, c]
                    if p.d(e):
                        failures.append(Failure(1, (i, i), f"entry ({r + 1},{c + 1}) is not closed"))
                        continue
                    want = V[r, c]
                    got = p.cohomology(want.degree).class_of(e) if e else CohClass.zero(p, want.degree)
                    if e and e.degree() != want.degree:
                        failures.append(Failure(1, (i, i), f"entry ({r + 1},{c + 1}) has the wrong degree"))
                    elif got != want:
                        failures.append(Failure(1, (i, i), f"entry ({r + 1},{c + 1}) represents the wrong class"))
    for (i, j) in sorted(system.blocks, key=lambda ij: (ij[1] - ij[0], ij[0])):
        X = system.blocks[(i, j)]
        if deg_mats is not None:
            try:
                D = block_degrees(deg_mats, i, j)
            except UndefinedProduct as exc:
                failures.append(Failure(2, (i, j), str(exc)))
                continue
            for r in range(X.rows):
                for c in range(X.cols):
                    e = X[r, c]
                    if e and e.degrees() != {D[r][c]}:
                        failures.append(Failure(2, (i, j), f"entry ({r + 1},{c + 1}) should have degree {D[r][c]}"))
        if i == j:
            continue
        rhs = None
        for r in range(i, j):
            t = system.blocks[(i, r)].bar() * system.blocks[(r + 1, j)]
            rhs = t if rhs is None else rhs + t
        try:
            resid = X.d(p) - rhs
        except ValueError as exc:
            failures.append(Failure(3, (i, j), str(exc)))
            continue
        if not resid.is_zero():
            failures.append(Failure(3, (i, j), f"d X - sum Xbar X = {resid}"))
    return SystemCheck(not failures, failures)


def system_cocycle(p: DGAPresentation, system: DefiningSystem, classes=None, check: bool = True) -> EMatrix:
    if check:
        rep = check_system(p, system, classes)
        if not rep.ok:
            f = rep.failures[0]
            raise InvariantViolation(f"condition {f.condition} fails at {f.position}: {f.detail}", rep.failures)
    return system.cocycle()


def cocycle_classes(p: DGAPresentation, c: EMatrix, degrees) -> ClassMatrix:
    out = []
    for r in range(c.rows):
        row = []
        for k in range(c.cols):
            e = c[r, k]
            deg = degrees[r][k]
            if e and e.degree() != deg:
                raise InvariantViolation(f"cocycle entry ({r + 1},{k + 1}) has the wrong degree")
            if p.d(e):
                raise InvariantViolation(f"cocycle entry ({r + 1},{k + 1}) is not closed")
            row.append(p.cohomology(deg).class_of(e) if e else CohClass.zero(p, deg))
        out.append(row)
    return ClassMatrix(out)


# --- search ---------------------------------------------------------------

def _positions(n: int) -> list[tuple[int, int]]:
    return [(i, i + k) for k in range(1, n - 1) for i in range(1, n - k + 1)]


def _rhs(system_blocks, i, j):
    acc = None
    for r in range(i, j):
        t = system_blocks[(i, r)].bar() * system_blocks[(r + 1, j)]
        acc = t if acc is None else acc + t
    return acc


class SystemSearch:
    """Depth-first enumeration of defining systems.

    Diagonals are filled in increasing ``j - i``.  At each block the
    deterministic particular solution is shifted by integer combinations (from
    ``grid``) of cohomology representatives of the block's entry degrees.  The
    budget counts visited blocks.  Iterating yields complete systems; after
    iteration ``budget_exhausted`` tells whether the budget cut the search.
    """

    def __init__(self, p: DGAPresentation, classes: Sequence[ClassMatrix], budget: int = 10_000,
                 grid: Sequence[int] = DEFAULT_GRID, perturb: bool = True,
                 diagonal: Sequence[EMatrix] | None = None):
        self.p = p
        self.classes = list(classes)
        check_multipliable(self.classes)
        self.n = len(self.classes)
        if self.n < 2:
            raise ValueError("a Massey product needs at least two entries")
        self.deg_mats = [V.degrees for V in self.classes]
        self.budget = budget
        self.grid = tuple(Fraction(g) for g in grid)
        self.perturb = perturb
        self.nodes = 0
        self.budget_exhausted = False
        self.dead_ends: list[tuple[int, int]] = []
        self.positions = _positions(self.n)
        self.diagonal = {}
        for i, V in enumerate(self.classes, start=1):
            self.diagonal[(i, i)] = V.representative(p) if diagonal is None else diagonal[i - 1]

    def _perturbations(self, D):
        basis = []
        for r, row in enumerate(D):
            for c, deg in enumerate(row):
                for rep in self.p.cohomology(deg).representatives:
                    basis.append((r, c, rep))
        return basis

    def _solve(self, blocks, i, j):
        """Particular solution for X(i, j) or None when some entry is not exact."""
        rhs = _rhs(blocks, i, j)
        D = block_degrees(self.deg_mats, i, j)
        out = []
        for r in range(rhs.rows):
            row = []
            for c in range(rhs.cols):
                e = rhs[r, c]
                if e.is_zero():
                    row.append(self.p.zero())
                    continue
                if e.degrees() != {D[r][c] + 1}:
                    raise InvariantViolation(f"right-hand side at {(i, j)} has the wrong degree")
                prim = self.p.cohomology(D[r][c] + 1).primitive(e)
                if prim is None:
                    return None, D
                row.append(prim)
            out.append(row)
        return EMatrix(out), D

    def __iter__(self) -> Iterator[DefiningSystem]:
        blocks = dict(self.diagonal)
        yield from self._dfs(blocks, 0)

    def _dfs(self, blocks, k) -> Iterator[DefiningSystem]:
        if k == len(self.positions):
            yield DefiningSystem(self.n, dict(blocks))
            return
        i, j = self.positions[k]
        part, D = self._solve(blocks, i, j)
        if part is None:
            self.dead_ends.append((i, j))
            return
        basis = self._perturbations(D) if self.perturb else []
        combos = itertools.product(self.grid, repeat=len(basis)) if basis else [()]
        for combo in combos:
            if self.nodes >= self.budget:
                self.budget_exhausted = True
                return
            self.nodes += 1
            X = part
            if any(combo):
                ent = [list(row) for row in part.entries]
                for t, (r, c, rep) in zip(combo, basis):
                    if t:
                        ent[r][c] = ent[r][c] + rep.scale(t)
                X = EMatrix(ent)
            blocks[(i, j)] = X
            yield from self._dfs(blocks, k + 1)
            if self.budget_exhausted:
                return
        blocks.pop((i, j), None)


def enumerate_defining_systems(p, classes, budget=10_000, grid=DEFAULT_GRID, limit=None,
                               diagonal=None) -> list[DefiningSystem]:
    out = []
    for s in SystemSearch(p, classes, budget=budget, grid=grid, diagonal=diagonal):
        out.append(s)
        if limit is not None and len(out) >= limit:
            break
    return out


@dataclass
class SearchResult:
    system: DefiningSystem | None
    nodes: int
    budget_exhausted: bool
    dead_ends: list[tuple[int, int]] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.system is not None


def find_defining_system(p: DGAPresentation, classes: Sequence[ClassMatrix], budget: int = 10_000,
                         grid: Sequence[int] = DEFAULT_GRID, diagonal=None) -> SearchResult:
    search = SystemSearch(p, classes, budget=budget, grid=grid, diagonal=diagonal)
    for s in search:
        return SearchResult(s, search.nodes, False, search.dead_ends)
    return SearchResult(None, search.nodes, search.budget_exhausted, search.dead_ends)


# --- values ---------------------------------------------------------------

@dataclass
class MasseyValue:
    """One value of a product, in both sign conventions."""

    classical: ClassMatrix
    system: DefiningSystem
    cocycle: EMatrix

    @property
    def generalized(self) -> ClassMatrix:
        return -self.classical

    def classical_class(self) -> CohClass:
        return self.classical[0, 0]


def massey_value(p: DGAPresentation, classes: Sequence[ClassMatrix], system: DefiningSystem,
                 check: bool = True) -> MasseyValue:
    c = system_cocycle(p, system, classes if check else None, check=check)
    degs = product_degrees([V.degrees for V in classes])
    return MasseyValue(cocycle_classes(p, c, degs), system, c)


@dataclass
class ValueLayout:
    """Row-major flattening of a class matrix into one coordinate vector."""

    degrees: tuple[tuple[int, ...], ...]
    dims: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, p: DGAPresentation, degrees) -> "ValueLayout":
        return cls(tuple(tuple(r) for r in degrees),
                   tuple(tuple(p.cohomology(d).dim for d in row) for row in degrees))

    @property
    def size(self) -> int:
        return sum(sum(r) for r in self.dims)

    def offset(self, r: int, c: int) -> int:
        off = 0
        for rr in range(len(self.dims)):
            for cc in range(len(self.dims[0])):
                if (rr, cc) == (r, c):
                    return off
                off += self.dims[rr][cc]
        raise IndexError((r, c))

    def unflatten(self, v: Sequence[Fraction]) -> ClassMatrix:
        out, k = [], 0
        for r, row in enumerate(self.degrees):
            cur = []
            for c, d in enumerate(row):
                n = self.dims[r][c]
                cur.append(CohClass(d, tuple(v[k:k + n])))
                k += n
            out.append(cur)
        return ClassMatrix(out)

    def decomposables(self, p: DGAPresentation) -> Subspace:
        vecs = []
        for r, row in enumerate(self.degrees):
            for c, d in enumerate(row):
                off = self.offset(r, c)
                for b in decomposable_subspace(p, d).basis:
                    v = [Fraction(0)] * self.size
                    v[off:off + len(b)] = b
                    vecs.append(v)
        return Subspace(self.size, vecs)


def _as_class_matrix(x) -> ClassMatrix:
    return x if isinstance(x, ClassMatrix) else ClassMatrix.scalar(x)


@dataclass
class Indeterminacy:
    layout: ValueLayout
    subspace: Subspace

    @property
    def dim(self) -> int:
        return self.subspace.rank

    def contains(self, value) -> bool:
        return self.subspace.contains(_as_class_matrix(value).flat())


def matrix_triple_indeterminacy(p: DGAPresentation, V1, V2, V3) -> Indeterminacy:
    """Span of V1bar . Z2 + Z1bar . V3 over closed Z1, Z2 shaped like X(1,2), X(2,3)."""
    V1, V2, V3 = (_as_class_matrix(v) for v in (V1, V2, V3))
    classes = [V1, V2, V3]
    check_multipliable(classes)
    degs = [V.degrees for V in classes]
    D12 = block_degrees(degs, 1, 2)
    D23 = block_degrees(degs, 2, 3)
    layout = ValueLayout.of(p, product_degrees(degs))
    vecs = []

    def flat_of(M: EMatrix) -> list[Fraction]:
        v = []
        for r in range(M.rows):
            for c in range(M.cols):
                deg = layout.degrees[r][c]
                e = M[r, c]
                cls = p.cohomology(deg).class_of(e) if e else CohClass.zero(p, deg)
                v.extend(cls.coords)
        return v

    R1, R3 = V1.representative(p), V3.representative(p)
    zero = p.zero()
    for a, row in enumerate(D23):
        for b, deg in enumerate(row):
            for rep in p.cohomology(deg).representatives:
                Z = EMatrix.zeros(zero, len(D23), len(D23[0]))
                ent = [list(r) for r in Z.entries]
                ent[a][b] = rep
                vecs.append(flat_of(R1.bar() * EMatrix(ent)))
    for a, row in enumerate(D12):
        for b, deg in enumerate(row):
            for rep in p.cohomology(deg).representatives:
                ent = [[zero] * len(D12[0]) for _ in D12]
                ent[a][b] = rep
                vecs.append(flat_of(EMatrix(ent).bar() * R3))
    return Indeterminacy(layout, Subspace(layout.size, vecs))


@dataclass
class TripleProduct:
    classical_matrix: ClassMatrix
    indeterminacy: Indeterminacy
    system: DefiningSystem
    cocycle: EMatrix

    @property
    def generalized_matrix(self) -> ClassMatrix:
        return -self.classical_matrix

    @property
    def value(self):
        m = self.generalized_matrix
        return m[0, 0] if m.is_scalar() else m

    @property
    def classical_value(self):
        m = self.classical_matrix
        return m[0, 0] if m.is_scalar() else m

    @property
    def is_trivial(self) -> bool:
        return self.indeterminacy.contains(self.classical_matrix)

    def contains(self, claimed, convention: str = "generalized") -> bool:
        base = self.generalized_matrix if convention == "generalized" else self.classical_matrix
        if convention not in ("generalized", "classical"):
            raise ValueError(f"unknown convention {convention!r}")
        diff = [a - b for a, b in zip(_as_class_matrix(claimed).flat(), base.flat())]
        return self.indeterminacy.subspace.contains(diff)


def _check_cups(p, classes):
    for k in range(len(classes) - 1):
        A = classes[k].representative(p)
        B = classes[k + 1].representative(p)
        prod = A.bar() * B
        for r in range(prod.rows):
            for c in range(prod.cols):
                e = prod[r, c]
                if e:
                    deg = e.degree()
                    if p.cohomology(deg).primitive(e) is None:
                        raise UndefinedProduct(
                            f"cup product of entries {k + 1} and {k + 2} is nonzero at ({r + 1},{c + 1})",
                            (k + 1, k + 2))


def matrix_triple_product(p: DGAPresentation, V1, V2, V3) -> TripleProduct:
    classes = [_as_class_matrix(v) for v in (V1, V2, V3)]
    check_multipliable(classes)
    _check_cups(p, classes)
    res = find_defining_system(p, classes, budget=10, grid=(0,))
    if res.system is None:
        raise UndefinedProduct("no defining system exists")
    val = massey_value(p, classes, res.system)
    ind = matrix_triple_indeterminacy(p, *classes)
    return TripleProduct(val.classical, ind, res.system, val.cocycle)


def triple_product(p: DGAPresentation, alpha: CohClass, beta: CohClass, gamma: CohClass) -> TripleProduct:
    return matrix_triple_product(p, alpha, beta, gamma)


def triple_formula_value(p: DGAPresentation, a: Element, b: Element, c: Element) -> tuple[Element, Element, Element]:
    """Direct (f, g, tau) for df = (-1)^p ab, dg = (-1)^q bc and
    tau = (-1)^(p+1) a g + (-1)^(p+q) f c."""
    pdeg, qdeg = a.degree(), b.degree()
    rhs_f = (a * b).scale((-1) ** pdeg)
    rhs_g = (b * c).scale((-1) ** qdeg)
    f = p.cohomology(pdeg + qdeg).primitive(rhs_f) if rhs_f else p.zero()
    g = p.cohomology(qdeg + c.degree()).primitive(rhs_g) if rhs_g else p.zero()
    if f is None or g is None:
        raise UndefinedProduct("cup product obstruction is nonzero")
    tau = (a * g).scale((-1) ** (pdeg + 1)) + (f * c).scale((-1) ** (pdeg + qdeg))
    return f, g, tau


# --- certificates and reducibility ----------------------------------------

@dataclass
class MembershipReport:
    ok: bool
    failures: list[Failure]
    value: ClassMatrix | None

    def __bool__(self):
        return self.ok


def verify_membership(p: DGAPresentation, claimed, classes: Sequence, system: DefiningSystem,
                      convention: str = "classical") -> MembershipReport:
    """Check that ``system`` is a defining system for ``classes`` whose value is ``claimed``."""
    classes = [_as_class_matrix(v) for v in classes]
    try:
        check_multipliable(classes)
    except UndefinedProduct as exc:
        return MembershipReport(False, [Failure(2, (0, 0), str(exc))], None)
    chk = check_system(p, system, classes)
    if not chk.ok:
        return MembershipReport(False, chk.failures, None)
    val = massey_value(p, classes, system, check=False)
    got = val.classical if convention == "classical" else val.generalized
    want = _as_class_matrix(claimed)
    if got.flat() != want.flat() or got.degrees != want.degrees:
        return MembershipReport(False, [Failure(4, (1, system.arity), "value differs from the claimed class")], got)
    return MembershipReport(True, [], got)


def is_completely_reducible(p: DGAPresentation, value) -> bool:
    V = _as_class_matrix(value)
    for row in V.entries:
        for c in row:
            if not decomposable_subspace(p, c.degree).contains(c):
                return False
    return True


def is_strictly_irreducible(p: DGAPresentation, value, indeterminacy: Indeterminacy | Subspace | None) -> bool:
    """True iff value + indeterminacy misses the decomposables."""
    V = _as_class_matrix(value)
    layout = ValueLayout.of(p, V.degrees)
    space = layout.decomposables(p)
    if indeterminacy is not None:
        sub = indeterminacy.subspace if isinstance(indeterminacy, Indeterminacy) else indeterminacy
        space = space + sub
    return not space.contains(V.flat())


# --- parametric analysis --------------------------------------------------

ParamMono = tuple[tuple[int, int], ...]


def _pm_mul(a: ParamMono, b: ParamMono) -> ParamMono:
    d = dict(a)
    for k, e in b:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


class PolyElement:
    """An element whose coefficients are polynomials in search parameters."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, algebra, coeffs: dict[ParamMono, Element]):
        self.algebra = algebra
        self.coeffs = {m: e for m, e in coeffs.items() if e}

    @classmethod
    def const(cls, e: Element) -> "PolyElement":
        return cls(e.algebra, {(): e})

    def zero_like(self):
        return PolyElement(self.algebra, {})

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, e in other.coeffs.items():
            out[m] = out[m] + e if m in out else e
        return PolyElement(self.algebra, out)

    def __neg__(self):
        return PolyElement(self.algebra, {m: -e for m, e in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out: dict[ParamMono, Element] = {}
        for m1, e1 in self.coeffs.items():
            for m2, e2 in other.coeffs.items():
                m = _pm_mul(m1, m2)
                t = e1 * e2
                out[m] = out[m] + t if m in out else t
        return PolyElement(self.algebra, out)

    def bar(self):
        return PolyElement(self.algebra, {m: e.bar() for m, e in self.coeffs.items()})

    def scale(self, c):
        return PolyElement(self.algebra, {m: e.scale(c) for m, e in self.coeffs.items()})

    def degrees(self):
        out = set()
        for e in self.coeffs.values():
            out |= e.degrees()
        return out

    def __eq__(self, other):
        return isinstance(other, PolyElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))


class _PolyDiff:
    def __init__(self, p):
        self.p = p

    def d(self, x: PolyElement) -> PolyElement:
        return PolyElement(x.algebra, {m: self.p.d(e) for m, e in x.coeffs.items()})


@dataclass
class ParametricValue:
    """The classical value as a polynomial map of the perturbation parameters."""

    layout: ValueLayout
    constant: tuple[Fraction, ...]
    directions: tuple[tuple[Fraction, ...], ...]
    nparams: int
    system: DefiningSystem

    def contains_only_zero(self) -> bool:
        return not any(self.constant) and not self.directions

    def certifies_nontrivial(self) -> bool:
        """Constant term outside the span of the non-constant coefficients."""
        return not Subspace(self.layout.size, self.directions).contains(self.constant)

    def certifies_strictly_irreducible(self, p: DGAPresentation) -> bool:
        space = Subspace(self.layout.size, self.directions) + self.layout.decomposables(p)
        return not space.contains(self.constant)


def parametric_value(p: DGAPresentation, classes: Sequence) -> ParametricValue | None:
    """Solve for a defining system with symbolic perturbations at every block.

    Returns None if some block cannot be solved for all parameter values, in
    which case the budgeted search is the fallback.
    """
    classes = [_as_class_matrix(v) for v in classes]
    check_multipliable(classes)
    n = len(classes)
    degs = [V.degrees for V in classes]
    blocks: dict[tuple[int, int], EMatrix] = {}
    for i, V in enumerate(classes, start=1):
        blocks[(i, i)] = V.representative(p).map(PolyElement.const)
    nparams = 0
    pd = _PolyDiff(p)
    for (i, j) in _positions(n):
        rhs = _rhs(blocks, i, j)
        D = block_degrees(degs, i, j)
        ent = []
        for r in range(rhs.rows):
            row = []
            for c in range(rhs.cols):
                x = rhs[r, c]
                coeffs = {}
                for m, e in x.coeffs.items():
                    prim = p.cohomology(D[r][c] + 1).primitive(e)
                    if prim is None:
                        return None
                    coeffs[m] = prim
                for rep in p.cohomology(D[r][c]).representatives:
                    coeffs[((nparams, 1),)] = rep
                    nparams += 1
                row.append(PolyElement(p.algebra, coeffs))
            ent.append(row)
        X = EMatrix(ent)
        blocks[(i, j)] = X
        resid = X.map(pd.d) - rhs
        if not resid.is_zero():
            raise InvariantViolation(f"parametric solve failed at {(i, j)}")
    c = None
    for r in range(1, n):
        t = blocks[(1, r)].bar() * blocks[(r + 1, n)]
        c = t if c is None else c + t
    layout = ValueLayout.of(p, product_degrees(degs))
    by_mono: dict[ParamMono, list[Fraction]] = {}
    for r in range(c.rows):
        for k in range(c.cols):
            deg = layout.degrees[r][k]
            off = layout.offset(r, k)
            for m, e in c[r, k].coeffs.items():
                cls = p.cohomology(deg).class_of(e)
                v = by_mono.setdefault(m, [Fraction(0)] * layout.size)
                v[off:off + len(cls.coords)] = [a + b for a, b in zip(v[off:off + len(cls.coords)], cls.coords)]
    constant = tuple(by_mono.pop((), [Fraction(0)] * layout.size))
    directions = tuple(tuple(v) for _, v in sorted(by_mono.items()) if any(v))
    zero_sys = DefiningSystem(n, {k: v.map(lambda x: x.coeffs.get((), p.zero())) for k, v in blocks.items()})
    return ParametricValue(layout, constant, directions, nparams, zero_sys)


# --- strictness -----------------------------------------------------------

@dataclass
class StrictnessReport:
    verdict: bool | None
    details: list[dict]

    def to_json(self):
        return {"verdict": self.verdict, "details": self.details}


def is_strictly_defined(p: DGAPresentation, classes: Sequence, budget: int = 10_000,
                        grid: Sequence[int] = DEFAULT_GRID) -> StrictnessReport:
    """Every proper sub-product of length 2..n-1 must contain only zero.

    Returns verdict True, False or None (inconclusive at the budget).
    """
    classes = [_as_class_matrix(v) for v in classes]
    check_multipliable(classes)
    n = len(classes)
    _check_cups(p, classes)
    details = []
    verdict: bool | None = True
    for length in range(2, n):
        for i in range(0, n - length + 1):
            sub = classes[i:i + length]
            span = (i + 1, i + length)
            if length == 2:
                A = sub[0].representative(p)
                B = sub[1].representative(p)
                ok = all(not e or p.cohomology(e.degree()).primitive(e) is not None
                         for row in (A.bar() * B).entries for e in row)
                details.append({"span": list(span), "method": "cup", "zero_only": ok})
            elif length == 3:
                try:
                    tp = matrix_triple_product(p, *sub)
                except UndefinedProduct as exc:
                    raise UndefinedProduct(f"sub-product {span} is undefined: {exc}", span)
                ok = tp.classical_matrix.is_zero() and tp.indeterminacy.dim == 0
                details.append({"span": list(span), "method": "triple", "zero_only": ok})
            else:
                pv = parametric_value(p, sub)
                if pv is not None:
                    ok = pv.contains_only_zero()
                    details.append({"span": list(span), "method": "parametric", "zero_only": ok})
                else:
                    search = SystemSearch(p, sub, budget=budget, grid=grid)
                    ok = True
                    found = False
                    for s in search:
                        found = True
                        if not massey_value(p, sub, s, check=False).classical.is_zero():
                            ok = False
                            break
                    if not found and not search.budget_exhausted:
                        raise UndefinedProduct(f"sub-product {span} is undefined", span)
                    if ok:
                        ok = None
                    details.append({"span": list(span), "method": "search", "zero_only": ok})
            if ok is False:
                verdict = False
            elif ok is None and verdict is True:
                verdict = None
    return StrictnessReport(verdict, details)


# --- weight filtration ----------------------------------------------------

@dataclass
class WeightBound:
    arity: int
    bound: int
    actual: int
    block_levels: dict[tuple[int, int], int]

    def to_json(self):
        return {"arity": self.arity, "bound": self.bound, "actual": self.actual,
                "block_levels": {f"{i},{j}": v for (i, j), v in sorted(self.block_levels.items())}}


def strict_weight_bound(p: DGAPresentation, system: DefiningSystem) -> WeightBound:
    """Filtration bound f(c(A)) <= arity for systems of degree-1 classes on a Witt model."""
    from .models import filtration_level

    n = system.arity
    levels = {}
    for (i, j), X in system.blocks.items():
        for row in X.entries:
            for e in row:
                if e and e.degrees() != {1}:
                    raise ValueError(f"block {(i, j)} has entries of degree other than 1")
        lv = max((filtration_level(e) for row in X.entries for e in row), default=0)
        levels[(i, j)] = lv
        if lv > j - i + 2:
            raise InvariantViolation(f"block {(i, j)} has filtration level {lv} > {j - i + 2}")
    bound = max(max(r + 1, n - r + 1) for r in range(1, n))
    c = system.cocycle()
    actual = max((filtration_level(e) for row in c.entries for e in row), default=0)
    if not actual <= bound <= n:
        raise InvariantViolation(f"filtration bound violated: actual {actual}, bound {bound}, arity {n}")
    return WeightBound(n, bound, actual, levels)


# --- conversion to and from block matrices -------------------------------

def system_to_form_matrix(p: DGAPresentation, system: DefiningSystem, corner: EMatrix | None = None):
    """Block matrix with X(i, j) at block (i, j+1); the (1, n+1) block is ``corner`` or 0."""
    from .connection import FormMatrix

    n = system.arity
    sizes = [system.blocks[(i, i)].rows for i in range(1, n + 1)] + [system.blocks[(n, n)].cols]
    starts = [1]
    for s in sizes:
        starts.append(starts[-1] + s)
    entries = {}
    items = dict(system.blocks)
    if corner is not None:
        items[(1, n)] = corner
    for (i, j), X in items.items():
        r0, c0 = starts[i - 1], starts[j]
        for r in range(X.rows):
            for c in range(X.cols):
                if X[r, c]:
                    entries[(r0 + r, c0 + c)] = X[r, c]
    return FormMatrix(p.algebra, starts[-1] - 1, entries)


def system_from_form_matrix(p: DGAPresentation, A, sizes: Sequence[int]) -> DefiningSystem:
    """Inverse of :func:`system_to_form_matrix` for block sizes of length n+1."""
    n = len(sizes) - 1
    starts = [1]
    for s in sizes:
        starts.append(starts[-1] + s)
    if starts[-1] - 1 != A.size:
        raise ValueError("block sizes do not add up to the matrix size")
    blocks = {}
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            if (i, j) == (1, n):
                continue
            r0, c0 = starts[i - 1], starts[j]
            blocks[(i, j)] = EMatrix([[A[(r0 + r, c0 + c)] for c in range(sizes[j])] for r in range(sizes[i - 1])])
    return DefiningSystem(n, blocks)


# --- standard data --------------------------------------------------------

def symplectic_product_classes(m: int, p: DGAPresentation) -> list[ClassMatrix]:
    """Class matrices -m w1, ..., -2 w1, (-w1 0), (w2; w1), 2 w1, ..., (m-1) w1, w1."""
    w1, w2 = p.gens("w1", "w2")
    out = []
    for k in range(m, 1, -1):
        out.append(ClassMatrix.from_elements(p, [[w1.scale(-k)]]))
    out.append(ClassMatrix.from_elements(p, [[-w1, 0]], degrees=[[1, 1]]))
    out.append(ClassMatrix.from_elements(p, [[w2], [w1]]))
    for k in range(2, m):
        out.append(ClassMatrix.from_elements(p, [[w1.scale(k)]]))
    out.append(ClassMatrix.from_elements(p, [[w1]]))
    return out


def symplectic_defining_system(m: int, p: DGAPresentation | None = None):
    """(presentation, classes, system) read off the symplectic connection matrix."""
    from .models import symplectic_connection_matrix, witt_model

    if p is None:
        p = witt_model(2 * m)
    A = symplectic_connection_matrix(m, p)
    sizes = [1] * m + [2] + [1] * m
    return p, symplectic_product_classes(m, p), system_from_form_matrix(p, A, sizes)


def heisenberg_triple_data(n: int, eps: Sequence[int] | None = None):
    """Class matrices (eps_i alpha_i^{-eps_i}) row, (alpha_i^{eps_i}) column, alpha^eps.

    Returns (presentation, classes, target form beta ^ alpha^eps).
    """
    from .models import generalized_heisenberg

    eps = list(eps) if eps is not None else [1] * n
    if len(eps) != n or any(e not in (1, -1) for e in eps):
        raise ValueError("eps must be a list of n signs")
    p = generalized_heisenberg(n)

    def alpha(i, s):
        return p.gen(f"alpha{i}{'p' if s > 0 else 'm'}")

    row = [[alpha(i + 1, -eps[i]).scale(eps[i]) for i in range(n)]]
    col = [[alpha(i + 1, eps[i])] for i in range(n)]
    wedge = p.one()
    for i in range(n):
        wedge = wedge * alpha(i + 1, eps[i])
    classes = [ClassMatrix.from_elements(p, row), ClassMatrix.from_elements(p, col),
               ClassMatrix.from_elements(p, [[wedge]])]
    return p, classes, p.gen("beta") * wedge
