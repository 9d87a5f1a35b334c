"""Strictly upper triangular matrices of forms and the Maurer-Cartan operator.

Indices are 1-based, matching the usual matrix notation.  ``mu(A) = dA - Abar A``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .dga import CohClass, DGAPresentation, dga_homomorphism_apply
from .gca import Element, GradedAlgebra

Position = tuple[int, int]


class FormMatrix:
    """A finite strictly upper triangular matrix with entries in a free algebra."""

    __slots__ = ("algebra", "size", "_entries")

    def __init__(self, algebra: GradedAlgebra, size: int, entries: Mapping[Position, Element] | None = None):
        self.algebra = algebra
        self.size = size
        clean = {}
        for (i, j), e in (entries or {}).items():
            if not (1 <= i < j <= size):
                if e:
                    raise ValueError(f"entry ({i},{j}) is not strictly upper triangular in size {size}")
                continue
            if e:
                clean[(i, j)] = e
        self._entries = clean

    @classmethod
    def zero(cls, algebra: GradedAlgebra, size: int) -> "FormMatrix":
        return cls(algebra, size, {})

    @classmethod
    def unit(cls, algebra: GradedAlgebra, size: int, pos: Position, value: Element) -> "FormMatrix":
        return cls(algebra, size, {pos: value})

    @classmethod
    def superdiagonal(cls, algebra: GradedAlgebra, values: Iterable[Element]) -> "FormMatrix":
        vals = list(values)
        return cls(algebra, len(vals) + 1, {(k + 1, k + 2): v for k, v in enumerate(vals)})

    def __getitem__(self, pos: Position) -> Element:
        e = self._entries.get(pos)
        return e if e is not None else self.algebra.zero()

    @property
    def entries(self) -> dict[Position, Element]:
        return dict(self._entries)

    def positions(self) -> list[Position]:
        return sorted(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def pad(self, size: int) -> "FormMatrix":
        if size < self.size:
            if any(j > size for _, j in self._entries):
                raise ValueError("cannot shrink a matrix with support outside the new size")
        return FormMatrix(self.algebra, size, self._entries)

    def map(self, f) -> "FormMatrix":
        return FormMatrix(self.algebra, self.size, {k: f(v) for k, v in self._entries.items()})

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        n = max(self.size, other.size)
        out = dict(self._entries)
        for k, v in other._entries.items():
            out[k] = out[k] + v if k in out else v
        return FormMatrix(self.algebra, n, out)

    def __neg__(self) -> "FormMatrix":
        return self.map(lambda e: -e)

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return self + (-other)

    def scale(self, c) -> "FormMatrix":
        return self.map(lambda e: e.scale(c))

    def __mul__(self, other: "FormMatrix") -> "FormMatrix":
        return matrix_multiply(self, other)

    def bar(self) -> "FormMatrix":
        return matrix_bar(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormMatrix):
            return NotImplemented
        return self.algebra == other.algebra and self._entries == other._entries

    def __hash__(self):
        return hash(frozenset(self._entries.items()))

    def __str__(self) -> str:
        rows = []
        for i in range(1, self.size + 1):
            rows.append(", ".join(str(self[(i, j)]) for j in range(1, self.size + 1)))
        return "[" + "; ".join(rows) + "]"

    def __repr__(self) -> str:
        return f"FormMatrix(size={self.size}, {self.positions()})"

    def nonzero_columns(self) -> set[int]:
        return {j for _, j in self._entries}

    def nonzero_rows(self) -> set[int]:
        return {i for i, _ in self._entries}


def matrix_multiply(A: FormMatrix, B: FormMatrix) -> FormMatrix:
    n = max(A.size, B.size)
    by_row: dict[int, list[tuple[int, Element]]] = {}
    for (r, s), v in B._entries.items():
        by_row.setdefault(r, []).append((s, v))
    out: dict[Position, Element] = {}
    for (i, r), a in A._entries.items():
        for s, b in by_row.get(r, ()):
            prod = a * b
            if prod:
                out[(i, s)] = out[(i, s)] + prod if (i, s) in out else prod
    return FormMatrix(A.algebra, n, out)


def matrix_bar(A: FormMatrix) -> FormMatrix:
    return A.map(lambda e: e.bar())


def matrix_d(p: DGAPresentation, A: FormMatrix) -> FormMatrix:
    return A.map(p.d)


def _bidegree(A: FormMatrix) -> tuple[int, int]:
    """(diagonal offset, form degree) of a matrix homogeneous in both gradings."""
    offs = {j - i for i, j in A._entries}
    degs = set()
    for e in A._entries.values():
        degs |= e.degrees()
    if len(offs) > 1 or len(degs) > 1:
        raise ValueError("matrix is not bihomogeneous")
    return (offs.pop() if offs else 0, degs.pop() if degs else 0)


def lie_bracket(A: FormMatrix, B: FormMatrix) -> FormMatrix:
    """Super commutator ``[A, B] = AB - (-1)^{kl} BA`` for form degrees k, l."""
    _, k = _bidegree(A)
    _, l = _bidegree(B)
    sign = -1 if (k * l) % 2 else 1
    return A * B - (B * A).scale(sign)


@dataclass(frozen=True)
class KernelSubmodule:
    size: int
    generating: frozenset[Position]
    strict: frozenset[Position]

    def __contains__(self, pos: Position) -> bool:
        return pos in self.generating


def kernel_submodule(A: FormMatrix, size: int | None = None) -> KernelSubmodule:
    """Unit positions annihilating ``A`` on both sides, plus the smaller Ker' part.

    ``A E_ij`` is column i of A moved to column j, and ``E_ij A`` is row j of A
    moved to row i, so (i, j) generates exactly when column i and row j vanish.
    """
    n = A.size if size is None else size
    cols = A.nonzero_columns()
    rows = A.nonzero_rows()
    gen = frozenset((i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
                    if i not in cols and j not in rows)
    if A.is_zero():
        strict = gen
    else:
        first_col = min(cols)
        last_row = max(rows)
        strict = frozenset((i, j) for (i, j) in gen if i < first_col and j > last_row)
    return KernelSubmodule(n, gen, strict)


def maurer_cartan(p: DGAPresentation, A: FormMatrix) -> FormMatrix:
    return matrix_d(p, A) - matrix_bar(A) * A


@dataclass(frozen=True)
class FormalityCheck:
    ok: bool
    witness: Position | None
    curvature: FormMatrix

    def __bool__(self) -> bool:
        return self.ok


def is_formal_connection(p: DGAPresentation, A: FormMatrix, kernel: KernelSubmodule | None = None) -> FormalityCheck:
    """True iff mu(A) vanishes outside the generating positions of Ker A."""
    mu = maurer_cartan(p, A)
    ker = kernel if kernel is not None else kernel_submodule(A)
    for pos in mu.positions():
        if pos not in ker.generating:
            return FormalityCheck(False, pos, mu)
    return FormalityCheck(True, None, mu)


@dataclass(frozen=True)
class BianchiReport:
    identity_holds: bool
    formal: bool
    curvature_closed: bool | None

    def __bool__(self) -> bool:
        return self.identity_holds and (self.curvature_closed is not False)


def bianchi_check(p: DGAPresentation, A: FormMatrix) -> BianchiReport:
    mu = maurer_cartan(p, A)
    dmu = matrix_d(p, mu)
    rhs = matrix_bar(mu) * A - A * mu
    holds = (dmu - rhs).is_zero()
    formal = is_formal_connection(p, A).ok
    closed = dmu.is_zero() if formal else None
    return BianchiReport(holds, formal, closed)


class CurvatureError(ValueError):
    pass


def curvature_classes(p: DGAPresentation, A: FormMatrix, require_formal: bool = True) -> dict[Position, CohClass]:
    """Cohomology classes of the nonzero entries of mu(A)."""
    check = is_formal_connection(p, A)
    if require_formal and not check.ok:
        raise CurvatureError(f"not a formal connection: mu(A) is nonzero at {check.witness}")
    out = {}
    for pos in check.curvature.positions():
        e = check.curvature[pos]
        if e.degree() is None:
            raise CurvatureError(f"curvature entry at {pos} is not homogeneous")
        if p.d(e):
            raise CurvatureError(f"curvature entry at {pos} is not closed")
        out[pos] = p.class_of(e)
    return out


def initial_data_move(p: DGAPresentation, A: FormMatrix, pos: Position, b: Element) -> FormMatrix:
    """``A' = A + (db)_ij + A (b)_ij - (bbar)_ij A``."""
    B = FormMatrix.unit(A.algebra, A.size, pos, b)
    dB = FormMatrix.unit(A.algebra, A.size, pos, p.d(b))
    return A + dB + A * B - matrix_bar(B) * A


def pushforward(f, A: FormMatrix, target_algebra: GradedAlgebra | None = None) -> FormMatrix:
    """Apply a homomorphism entrywise.

    ``f`` is a :class:`~mcmassey.dga.DGAHomomorphism` into a presentation or a
    plain mapping of generator names to target elements.
    """
    if hasattr(f, "apply"):
        target = f.target.algebra if isinstance(f.target, DGAPresentation) else None
        if target is None:
            raise TypeError("pushforward needs a homomorphism into a free presentation")
        apply = f.apply
    else:
        target = target_algebra or next(iter(f.values())).algebra
        apply = lambda e: dga_homomorphism_apply(f, e, target=target)  # noqa: E731
    return FormMatrix(target, A.size, {k: apply(v) for k, v in A.entries.items()})


def heisenberg_type_matrix(algebra: GradedAlgebra, a: list[Element], b: list[Element],
                           c: Element | None = None) -> FormMatrix:
    """Row (abar_1 .. abar_l) in the first row, column (b_1 .. b_l) in the last."""
    if len(a) != len(b):
        raise ValueError("a and b must have the same length")
    l = len(a)
    n = l + 2
    entries = {}
    for k in range(l):
        entries[(1, k + 2)] = a[k].bar()
        entries[(k + 2, n)] = b[k]
    if c is not None:
        entries[(1, n)] = c
    return FormMatrix(algebra, n, entries)
