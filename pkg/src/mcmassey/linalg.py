"""Exact linear algebra over the rationals.

Matrices are plain lists of rows of :class:`fractions.Fraction`.  Everything
here is deterministic: pivots are chosen in the leftmost eligible column,
using the lowest-index remaining row with a nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Vector = list[Fraction]
Matrix = list[list[Fraction]]

ZERO = Fraction(0)
ONE = Fraction(1)


def as_matrix(rows: Iterable[Iterable], ncols: int | None = None) -> Matrix:
    out = [[Fraction(x) for x in row] for row in rows]
    if ncols is not None:
        for row in out:
            if len(row) != ncols:
                raise ValueError("ragged matrix")
    return out


def zeros(n: int) -> Vector:
    return [ZERO] * n


def columns_to_matrix(columns: Sequence[Sequence[Fraction]], nrows: int) -> Matrix:
    """Assemble a matrix whose columns are the given vectors."""
    return [[col[r] for col in columns] for r in range(nrows)]


def rref(matrix: Matrix, ncols: int | None = None) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form.

    Returns the reduced matrix (a new list) and the pivot columns.  ``ncols``
    limits the columns eligible for pivoting, which lets callers reduce an
    augmented matrix while keeping the augmented block passive.
    """
    R = [list(row) for row in matrix]
    if not R:
        return R, []
    width = len(R[0])
    limit = width if ncols is None else ncols
    pivots: list[int] = []
    prow = 0
    nrows = len(R)
    for col in range(limit):
        if prow == nrows:
            break
        found = -1
        for r in range(prow, nrows):
            if R[r][col]:
                found = r
                break
        if found < 0:
            continue
        if found != prow:
            R[prow], R[found] = R[found], R[prow]
        pivot_row = R[prow]
        inv = ONE / pivot_row[col]
        if inv != ONE:
            pivot_row = [x * inv for x in pivot_row]
            R[prow] = pivot_row
        nz = [c for c in range(col, width) if pivot_row[c]]
        for r in range(nrows):
            if r == prow:
                continue
            row = R[r]
            f = row[col]
            if f:
                for c in nz:
                    row[c] -= f * pivot_row[c]
        pivots.append(col)
        prow += 1
    return R, pivots


def rank(matrix: Matrix) -> int:
    return len(rref(matrix)[1])


@dataclass(frozen=True)
class Solution:
    """One particular solution plus a basis of the kernel."""

    particular: tuple[Fraction, ...]
    kernel: tuple[tuple[Fraction, ...], ...]


class LinearSolver:
    """Factor ``M`` once, then solve ``M x = b`` for many right-hand sides.

    The particular solution has zeros in every free coordinate.
    """

    def __init__(self, matrix: Matrix, ncols: int | None = None):
        self.nrows = len(matrix)
        if ncols is None:
            ncols = len(matrix[0]) if matrix else 0
        self.ncols = ncols
        augmented = [
            list(row) + [ONE if i == r else ZERO for i in range(self.nrows)]
            for r, row in enumerate(matrix)
        ]
        R, pivots = rref(augmented, ncols=ncols)
        self.pivots = pivots
        self._reduced = [row[:ncols] for row in R]
        self._transform = [row[ncols:] for row in R]
        self.rank = len(pivots)

    def kernel(self) -> list[tuple[Fraction, ...]]:
        pivot_set = set(self.pivots)
        basis = []
        for free in range(self.ncols):
            if free in pivot_set:
                continue
            v = [ZERO] * self.ncols
            v[free] = ONE
            for i, pc in enumerate(self.pivots):
                v[pc] = -self._reduced[i][free]
            basis.append(tuple(v))
        return basis

    def solve(self, rhs: Sequence[Fraction]) -> tuple[Fraction, ...] | None:
        if len(rhs) != self.nrows:
            raise ValueError(f"rhs has length {len(rhs)}, expected {self.nrows}")
        nz = [(i, b) for i, b in enumerate(rhs) if b]
        y = []
        for trow in self._transform:
            s = ZERO
            for i, b in nz:
                t = trow[i]
                if t:
                    s += t * b
            y.append(s)
        if any(y[self.rank:]):
            return None
        x = [ZERO] * self.ncols
        for i, pc in enumerate(self.pivots):
            x[pc] = y[i]
        return tuple(x)


def solve_linear(matrix: Matrix, rhs: Sequence, ncols: int | None = None) -> Solution | None:
    """Solve ``matrix @ x = rhs`` exactly; ``None`` when inconsistent."""
    matrix = as_matrix(matrix)
    rhs = [Fraction(b) for b in rhs]
    solver = LinearSolver(matrix, ncols=ncols)
    x = solver.solve(rhs)
    if x is None:
        return None
    return Solution(particular=x, kernel=tuple(solver.kernel()))


class Subspace:
    """A subspace of ``Q^n`` kept in reduced echelon form."""

    def __init__(self, dim: int, vectors: Iterable[Sequence[Fraction]] = ()):
        self.dim = dim
        rows = [[Fraction(x) for x in v] for v in vectors]
        for v in rows:
            if len(v) != dim:
                raise ValueError("vector of wrong length")
        R, pivots = rref(rows) if rows else ([], [])
        self.basis: tuple[tuple[Fraction, ...], ...] = tuple(tuple(R[i]) for i in range(len(pivots)))
        self._pivots = pivots

    def __len__(self) -> int:
        return len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def reduce(self, v: Sequence[Fraction]) -> list[Fraction]:
        """Remainder of ``v`` after clearing the pivot coordinates."""
        out = [Fraction(x) for x in v]
        for row, pc in zip(self.basis, self._pivots):
            f = out[pc]
            if f:
                for c in range(self.dim):
                    if row[c]:
                        out[c] -= f * row[c]
        return out

    def contains(self, v: Sequence[Fraction]) -> bool:
        return not any(self.reduce(v))

    def __add__(self, other: "Subspace") -> "Subspace":
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return Subspace(self.dim, list(self.basis) + list(other.basis))

    def __contains__(self, v) -> bool:
        return self.contains(v)

    def __repr__(self) -> str:
        return f"Subspace(dim={self.dim}, rank={self.rank})"
