"""Reduced bar construction on a finite window and the first Eilenberg-Moore pages.

A word ``[a_1|...|a_n]`` has bidegree ``(-n, sum deg a_i)``.  Letters are
basis monomials of positive degree; chains are finite rational combinations
of words.  ``d_A`` keeps the word length and raises the internal degree by
one; ``delta`` merges adjacent letters, shortening the word by one and
keeping the internal degree.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .dga import CohClass, DGAPresentation, decomposable_subspace
from .gca import Element, Monomial
from .linalg import LinearSolver, Subspace, columns_to_matrix

Word = tuple[Monomial, ...]


class SliceTooSmall(ValueError):
    def __init__(self, message: str, required: tuple[int, int]):
        super().__init__(message)
        self.required = required


class BarChain:
    """A rational combination of bar words over one algebra."""

    __slots__ = ("algebra", "terms")

    def __init__(self, algebra, terms: dict[Word, Fraction] | None = None):
        self.algebra = algebra
        self.terms = {w: Fraction(c) for w, c in (terms or {}).items() if c}

    @classmethod
    def word(cls, *letters: Element) -> "BarChain":
        """Multilinear expansion of [a_1|...|a_n] for homogeneous positive-degree letters."""
        if not letters:
            raise ValueError("use BarChain.unit for the empty word")
        alg = letters[0].algebra
        out: dict[Word, Fraction] = {(): Fraction(1)}
        for a in letters:
            if a.algebra != alg:
                raise ValueError("letters belong to different algebras")
            if a and (a.degree() is None or a.degree() < 1):
                raise ValueError(f"letter {a} is not homogeneous of positive degree")
            nxt: dict[Word, Fraction] = {}
            for w, c in out.items():
                for m, k in a.items():
                    nxt[w + (m,)] = nxt.get(w + (m,), 0) + c * k
            out = nxt
        return cls(alg, out)

    @classmethod
    def unit(cls, algebra) -> "BarChain":
        return cls(algebra, {(): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other: "BarChain") -> "BarChain":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return BarChain(self.algebra, out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "BarChain":
        return BarChain(self.algebra, {w: v * c for w, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, BarChain) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def bidegrees(self) -> set[tuple[int, int]]:
        return {word_bidegree(self.algebra, w) for w in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in sorted(self.terms.items()):
            body = "[" + "|".join(self.algebra.render_monomial(m) for m in w) + "]"
            parts.append(body if c == 1 else f"{c}*{body}")
        return " + ".join(parts)

    __repr__ = __str__


def word_bidegree(algebra, w: Word) -> tuple[int, int]:
    return (-len(w), sum(algebra.mono_degree(m) for m in w))


def total_degree(algebra, w: Word) -> int:
    n, q = word_bidegree(algebra, w)
    return q + n


def _linear(f):
    def apply(p: DGAPresentation, chain: BarChain) -> BarChain:
        out: dict[Word, Fraction] = {}
        for w, c in chain.terms.items():
            for w2, c2 in f(p, w).items():
                out[w2] = out.get(w2, 0) + c * c2
        return BarChain(chain.algebra, out)
    apply.__doc__ = f.__doc__
    apply.on_word = f
    return apply


def _word_inner(p: DGAPresentation, w: Word) -> dict[Word, Fraction]:
    alg = p.algebra
    out: dict[Word, Fraction] = {}
    prefix = 0
    for i, m in enumerate(w, start=1):
        sign = (-1) ** (i + prefix)
        for m2, c in p.d_monomial(m).items():
            w2 = w[:i - 1] + (m2,) + w[i:]
            out[w2] = out.get(w2, 0) + sign * c
        prefix += alg.mono_degree(m)
    return out


def _word_combinatorial(p: DGAPresentation, w: Word) -> dict[Word, Fraction]:
    alg = p.algebra
    out: dict[Word, Fraction] = {}
    prefix = 0
    # merge letters i-1 and i for i = 2..n
    for i in range(2, len(w) + 1):
        prefix += alg.mono_degree(w[i - 2])
        prod = alg.mono_mul(w[i - 2], w[i - 1])
        if prod is None:
            continue
        s, m = prod
        sign = s * (-1) ** (i + prefix)
        w2 = w[:i - 2] + (m,) + w[i:]
        out[w2] = out.get(w2, 0) + sign
    return out


inner_differential = _linear(_word_inner)
combinatorial_differential = _linear(_word_combinatorial)


def total_differential(p: DGAPresentation, chain: BarChain) -> BarChain:
    return inner_differential(p, chain) + combinatorial_differential(p, chain)


# --- Hopf structure -------------------------------------------------------

def _shuffle_words(alg, u: Word, v: Word) -> dict[Word, Fraction]:
    k, n = len(u), len(v)
    out: dict[Word, Fraction] = {}
    su = [alg.mono_degree(m) - 1 for m in u]
    sv = [alg.mono_degree(m) - 1 for m in v]
    for pos in itertools.combinations(range(k + n), k):
        chosen = set(pos)
        word, sign = [], 1
        iu = iv = 0
        passed_v = 0
        for slot in range(k + n):
            if slot in chosen:
                if (su[iu] * passed_v) % 2:
                    sign = -sign
                word.append(u[iu])
                iu += 1
            else:
                word.append(v[iv])
                passed_v += sv[iv]
                iv += 1
        w = tuple(word)
        out[w] = out.get(w, 0) + sign
    return out


def shuffle_product(x: BarChain, y: BarChain) -> BarChain:
    out: dict[Word, Fraction] = {}
    for u, a in x.terms.items():
        for v, b in y.terms.items():
            for w, s in _shuffle_words(x.algebra, u, v).items():
                out[w] = out.get(w, 0) + a * b * s
    return BarChain(x.algebra, out)


@dataclass
class TensorChain:
    algebra: object
    terms: dict[tuple[Word, Word], Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {k: Fraction(c) for k, c in self.terms.items() if c}

    def __eq__(self, other):
        return isinstance(other, TensorChain) and self.terms == other.terms


def diagonal(x: BarChain) -> TensorChain:
    out: dict[tuple[Word, Word], Fraction] = {}
    for w, c in x.terms.items():
        for k in range(len(w) + 1):
            key = (w[:k], w[k:])
            out[key] = out.get(key, 0) + c
    return TensorChain(x.algebra, out)


def tensor_differential(p: DGAPresentation, t: TensorChain) -> TensorChain:
    """(nabla x 1 + 1 x nabla) with the Koszul sign of the total degree of the left factor."""
    alg = t.algebra
    out: dict[tuple[Word, Word], Fraction] = {}
    for (u, v), c in t.terms.items():
        for u2, c2 in total_differential(p, BarChain(alg, {u: 1})).terms.items():
            out[(u2, v)] = out.get((u2, v), 0) + c * c2
        s = (-1) ** total_degree(alg, u)
        for v2, c2 in total_differential(p, BarChain(alg, {v: 1})).terms.items():
            out[(u, v2)] = out.get((u, v2), 0) + s * c * c2
    return TensorChain(alg, out)


# --- slices and pages -----------------------------------------------------

def _compositions(q: int, n: int):
    if n == 0:
        if q == 0:
            yield ()
        return
    for first in range(1, q - n + 2):
        for rest in _compositions(q - first, n - 1):
            yield (first,) + rest


class BarSlice:
    """Words of length <= max_length and internal degree <= max_degree."""

    def __init__(self, p: DGAPresentation, max_length: int, max_degree: int):
        if max_length < 1 or max_degree < 1:
            raise ValueError("slice bounds must be positive")
        self.p = p
        self.max_length = max_length
        self.max_degree = max_degree
        self._words: dict[tuple[int, int], list[Word]] = {}
        self._index: dict[tuple[int, int], dict[Word, int]] = {}
        self._e1: dict[tuple[int, int], _Quotient] = {}

    def words(self, n: int, q: int) -> list[Word]:
        """Basis of B^{-n, q}."""
        key = (n, q)
        if key not in self._words:
            if n > self.max_length or q > self.max_degree:
                raise SliceTooSmall(f"B^(-{n},{q}) is outside the slice", (n, q))
            alg = self.p.algebra
            ws: list[Word] = []
            if n == 0:
                ws = [()] if q == 0 else []
            else:
                for comp in _compositions(q, n):
                    ws.extend(itertools.product(*(alg.basis(d) for d in comp)))
            self._words[key] = ws
            self._index[key] = {w: k for k, w in enumerate(ws)}
        return self._words[key]

    def basis_size(self, n: int, q: int) -> int:
        return len(self.words(n, q))

    def vector(self, chain: BarChain, n: int, q: int) -> list[Fraction]:
        self.words(n, q)
        idx = self._index[(n, q)]
        v = [Fraction(0)] * len(idx)
        for w, c in chain.terms.items():
            if w not in idx:
                raise ValueError(f"word outside B^(-{n},{q})")
            v[idx[w]] += c
        return v

    def chain(self, v: Sequence[Fraction], n: int, q: int) -> BarChain:
        ws = self.words(n, q)
        return BarChain(self.p.algebra, {w: c for w, c in zip(ws, v) if c})

    def _operator(self, op, src: tuple[int, int], tgt: tuple[int, int]):
        rows = len(self.words(*tgt))
        cols = []
        for w in self.words(*src):
            cols.append(self.vector(op(self.p, BarChain(self.p.algebra, {w: 1})), *tgt))
        return cols, rows

    def inner_matrix(self, n: int, q: int):
        """Columns of d_A : B^{-n,q} -> B^{-n,q+1}."""
        return self._operator(inner_differential, (n, q), (n, q + 1))

    def delta_matrix(self, n: int, q: int):
        """Columns of delta : B^{-n,q} -> B^{-(n-1),q}."""
        return self._operator(combinatorial_differential, (n, q), (n - 1, q))

    def e1(self, n: int, q: int) -> "_Quotient":
        key = (n, q)
        if key not in self._e1:
            if q + 1 > self.max_degree:
                raise SliceTooSmall(f"E1^(-{n},{q}) needs internal degree {q + 1}", (n, q + 1))
            out_cols, out_rows = self.inner_matrix(n, q)
            dim = len(self.words(n, q))
            if dim and out_rows:
                kernel = LinearSolver(columns_to_matrix(out_cols, out_rows), dim).kernel()
            else:
                kernel = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
            image = []
            if q - 1 >= n and self.basis_size(n, q - 1):
                image, _ = self.inner_matrix(n, q - 1)
            self._e1[key] = _Quotient(dim, kernel, image)
        return self._e1[key]

    def d1_matrix(self, n: int, q: int):
        """Induced map E1^{-n,q} -> E1^{-(n-1),q} in representative coordinates."""
        src = self.e1(n, q)
        if n == 1:
            return [], src.dim, 0
        tgt = self.e1(n - 1, q)
        cols = []
        for rep in src.reps:
            img = combinatorial_differential(self.p, self.chain(rep, n, q))
            cols.append(tgt.coords(self.vector(img, n - 1, q)))
        return cols, src.dim, tgt.dim

    def e2_dim(self, n: int, q: int) -> int:
        if n + 1 > self.max_length:
            raise SliceTooSmall(f"E2^(-{n},{q}) needs words of length {n + 1}", (n + 1, q))
        cols, sdim, tdim = self.d1_matrix(n, q)
        out_rank = _rank_of_columns(cols, tdim)
        in_cols, _, _ = self.d1_matrix(n + 1, q)
        in_rank = _rank_of_columns(in_cols, sdim)
        return sdim - out_rank - in_rank


def _rank_of_columns(cols, nrows) -> int:
    if not cols or not nrows:
        return 0
    return LinearSolver(columns_to_matrix(cols, nrows), len(cols)).rank


class _Quotient:
    """Kernel modulo image, with chosen representatives."""

    def __init__(self, dim: int, kernel: Sequence[Sequence[Fraction]], image: Sequence[Sequence[Fraction]]):
        self.ambient = dim
        img = Subspace(dim, image)
        reps = []
        span = img
        for v in kernel:
            if not span.contains(v):
                reps.append(tuple(v))
                span = span + Subspace(dim, [v])
        self.reps = reps
        self.dim = len(reps)
        self._image = list(img.basis)
        cols = self._image + [list(r) for r in reps]
        self._solver = LinearSolver(columns_to_matrix(cols, dim), len(cols)) if cols and dim else None

    def coords(self, v: Sequence[Fraction]) -> list[Fraction]:
        if self._solver is None:
            return []
        x = self._solver.solve(list(v))
        if x is None:
            raise ValueError("vector is not a cycle")
        return list(x[len(self._image):])


@dataclass
class PageTable:
    page: int
    dims: dict[tuple[int, int], int]

    def to_json(self):
        return {"page": self.page, "dims": [{"p": -n, "q": q, "dim": d} for (n, q), d in sorted(self.dims.items())]}


def page(p: DGAPresentation, bar_slice: BarSlice, r: int, lengths: Iterable[int] | None = None,
         degrees: Iterable[int] | None = None) -> PageTable:
    """Dimensions of E_r^{-n,q} for r in {1, 2} over the computable window."""
    if r not in (1, 2):
        raise ValueError("only E1 and E2 are computed")
    lengths = list(lengths) if lengths is not None else list(range(1, bar_slice.max_length + (0 if r == 2 else 1)))
    degrees = list(degrees) if degrees is not None else list(range(1, bar_slice.max_degree))
    dims = {}
    for n in lengths:
        for q in degrees:
            dims[(n, q)] = bar_slice.e1(n, q).dim if r == 1 else bar_slice.e2_dim(n, q)
    return PageTable(r, dims)


def indecomposable_dims(p: DGAPresentation, degrees: Iterable[int]) -> dict[int, int]:
    """dim (H+/H+.H+)^q from the cohomology ring."""
    return {q: p.cohomology(q).dim - decomposable_subspace(p, q).dim for q in degrees}


# --- suspension -----------------------------------------------------------

def suspension(p: DGAPresentation, u: CohClass) -> BarChain:
    """[a] for the chosen representative a of u."""
    if u.degree < 1:
        raise ValueError("suspension needs a positive-degree class")
    rep = p.rep(u)
    if not rep:
        return BarChain(p.algebra)
    return BarChain.word(rep)


def suspension_to_E2(p: DGAPresentation, u: CohClass, bar_slice: BarSlice | None = None) -> list[Fraction]:
    """Coordinates of the image of u in E2^{-1, deg u} = E1^{-1,q} / d1(E1^{-2,q})."""
    q = u.degree
    bs = bar_slice or BarSlice(p, 2, q + 1)
    e1 = bs.e1(1, q)
    coords = e1.coords(bs.vector(suspension(p, u), 1, q))
    cols, _, _ = bs.d1_matrix(2, q)
    image = Subspace(e1.dim, cols)
    # coordinates in a fixed complement of the image
    comp = []
    span = image
    for i in range(e1.dim):
        e = [Fraction(int(i == j)) for j in range(e1.dim)]
        if not span.contains(e):
            comp.append(i)
            span = span + Subspace(e1.dim, [e])
    cols_all = [list(v) for v in image.basis] + [[Fraction(int(i == j)) for j in range(e1.dim)] for i in comp]
    if not cols_all:
        return []
    x = LinearSolver(columns_to_matrix(cols_all, e1.dim), len(cols_all)).solve(coords)
    return list(x[len(image.basis):])
