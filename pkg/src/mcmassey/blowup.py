"""Neighborhood models of symplectic blow-ups and lifted Massey products.

The model extends a base presentation by ``x`` (degree 2) and ``y``
(degree 2m - 1) with ``dy = x^m + c_1 x^(m-1) + ... + c_m``.  Its cohomology
is a free module over the base cohomology on ``1, a, ..., a^(m-1)`` where
``a = [x]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dga import CohClass, DGAPresentation, dga_homomorphism_apply
from .gca import Element, GeneratorSpec
from .linalg import LinearSolver, Subspace, columns_to_matrix
from .massey import (
    ClassMatrix,
    DefiningSystem,
    EMatrix,
    InvariantViolation,
    ValueLayout,
    _as_class_matrix,
    check_system,
    cocycle_classes,
    matrix_triple_indeterminacy,
    matrix_triple_product,
    parametric_value,
    product_degrees,
)


class BlowupError(ValueError):
    pass


def _fresh(name: str, taken: set[str]) -> str:
    while name in taken:
        name += "_"
    return name


@dataclass
class BlowupNeighborhoodModel:
    base: DGAPresentation
    m: int
    chern: list[Element]
    presentation: DGAPresentation
    x_name: str
    y_name: str

    @property
    def x(self) -> Element:
        return self.presentation.gen(self.x_name)

    @property
    def y(self) -> Element:
        return self.presentation.gen(self.y_name)

    def embed(self, e: Element) -> Element:
        """Base element viewed in the extension."""
        alg = self.presentation.algebra
        return dga_homomorphism_apply({n: alg.gen(n) for n in self.base.algebra.names}, e, target=alg)

    def embed_matrix(self, M: EMatrix) -> EMatrix:
        return M.map(self.embed)

    def a_class(self) -> CohClass:
        return self.presentation.class_of(self.x)


def build_neighborhood(base: DGAPresentation, m: int, chern: Sequence[Element | None] | None = None,
                       name: str | None = None) -> BlowupNeighborhoodModel:
    if m < 2:
        raise BlowupError("m must be at least 2")
    chern = list(chern or [])
    if len(chern) > m:
        raise BlowupError(f"at most {m} chern classes expected, got {len(chern)}")
    chern += [None] * (m - len(chern))
    clean = []
    for i, c in enumerate(chern, start=1):
        if c is None or (isinstance(c, int) and c == 0):
            clean.append(base.zero())
            continue
        if c.algebra != base.algebra:
            raise BlowupError(f"c_{i} does not belong to the base algebra")
        if c and c.degrees() != {2 * i}:
            raise BlowupError(f"c_{i} must be homogeneous of degree {2 * i}")
        if base.d(c):
            raise BlowupError(f"c_{i} is not closed")
        clean.append(c)
    taken = set(base.algebra.names)
    xn = _fresh("x", taken)
    taken.add(xn)
    yn = _fresh("y", taken)
    gens = list(base.generators) + [GeneratorSpec(xn, 2), GeneratorSpec(yn, 2 * m - 1)]
    tmp = DGAPresentation(gens)
    alg = tmp.algebra
    emb = {n: alg.gen(n) for n in base.algebra.names}
    diffs = {n: dga_homomorphism_apply(emb, img, target=alg) for n, img in base.differentials.items()}
    x = alg.gen(xn)
    dy = x ** m
    for i, c in enumerate(clean, start=1):
        if c:
            dy = dy + dga_homomorphism_apply(emb, c, target=alg) * x ** (m - i)
    diffs[yn] = dy
    label = name or f"blowup({base.name or 'base'}, m={m})"
    pres = DGAPresentation(gens, diffs, name=label)
    model = BlowupNeighborhoodModel(base, m, clean, pres, xn, yn)
    if pres.d(dy):
        raise BlowupError("d^2 != 0 in the extension")
    return model


# --- x-expansion ----------------------------------------------------------

def expand_in_x(model: BlowupNeighborhoodModel, e: Element) -> dict[int, Element]:
    """Unique coefficients X_l over the base with e = sum x^l X_l."""
    alg = model.presentation.algebra
    xi = alg.index[model.x_name]
    yi = alg.index[model.y_name]
    base_alg = model.base.algebra
    pos = [base_alg.index[n] for n in alg.names if n in base_alg.index]
    names = [n for n in alg.names if n in base_alg.index]
    out: dict[int, dict] = {}
    for mono, c in e.items():
        if mono[yi]:
            raise BlowupError(f"element {e} depends on {model.y_name}")
        bm = [0] * base_alg.ngens
        for n, k in zip(names, pos):
            bm[k] = mono[alg.index[n]]
        out.setdefault(mono[xi], {})[tuple(bm)] = c
    # base monomials use canonical order, so coefficient signs carry over unchanged
    return {l: Element(base_alg, terms) for l, terms in sorted(out.items())}


def reassemble(model: BlowupNeighborhoodModel, coeffs: dict[int, Element]) -> Element:
    out = model.presentation.zero()
    for l, b in coeffs.items():
        if b:
            out = out + model.x ** l * model.embed(b) if l else out + model.embed(b)
    return out


def x_coefficient(model, e: Element, l: int) -> Element:
    return expand_in_x(model, e).get(l, model.base.zero())


def expand_matrix(model, M: EMatrix) -> dict[int, EMatrix]:
    """Entrywise x-expansion of a matrix; every returned level has full shape."""
    levels: set[int] = set()
    ent = [[expand_in_x(model, e) for e in row] for row in M.entries]
    for row in ent:
        for d in row:
            levels |= set(d)
    zero = model.base.zero()
    return {l: EMatrix([[d.get(l, zero) for d in row] for row in ent]) for l in sorted(levels)}


def matrix_level(model, M: EMatrix, l: int) -> EMatrix:
    return EMatrix([[x_coefficient(model, e, l) for e in row] for row in M.entries]) if M.rows else M


# --- module structure -----------------------------------------------------

@dataclass
class DegreeDecomposition:
    degree: int
    summands: list[tuple[int, int]]  # (power of a, dim of the base slice)
    solver: LinearSolver | None
    ext_dim: int

    def coordinates(self, cls: CohClass) -> tuple[Fraction, ...]:
        if self.solver is None:
            return ()
        x = self.solver.solve(list(cls.coords))
        if x is None:
            raise InvariantViolation("class outside the free-module span")
        return tuple(x)


@dataclass
class ModuleDecomposition:
    model: BlowupNeighborhoodModel
    degrees: dict[int, DegreeDecomposition] = field(default_factory=dict)

    def slice(self, degree: int) -> DegreeDecomposition:
        if degree not in self.degrees:
            self.degrees[degree] = _decompose_degree(self.model, degree)
        return self.degrees[degree]

    def expand(self, cls: CohClass) -> dict[int, CohClass]:
        """Base classes h_i with cls = sum a^i h_i."""
        dec = self.slice(cls.degree)
        coords = dec.coordinates(cls)
        out, k = {}, 0
        for i, dim in dec.summands:
            out[i] = CohClass(cls.degree - 2 * i, tuple(coords[k:k + dim]))
            k += dim
        return out

    def component(self, cls: CohClass, i: int) -> CohClass:
        part = self.expand(cls).get(i)
        if part is None:
            deg = cls.degree - 2 * i
            if deg < 0:
                raise ValueError(f"no a^{i} component in degree {cls.degree}")
            return CohClass.zero(self.model.base, deg)
        return part

    def to_json(self):
        return {str(d): {"summands": [[i, n] for i, n in s.summands], "dim": s.ext_dim}
                for d, s in sorted(self.degrees.items())}


def _decompose_degree(model: BlowupNeighborhoodModel, degree: int) -> DegreeDecomposition:
    ext = model.presentation
    H = ext.cohomology(degree)
    cols, summands = [], []
    for i in range(model.m):
        bd = degree - 2 * i
        if bd < 0:
            break
        reps = model.base.cohomology(bd).representatives
        summands.append((i, len(reps)))
        for r in reps:
            cols.append(list(H.class_of(model.x ** i * model.embed(r)).coords))
    if len(cols) != H.dim:
        raise InvariantViolation(
            f"degree {degree}: free-module count {len(cols)} differs from dim H = {H.dim}")
    if not cols:
        return DegreeDecomposition(degree, summands, None, 0)
    solver = LinearSolver(columns_to_matrix(cols, H.dim), len(cols))
    if solver.rank != H.dim:
        raise InvariantViolation(f"degree {degree}: a-power classes are linearly dependent")
    return DegreeDecomposition(degree, summands, solver, H.dim)


def module_decomposition(model: BlowupNeighborhoodModel, cap: int) -> ModuleDecomposition:
    dec = ModuleDecomposition(model)
    for d in range(cap + 1):
        dec.slice(d)
    return dec


def top_relation_holds(model: BlowupNeighborhoodModel) -> bool:
    """[x]^m + sum [c_i] [x]^(m-i) = 0."""
    e = model.x ** model.m
    for i, c in enumerate(model.chern, start=1):
        if c:
            e = e + model.embed(c) * model.x ** (model.m - i)
    return model.presentation.cohomology(2 * model.m).primitive(e) is not None


# --- lifting --------------------------------------------------------------

def lift_representatives(model, S: Sequence) -> list[EMatrix]:
    """x R_i for the chosen base representatives R_i."""
    return [model.embed_matrix(_as_class_matrix(V).representative(model.base)).map(lambda e: model.x * e)
            for V in S]


def lift_classes(model, S: Sequence) -> list[ClassMatrix]:
    out = []
    for V, R in zip(S, lift_representatives(model, S)):
        V = _as_class_matrix(V)
        degs = tuple(tuple(d + 2 for d in row) for row in V.degrees)
        out.append(ClassMatrix.from_elements(model.presentation, R.entries, degrees=degs))
    return out


def lift_defining_system(model, A: DefiningSystem, check: bool = True) -> DefiningSystem:
    blocks = {}
    for (i, j), X in A.blocks.items():
        xp = model.x ** (j - i + 1)
        blocks[(i, j)] = model.embed_matrix(X).map(lambda e, xp=xp: xp * e)
    out = DefiningSystem(A.arity, blocks)
    if check:
        rep = check_system(model.presentation, out)
        if not rep.ok:
            raise InvariantViolation("lifted system fails condition 3", rep.failures)
    return out


def extract_top(model, system: DefiningSystem) -> DefiningSystem:
    """A_1 = (X_{j-i+1}(i, j))."""
    return DefiningSystem(system.arity, {(i, j): matrix_level(model, X, j - i + 1)
                                         for (i, j), X in system.blocks.items()})


def _max_block_degree(system: DefiningSystem) -> int:
    out = 0
    for X in system.blocks.values():
        for row in X.entries:
            for e in row:
                if e:
                    out = max(out, max(e.degrees()))
    return out


# --- verifiers ------------------------------------------------------------

@dataclass
class Verdict:
    ok: bool
    checks: dict
    notes: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok

    def to_json(self):
        return {"ok": self.ok, "checks": self.checks, "notes": self.notes}


def _base_value_membership(base, classes, value: ClassMatrix):
    """Whether ``value`` (classical) lies in the base value set; None if unknown."""
    n = len(classes)
    if n == 3:
        tp = matrix_triple_product(base, *classes)
        diff = [a - b for a, b in zip(value.flat(), tp.classical_matrix.flat())]
        return tp.indeterminacy.subspace.contains(diff)
    if n == 2:
        ref = cocycle_classes(base, classes[0].representative(base).bar() * classes[1].representative(base),
                              value.degrees)
        return ref.flat() == value.flat()
    pv = parametric_value(base, classes)
    if pv is None:
        return None
    diff = [a - b for a, b in zip(value.flat(), pv.constant)]
    if Subspace(pv.layout.size, pv.directions).contains(diff):
        return True if not pv.directions else None
    return False


def theorem_B_verifier(model: BlowupNeighborhoodModel, classes: Sequence, system: DefiningSystem) -> Verdict:
    """Top x-coefficient extraction for a lifted system of degree-1 classes.

    Checks that A_1 is a defining system for the base classes, that the top
    x-coefficient of c(A) is c(A_1), and whether [c(A_1)] lies in the base
    value set.  A vanishing lifted value forces [c(A_1)] = 0.
    """
    classes = [_as_class_matrix(V) for V in classes]
    n = len(classes)
    if n >= model.m:
        raise BlowupError(f"hypothesis n < m fails: n = {n}, m = {model.m}")
    for V in classes:
        if any(d != 1 for row in V.degrees for d in row):
            raise BlowupError("base classes must have degree 1 entries")
    base, ext = model.base, model.presentation
    lifted = lift_classes(model, classes)
    checks: dict = {}
    checks["lifted_system_valid"] = check_system(ext, system, lifted).ok
    A1 = extract_top(model, system)
    checks["extraction_valid"] = check_system(base, A1, classes).ok
    c = system.cocycle()
    c1 = A1.cocycle()
    levels = expand_matrix(model, c)
    top = levels.get(n)
    checks["top_coefficient_is_cA1"] = top is not None and top == c1 or (top is None and c1.is_zero())
    checks["no_higher_powers"] = all(l <= n for l in levels)
    degs = product_degrees([V.degrees for V in classes])
    value1 = cocycle_classes(base, c1, degs)
    checks["base_value"] = value1.to_json()
    checks["value_in_base_set"] = _base_value_membership(base, classes, value1)
    lifted_degs = product_degrees([V.degrees for V in lifted])
    lifted_value = cocycle_classes(ext, c, lifted_degs)
    checks["lifted_value_zero"] = lifted_value.is_zero()
    ok = (checks["lifted_system_valid"] and checks["extraction_valid"] and checks["top_coefficient_is_cA1"]
          and checks["no_higher_powers"] and checks["value_in_base_set"] is not False)
    notes = []
    if checks["lifted_value_zero"] and not value1.is_zero():
        ok = False
        notes.append("lifted value vanishes but the extracted base value does not")
    return Verdict(bool(ok), checks, notes)


def _a_power_projection(model, dec: ModuleDecomposition, layout: ValueLayout, vec, power: int):
    """Entrywise a^power component of a flattened class matrix."""
    out = []
    k = 0
    for r, row in enumerate(layout.degrees):
        for c, deg in enumerate(row):
            dim = layout.dims[r][c]
            cls = CohClass(deg, tuple(vec[k:k + dim]))
            out.extend(dec.component(cls, power).coords)
            k += dim
    return out


def theorem_C_verifier(model: BlowupNeighborhoodModel, classes: Sequence) -> Verdict:
    """Lifted triple product a S_1, a S_2, a S_3 against the a-power expansion."""
    classes = [_as_class_matrix(V) for V in classes]
    if len(classes) != 3:
        raise BlowupError("triple data expected")
    if model.m < 4:
        raise BlowupError(f"hypothesis m >= 4 fails: m = {model.m}")
    base, ext = model.base, model.presentation
    base_tp = matrix_triple_product(base, *classes)
    lifted = lift_classes(model, classes)
    A1 = base_tp.system
    A = lift_defining_system(model, A1)
    c = A.cocycle()
    checks: dict = {"base_nontrivial": not base_tp.is_trivial}
    checks["cocycle_is_x3_cA1"] = c == model.embed_matrix(A1.cocycle()).map(lambda e: model.x ** 3 * e)
    lifted_layout = ValueLayout.of(ext, product_degrees([V.degrees for V in lifted]))
    lifted_value = cocycle_classes(ext, c, lifted_layout.degrees)
    ind = matrix_triple_indeterminacy(ext, *lifted)
    checks["lifted_nontrivial_direct"] = not ind.subspace.contains(lifted_value.flat())
    dec = ModuleDecomposition(model)
    val3 = _a_power_projection(model, dec, lifted_layout, lifted_value.flat(), 3)
    checks["a3_component_is_base_value"] = tuple(val3) == base_tp.classical_matrix.flat()
    proj = [_a_power_projection(model, dec, lifted_layout, v, 3) for v in ind.subspace.basis]
    base_layout = base_tp.indeterminacy.layout
    proj_space = Subspace(base_layout.size, proj)
    checks["a3_indeterminacy_within_base"] = all(base_tp.indeterminacy.subspace.contains(v) for v in proj)
    checks["a3_equation_unsolvable"] = not proj_space.contains(val3)
    checks["lifted_nontrivial"] = checks["a3_equation_unsolvable"]
    notes = []
    if not checks["base_nontrivial"]:
        notes.append("no obstruction: the base triple product is trivial")
    ok = (checks["cocycle_is_x3_cA1"] and checks["a3_component_is_base_value"]
          and checks["a3_indeterminacy_within_base"]
          and checks["lifted_nontrivial_direct"] == checks["a3_equation_unsolvable"])
    if checks["base_nontrivial"]:
        ok = ok and checks["lifted_nontrivial"]
    return Verdict(bool(ok), checks, notes)


def theorem_D_verifier(model: BlowupNeighborhoodModel, classes: Sequence, system: DefiningSystem) -> Verdict:
    """Quadruple case: the x-level equations for a lifted system and the a^4 argument."""
    classes = [_as_class_matrix(V) for V in classes]
    if len(classes) != 4:
        raise BlowupError("quadruple data expected")
    base, ext = model.base, model.presentation
    notes: list[str] = []
    checks: dict = {}
    pv = parametric_value(base, classes)
    checks["base_strictly_irreducible"] = pv is not None and pv.certifies_strictly_irreducible(base)
    if not checks["base_strictly_irreducible"]:
        raise BlowupError("strict irreducibility of the base product is not established")
    lifted = lift_classes(model, classes)
    cdeg = max(d for row in product_degrees([V.degrees for V in lifted]) for d in row)
    if _max_block_degree(system) >= 2 * model.m - 1 or cdeg >= 2 * model.m:
        raise BlowupError("degree hypothesis fails: blocks or cocycle reach the degree of y")
    checks["lifted_system_valid"] = check_system(ext, system, lifted).ok
    X = {ij: expand_matrix(model, M) for ij, M in system.blocks.items()}
    d = base.d

    def lvl(ij, l):
        M = system.blocks[ij]
        return X[ij].get(l, EMatrix.zeros(base.zero(), M.rows, M.cols))

    R = {i: lvl((i, i), 1) for i in range(1, 5)}
    checks["diagonal_is_xR"] = all(set(X[(i, i)]) <= {1} for i in range(1, 5))
    eq1 = eq2 = eq3 = eq4 = True
    for i in range(1, 4):
        for l in set(X[(i, i + 1)]) | {2}:
            lhs = lvl((i, i + 1), l).d(base)
            rhs = R[i].bar() * R[i + 1] if l == 2 else None
            if l == 2:
                eq1 &= lhs == rhs
            else:
                eq2 &= lhs.is_zero()
    for i in range(1, 3):
        top = max(set(X[(i, i + 2)]) | set(X[(i, i + 1)]) | set(X[(i + 1, i + 2)]) | {0}) + 1
        for l in range(0, top + 1):
            lhs = lvl((i, i + 2), l + 1).d(base)
            rhs = R[i].bar() * lvl((i + 1, i + 2), l) + lvl((i, i + 1), l).bar() * R[i + 2]
            eq3 &= lhs == rhs
        eq4 &= lvl((i, i + 2), 0).d(base).is_zero()
    checks["eq1"], checks["eq2"], checks["eq3"], checks["eq4"] = eq1, eq2, eq3, eq4
    A1 = extract_top(model, system)
    checks["extraction_valid"] = check_system(base, A1, classes).ok
    c = system.cocycle()
    P4 = matrix_level(model, c, 4)
    corr = None
    for l in (0, 1, 3, 4):
        t = lvl((1, 2), l).bar() * lvl((3, 4), 4 - l)
        corr = t if corr is None else corr + t
    checks["P4_identity"] = P4 == A1.cocycle() + corr
    degs = product_degrees([V.degrees for V in classes])
    layout = ValueLayout.of(base, degs)
    decomp = layout.decomposables(base)
    corr_cls = cocycle_classes(base, corr, degs)
    checks["correction_decomposable"] = decomp.contains(corr_cls.flat())
    for l in (0, 1, 3, 4):
        for ij in ((1, 2), (3, 4)):
            M = lvl(ij, l)
            for row in M.entries:
                for e in row:
                    if e and 0 in e.degrees():
                        notes.append(f"X_{l}{ij} has a degree-0 entry")
    P4_cls = cocycle_classes(base, P4, degs)
    checks["P4_class_outside_decomposables"] = not decomp.contains(P4_cls.flat())
    lifted_value = cocycle_classes(ext, c, product_degrees([V.degrees for V in lifted]))
    checks["lifted_value_zero"] = lifted_value.is_zero()
    ok = all(checks[k] for k in ("lifted_system_valid", "diagonal_is_xR", "eq1", "eq2", "eq3", "eq4",
                                 "extraction_valid", "P4_identity", "correction_decomposable",
                                 "P4_class_outside_decomposables"))
    ok = ok and not checks["lifted_value_zero"]
    return Verdict(bool(ok), checks, notes)


def theorem_CD_verifier(model: BlowupNeighborhoodModel, classes: Sequence,
                        system: DefiningSystem | None = None) -> Verdict:
    """Dispatch on arity: triples use the a-power expansion, quadruples the x-level equations."""
    if len(classes) == 3:
        return theorem_C_verifier(model, classes)
    if len(classes) == 4:
        if system is None:
            from .massey import find_defining_system
            base_sys = find_defining_system(model.base, [_as_class_matrix(V) for V in classes]).system
            if base_sys is None:
                raise BlowupError("no base defining system found")
            system = lift_defining_system(model, base_sys)
        return theorem_D_verifier(model, classes, system)
    raise BlowupError("triple or quadruple data expected")
