import random
from fractions import Fraction as F

import pytest

from mcmassey.connection import (
    CurvatureError,
    FormMatrix,
    bianchi_check,
    curvature_classes,
    heisenberg_type_matrix,
    initial_data_move,
    is_formal_connection,
    kernel_submodule,
    lie_bracket,
    maurer_cartan,
    pushforward,
)
from mcmassey.dga import DGAHomomorphism
from mcmassey.models import circle_model, heisenberg, symplectic_class, symplectic_connection_matrix, witt_model
from mcmassey.dga import tensor_product


def test_superdiagonal_curvature_is_cup_products(heis):
    a1, a2 = heis.gens("a1", "a2")
    A = FormMatrix.superdiagonal(heis.algebra, [a1, a2])
    mu = maurer_cartan(heis, A)
    assert mu.positions() == [(1, 3)]
    assert mu[(1, 3)] == a1 * a2


def test_kernel_submodule_positions(heis):
    a1 = heis.gen("a1")
    A = FormMatrix(heis.algebra, 3, {(1, 2): a1})
    ker = kernel_submodule(A)
    assert ker.generating == frozenset({(1, 2), (1, 3)})
    assert (2, 3) not in ker.generating
    B = FormMatrix.superdiagonal(heis.algebra, [a1, a1])
    assert kernel_submodule(B).generating == frozenset({(1, 3)})


def test_formal_connection_witness():
    torus = tensor_product(tensor_product(circle_model(), circle_model()), circle_model())
    t, s, u = torus.gens("t", "t_", "t__")
    A = FormMatrix.superdiagonal(torus.algebra, [t, s, t])
    check = is_formal_connection(torus, A)
    assert not check.ok
    assert check.witness == (1, 3)


def test_heisenberg_massey_connection_is_formal(heis):
    a1, a2, a3 = heis.gens("a1", "a2", "a3")
    A = FormMatrix(heis.algebra, 4, {(1, 2): a1, (2, 3): a1, (3, 4): a2, (2, 4): -a3})
    assert is_formal_connection(heis, A).ok
    cls = curvature_classes(heis, A)
    assert list(cls) == [(1, 4)]


def test_curvature_classes_require_formality(heis):
    a1, a2 = heis.gens("a1", "a2")
    A = FormMatrix.superdiagonal(heis.algebra, [a1, a1, a2])
    with pytest.raises(CurvatureError):
        curvature_classes(heis, A)


@pytest.mark.parametrize("m", [2, 3])
def test_symplectic_matrix(m):
    p = witt_model(2 * m)
    A = symplectic_connection_matrix(m, p)
    check = is_formal_connection(p, A)
    assert check.ok
    assert check.curvature.positions() == [(1, 2 * m + 2)]
    assert check.curvature[(1, 2 * m + 2)] == -symplectic_class(m, p)


def test_bracket_sign(heis):
    a1, a2 = heis.gens("a1", "a2")
    A = FormMatrix(heis.algebra, 3, {(1, 2): a1})
    B = FormMatrix(heis.algebra, 3, {(2, 3): a2})
    assert lie_bracket(A, B) == A * B + B * A


def test_bianchi_on_random_matrices(heis):
    rng = random.Random(3)
    gens = heis.gens("a1", "a2", "a3")
    for _ in range(30):
        entries = {}
        for i in range(1, 5):
            for j in range(i + 1, 5):
                if rng.random() < 0.6:
                    entries[(i, j)] = rng.choice(gens).scale(rng.randint(-2, 2))
        rep = bianchi_check(heis, FormMatrix(heis.algebra, 4, entries))
        assert rep.identity_holds


def test_initial_data_move_preserves_curvature_class():
    p = witt_model(4)
    A = symplectic_connection_matrix(2, p)
    before = curvature_classes(p, A)
    ker = kernel_submodule(A)
    moved = initial_data_move(p, A, (2, 3), p.gen("w1"))
    after_mu = maurer_cartan(p, moved)
    assert all(pos in ker.generating for pos in after_mu.positions())
    assert curvature_classes(p, moved, require_formal=False) == before


def test_pushforward_identity(heis):
    a1, a2 = heis.gens("a1", "a2")
    A = heisenberg_type_matrix(heis.algebra, [a1], [a2])
    assert pushforward(DGAHomomorphism.identity(heis), A) == A
