from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from mcmassey.dga import (
    CohomologyRing,
    DGAHomomorphism,
    DGAPresentation,
    HomomorphismError,
    NotClosedError,
    cup,
    decomposable_subspace,
    dga_homomorphism_apply,
    is_exact,
    tensor_product,
    validate,
)
from mcmassey.models import circle_model, heisenberg, kodaira_thurston, sphere_model, witt_model

from conftest import elements

W6 = witt_model(6)


def test_heisenberg_betti(heis):
    assert [heis.cohomology(k).dim for k in range(4)] == [1, 2, 2, 1]


def test_heisenberg_representatives(heis):
    assert [str(r) for r in heis.cohomology(2).representatives] == ["a1^a3", "a2^a3"]


def test_exactness(heis):
    a1, a2, a3 = heis.gens("a1", "a2", "a3")
    assert is_exact(heis, a1 * a2) == a3
    assert is_exact(heis, a1 * a3) is None
    with pytest.raises(NotClosedError):
        is_exact(heis, a3)


def test_class_of_rejects_non_closed(heis):
    with pytest.raises(ValueError):
        heis.cohomology(1).class_of(heis.gen("a3"))


def test_cup_of_a1_a2_vanishes(heis):
    a1, a2 = heis.gens("a1", "a2")
    assert cup(heis, heis.class_of(a1), heis.class_of(a2)).is_zero()


def test_decomposables(heis):
    assert decomposable_subspace(heis, 2).dim == 0
    assert decomposable_subspace(heis, 3).dim == 1


def test_sphere_cohomology(s4):
    assert [s4.cohomology(k).dim for k in range(9)] == [1, 0, 0, 0, 1, 0, 0, 0, 0]


def test_kodaira_thurston_betti(kt):
    assert [kt.cohomology(k).dim for k in range(5)] == [1, 3, 4, 3, 1]


def test_tensor_product_renames_clashes():
    p = tensor_product(circle_model(), circle_model())
    assert p.algebra.names == ("t", "t_")


@settings(max_examples=40, deadline=None)
@given(elements(W6, 2))
def test_d_squared_zero(e):
    assert W6.d(W6.d(e)).is_zero()


@settings(max_examples=40, deadline=None)
@given(elements(W6, 1), elements(W6, 2))
def test_leibniz(a, b):
    d = W6.d
    assert d(a * b) == d(a) * b - a * d(b)


def test_validate_reports(heis):
    rep = validate(heis)
    assert rep.ok and rep.minimal
    assert not rep.simply_connected
    assert validate(sphere_model(4)).simply_connected


def test_validate_detects_d_squared_failure():
    p = DGAPresentation([("a", 1), ("b", 1), ("c", 2)], {"c": lambda A: A.gen("a") * A.gen("b"),
                                                         "b": lambda A: A.gen("c")})
    rep = validate(p)
    assert not rep.d_squared_zero


def test_homomorphism_checks_commutation(heis):
    p = heis
    DGAHomomorphism.identity(p)
    with pytest.raises(HomomorphismError):
        DGAHomomorphism(p, p, {"a1": p.gen("a3"), "a2": p.gen("a2"), "a3": p.gen("a3")})


def test_apply_into_cohomology_ring(s4):
    ring = CohomologyRing(s4, 8)
    x = s4.gen("x")
    img = dga_homomorphism_apply({"x": ring.element(s4.class_of(x)), "y": ring.zero()}, x * x, target=ring)
    assert img.is_zero()
