import pytest

from mcmassey.models import (
    LieAlgebraError,
    LieAlgebraSpec,
    bigrade,
    check_filtration_differential,
    check_filtration_product,
    chevalley_eilenberg,
    filtration_level,
    generalized_heisenberg,
    symplectic_class,
    witt_brackets,
    witt_model,
)


def test_witt_differential_matches_brackets():
    p = witt_model(6)
    assert str(p.differentials["w5"]) == "3*w1^w4 + w2^w3"
    assert witt_model(8) == chevalley_eilenberg(witt_brackets(8), prefix="w")


def test_witt_is_nilpotent():
    assert witt_brackets(6).is_nilpotent()


def test_jacobi_failure_is_reported():
    spec = LieAlgebraSpec(3, {(1, 2): {3: 1}, (1, 3): {1: 1}})
    with pytest.raises(LieAlgebraError):
        spec.check()


def test_non_nilpotent_rejected():
    spec = LieAlgebraSpec(2, {(1, 2): {2: 1}})
    with pytest.raises(LieAlgebraError):
        chevalley_eilenberg(spec)


def test_generalized_heisenberg_betti_one():
    p = generalized_heisenberg(1)
    assert [p.cohomology(k).dim for k in range(4)] == [1, 2, 2, 1]


def test_symplectic_class_is_closed_and_top_power():
    p = witt_model(4)
    om = symplectic_class(2, p)
    assert p.d(om).is_zero()
    assert str(om * om) == "6*w1^w2^w3^w4"


def test_filtration_levels():
    p = witt_model(4)
    w1, w2, w3, w4 = p.gens("w1", "w2", "w3", "w4")
    assert filtration_level(p.zero()) == 0
    assert filtration_level(p.one()) == 1
    assert filtration_level(w2 * w4) == 4
    assert filtration_level(symplectic_class(2, p)) == 4
    assert check_filtration_product(w1 * w3, w2)


def test_filtration_differential_exact_drop_fails_for_products():
    p = witt_model(4)
    w3, w4 = p.gens("w3", "w4")
    rep = check_filtration_differential(p, w3 * w4)
    assert rep["f"] == 4 and rep["f_d"] == 4
    assert not rep["strict_drop"]
    gen = check_filtration_differential(p, w4)
    assert gen["exact_drop"] is True


def test_bigrade_of_symplectic_class():
    p = witt_model(6)
    view = bigrade(symplectic_class(3, p))
    assert view.deg1 == 2 and view.deg2 == 7
