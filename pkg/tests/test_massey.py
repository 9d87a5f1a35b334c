
import pytest

from mcmassey import massey as ms
from mcmassey.dga import tensor_product
from mcmassey.models import circle_model, symplectic_class, witt_model


def scalar(p, e):
    return ms.ClassMatrix.scalar(p.class_of(e))


def test_heisenberg_triple(heis):
    a1, a2, a3 = heis.gens("a1", "a2", "a3")
    tp = ms.triple_product(heis, heis.class_of(a1), heis.class_of(a1), heis.class_of(a2))
    assert tp.value == -heis.class_of(a1 * a3)
    assert tp.classical_value == heis.class_of(a1 * a3)
    assert tp.indeterminacy.dim == 0
    assert not tp.is_trivial


def test_triple_formula_agrees_with_system(heis):
    a1, a2 = heis.gens("a1", "a2")
    for a, b, c in [(a1, a1, a2), (a2, a2, a1), (a1, a2, a2)]:
        f, g, tau = ms.triple_formula_value(heis, a, b, c)
        assert heis.d(tau).is_zero()
        tp = ms.triple_product(heis, heis.class_of(a), heis.class_of(b), heis.class_of(c))
        assert tp.contains(ms.ClassMatrix.scalar(heis.class_of(tau)), convention="generalized")


def test_undefined_triple():
    p = tensor_product(circle_model(), circle_model())
    t, s = p.gens("t", "t_")
    with pytest.raises(ms.UndefinedProduct):
        ms.triple_product(p, p.class_of(t), p.class_of(s), p.class_of(t))
    with pytest.raises(ms.UndefinedProduct):
        ms.triple_formula_value(p, t, s, t)


def test_multipliability_error():
    p = witt_model(4)
    w1 = p.gen("w1")
    row = ms.ClassMatrix.from_elements(p, [[w1, w1]])
    with pytest.raises(ms.UndefinedProduct):
        ms.check_multipliable([row, row])


def test_witt_quadruple_search(witt4):
    w1, w2, w4 = witt4.gens("w1", "w2", "w4")
    classes = [scalar(witt4, x) for x in (w2.scale(6), w1, w1, w1)]
    res = ms.find_defining_system(witt4, classes, budget=10_000)
    assert res.found
    val = ms.massey_value(witt4, classes, res.system)
    assert val.classical_class() == witt4.class_of((w1 * w4).scale(3))
    assert val.generalized.flat() == tuple(-x for x in val.classical.flat())


def test_witt_quadruple_parametric(witt4):
    w1, w2 = witt4.gens("w1", "w2")
    classes = [scalar(witt4, x) for x in (w2.scale(6), w1, w1, w1)]
    pv = ms.parametric_value(witt4, classes)
    assert pv is not None
    assert pv.certifies_nontrivial()
    assert pv.certifies_strictly_irreducible(witt4)
    rep = ms.is_strictly_defined(witt4, classes)
    assert rep.verdict is True


def test_witt_triple_value(witt4):
    w1, w2, w3 = witt4.gens("w1", "w2", "w3")
    tp = ms.triple_product(witt4, witt4.class_of(-w1), witt4.class_of(w2), witt4.class_of(w2))
    assert tp.contains(scalar(witt4, w2 * w3), convention="classical")


def test_check_system_reports_each_condition(heis):
    a1, a2, a3 = heis.gens("a1", "a2", "a3")
    classes = [scalar(heis, x) for x in (a1, a1, a2)]
    good = ms.find_defining_system(heis, classes, budget=10).system
    assert ms.check_system(heis, good, classes).ok
    wrong_class = good.with_block((1, 1), ms.EMatrix([[a2]]))
    assert {f.condition for f in ms.check_system(heis, wrong_class, classes).failures} >= {1}
    wrong_deg = good.with_block((1, 2), ms.EMatrix([[a1 * a2]]))
    assert 2 in {f.condition for f in ms.check_system(heis, wrong_deg, classes).failures}
    wrong_eq = good.with_block((2, 3), good[(2, 3)] + ms.EMatrix([[a3]]))
    fails = ms.check_system(heis, wrong_eq, classes).failures
    assert [f.condition for f in fails] == [3]
    assert fails[0].position == (2, 3)


def test_verify_membership(heis):
    a1, a2, a3 = heis.gens("a1", "a2", "a3")
    classes = [scalar(heis, x) for x in (a1, a1, a2)]
    system = ms.find_defining_system(heis, classes, budget=10).system
    assert ms.verify_membership(heis, scalar(heis, a1 * a3), classes, system).ok
    assert ms.verify_membership(heis, scalar(heis, -(a1 * a3)), classes, system, "generalized").ok
    bad = ms.verify_membership(heis, scalar(heis, a2 * a3), classes, system)
    assert not bad.ok and bad.failures[0].condition == 4


@pytest.mark.parametrize("m", [2, 3])
def test_symplectic_system(m):
    p, classes, system = ms.symplectic_defining_system(m)
    assert ms.check_system(p, system, classes).ok
    val = ms.massey_value(p, classes, system)
    assert val.classical_class() == p.class_of(symplectic_class(m, p))
    wb = ms.strict_weight_bound(p, system)
    assert wb.actual == 2 * m and wb.bound == 2 * m


def test_form_matrix_roundtrip():
    p, classes, system = ms.symplectic_defining_system(2)
    A = ms.system_to_form_matrix(p, system)
    back = ms.system_from_form_matrix(p, A, [1, 1, 2, 1, 1])
    assert back.blocks == system.blocks


@pytest.mark.parametrize("n,eps", [(2, [1, 1]), (2, [1, -1]), (3, [-1, 1, 1])])
def test_generalized_heisenberg_triple(n, eps):
    p, classes, target = ms.heisenberg_triple_data(n, eps)
    tp = ms.matrix_triple_product(p, *classes)
    assert tp.value == p.class_of(target)
    assert tp.indeterminacy.dim == 0
    assert ms.is_strictly_irreducible(p, tp.generalized_matrix, tp.indeterminacy)


def test_completely_reducible(witt4):
    w1, w2 = witt4.gens("w1", "w2")
    assert ms.is_completely_reducible(witt4, scalar(witt4, w1 * w2))
    assert not ms.is_completely_reducible(witt4, scalar(witt4, witt4.gen("w4") * w1))


def test_budget_is_reported(witt4):
    w1, w2 = witt4.gens("w1", "w2")
    classes = [scalar(witt4, x) for x in (w2.scale(6), w1, w1, w1)]
    search = ms.SystemSearch(witt4, classes, budget=1)
    assert list(search) == [] and search.budget_exhausted
