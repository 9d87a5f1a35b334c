import pytest
from hypothesis import given, settings

from mcmassey import blowup as bl
from mcmassey import massey as ms
from mcmassey.dga import DGAPresentation
from mcmassey.models import kodaira_thurston, witt_model

from conftest import elements


@pytest.fixture(scope="module")
def kt4():
    return bl.build_neighborhood(kodaira_thurston(), 4)


def point():
    return DGAPresentation([])


def test_point_base_is_truncated_polynomial():
    model = bl.build_neighborhood(point(), 2)
    p = model.presentation
    assert [p.cohomology(k).dim for k in range(6)] == [1, 0, 1, 0, 0, 0]
    assert bl.top_relation_holds(model)


def test_chern_classes_enter_the_differential(heis):
    model = bl.build_neighborhood(heis, 2, [None, None])
    assert str(model.presentation.differentials[model.y_name]) == "x^2"
    with pytest.raises(bl.BlowupError):
        bl.build_neighborhood(heis, 2, [heis.gen("a1")])
    with pytest.raises(bl.BlowupError):
        bl.build_neighborhood(heis, 1)


def test_h2_grows_by_one(kt4):
    base = kt4.base
    assert kt4.presentation.cohomology(2).dim == base.cohomology(2).dim + 1


def test_module_decomposition_dims(kt4):
    dec = bl.module_decomposition(kt4, 8)
    base = kt4.base
    for d in range(9):
        want = sum(base.cohomology(d - 2 * i).dim for i in range(4) if d - 2 * i >= 0)
        assert kt4.presentation.cohomology(d).dim == want


KT4 = bl.build_neighborhood(kodaira_thurston(), 4)


@settings(max_examples=40, deadline=None)
@given(e=elements(KT4.presentation, 5, 5))
def test_expand_reassemble_roundtrip(e):
    coeffs = bl.expand_in_x(KT4, e)
    assert all(KT4.y_name not in str(c) for c in coeffs.values())
    assert bl.reassemble(KT4, coeffs) == e


def test_lifted_defining_system_is_valid(kt4):
    kt = kt4.base
    a1, a2 = kt.gens("a1", "a2")
    cls = [ms.ClassMatrix.scalar(kt.class_of(e)) for e in (a2, a1, a1)]
    base_sys = ms.find_defining_system(kt, cls, budget=10).system
    lifted = bl.lift_defining_system(kt4, base_sys)
    assert ms.check_system(kt4.presentation, lifted, bl.lift_classes(kt4, cls)).ok
    assert bl.extract_top(kt4, lifted).blocks == base_sys.blocks


def test_lifted_triple_stays_nontrivial(kt4):
    kt = kt4.base
    a1, a2 = kt.gens("a1", "a2")
    cls = [ms.ClassMatrix.scalar(kt.class_of(e)) for e in (a2, a1, a1)]
    v = bl.theorem_C_verifier(kt4, cls)
    assert v.ok
    assert v.checks["lifted_nontrivial_direct"] and v.checks["a3_equation_unsolvable"]


def test_lifted_triple_requires_m_at_least_4():
    kt = kodaira_thurston()
    a1, a2 = kt.gens("a1", "a2")
    cls = [ms.ClassMatrix.scalar(kt.class_of(e)) for e in (a2, a1, a1)]
    with pytest.raises(bl.BlowupError):
        bl.theorem_C_verifier(bl.build_neighborhood(kt, 3), cls)


def test_top_extraction_requires_n_below_m(kt4):
    kt = kt4.base
    a1 = kt.gen("a1")
    cls = [ms.ClassMatrix.scalar(kt.class_of(a1))] * 4
    with pytest.raises(bl.BlowupError):
        bl.theorem_B_verifier(kt4, cls, None)


def test_lifted_witt_quadruple_stays_nontrivial():
    w = witt_model(4)
    w1, w2 = w.gens("w1", "w2")
    cls = [ms.ClassMatrix.scalar(w.class_of(x)) for x in (w2.scale(6), w1, w1, w1)]
    v = bl.theorem_CD_verifier(bl.build_neighborhood(w, 6), cls)
    assert v.ok, v.to_json()
