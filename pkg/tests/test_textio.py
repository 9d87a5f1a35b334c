import json
from importlib import resources

import pytest
from hypothesis import given, settings, strategies as st

from mcmassey import massey as ms
from mcmassey import textio
from mcmassey.models import heisenberg, kodaira_thurston, sphere_model, witt_model


@pytest.mark.parametrize("builder", [heisenberg, kodaira_thurston, lambda: witt_model(6), lambda: sphere_model(4)])
def test_render_parse_roundtrip(builder):
    p = builder()
    q = textio.parse_presentation(textio.render(p))
    assert q.algebra.names == p.algebra.names
    assert q.differentials == p.differentials


@pytest.mark.parametrize("text,builder", [
    ("preset witt 6\n", lambda: witt_model(6)),
    ("preset heisenberg\n", heisenberg),
    ("preset sphere 4\n", lambda: sphere_model(4)),
])
def test_presets_equal_builders(text, builder):
    p, q = textio.parse_presentation(text), builder()
    assert p.differentials == q.differentials


def test_empty_document_is_the_ground_field():
    p = textio.parse_presentation("# nothing here\n\n")
    assert p.cohomology(0).dim == 1
    assert textio.render(p) == ""


def test_explicit_generators():
    p = textio.parse_presentation("generator a : 1\ngenerator b : 1\ngenerator c : 1\nd c = a^b\n")
    assert [p.cohomology(k).dim for k in range(4)] == [1, 2, 2, 1]


def test_power_syntax():
    p = sphere_model(4)
    x = p.gen("x")
    assert textio.parse_element("x^2", p) == x * x
    assert textio.parse_element("3*x^2 - x*x", p) == (x * x).scale(2)


@pytest.mark.parametrize("text,line,col", [
    ("generator a : 1\nd a = b\n", 2, 7),
    ("generator a : 1\nd a = a +\n", 2, 10),
    ("generator a : 0\n", 1, 15),
    ("generator a : 1\ngenerator a : 1\n", 2, 1),
    ("frobnicate\n", 1, 1),
    ("\npreset witt x\n", 2, 1),
    ("preset nope\n", 1, 1),
    ("generator a : 1\nd a = a $ a\n", 2, 9),
])
def test_parse_errors_locate_the_problem(text, line, col):
    with pytest.raises(textio.ParseError) as info:
        textio.parse_presentation(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_class_matrix_text():
    p = witt_model(4)
    V = textio.class_matrix_from_text(p, "[w2; w1]")
    assert (V.rows, V.cols) == (2, 1)
    Z = textio.class_matrix_from_text(p, "[-w1, 0@1]")
    assert Z.degrees == ((1, 1),)
    assert textio.class_matrix_to_text(p, Z) == "[-w1, 0@1]"
    with pytest.raises(textio.ParseError):
        textio.class_matrix_from_text(p, "[w1, 0]")
    with pytest.raises(textio.ParseError):
        textio.class_matrix_from_text(p, "w3")


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3))
def test_element_text_roundtrip(cs):
    p = heisenberg()
    a1, a2, a3 = p.gens("a1", "a2", "a3")
    e = a1.scale(cs[0]) * a3 + (a2 * a3).scale(cs[1]) + (a1 * a2).scale(cs[2])
    assert textio.parse_element(str(e), p) == e


@pytest.mark.parametrize("name", ["heisenberg_triple", "symplectic_m2", "symplectic_m3",
                                  "witt4_quadruple", "witt4_triple"])
def test_shipped_certificates_roundtrip(name):
    raw = resources.files("mcmassey").joinpath(f"certificates/{name}.json").read_text()
    cert = textio.load_certificate(raw)
    assert json.loads(cert.dumps()) == json.loads(raw)
    assert ms.verify_membership(cert.presentation, cert.claimed, cert.classes, cert.system, cert.convention).ok
