from fractions import Fraction

import pytest
from hypothesis import strategies as st

from mcmassey.models import heisenberg, kodaira_thurston, sphere_model, witt_model

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture(scope="session")
def heis():
    return heisenberg()


@pytest.fixture(scope="session")
def witt4():
    return witt_model(4)


@pytest.fixture(scope="session")
def kt():
    return kodaira_thurston()


@pytest.fixture(scope="session")
def s4():
    return sphere_model(4)


def elements(p, degree, max_terms=4):
    """Random homogeneous elements of ``degree`` over presentation ``p``."""
    basis = p.algebra.basis(degree)
    if not basis:
        return st.just(p.zero())
    coeff = st.integers(-3, 3).map(Fraction)

    def build(pairs):
        out = p.zero()
        for mono, c in pairs:
            out = out + p.algebra.monomial(mono).scale(c)
        return out

    return st.lists(st.tuples(st.sampled_from(basis), coeff), max_size=max_terms).map(build)
