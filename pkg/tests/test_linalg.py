from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from mcmassey.linalg import LinearSolver, Subspace, rank, rref, solve_linear

small = st.integers(-4, 4).map(F)


def matrices(rows, cols):
    return st.lists(st.lists(small, min_size=cols, max_size=cols), min_size=rows, max_size=rows)


def test_rref_identity():
    R, piv = rref([[F(2), F(4)], [F(1), F(3)]])
    assert R == [[1, 0], [0, 1]]
    assert piv == [0, 1]


def test_rank_of_dependent_rows():
    assert rank([[F(1), F(2)], [F(2), F(4)]]) == 1


def test_solve_returns_none_when_inconsistent():
    assert solve_linear([[F(1), F(1)], [F(1), F(1)]], [F(1), F(2)]) is None


def test_free_coordinates_are_zero_in_particular_solution():
    sol = solve_linear([[F(1), F(1)]], [F(3)])
    assert sol.particular == (F(3), F(0))
    assert len(sol.kernel) == 1


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4), st.lists(small, min_size=4, max_size=4))
def test_solver_reproduces_rhs(m, x):
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    y = LinearSolver(m, 4).solve(rhs)
    assert y is not None
    assert [sum(a * b for a, b in zip(row, y)) for row in m] == rhs


@settings(max_examples=60, deadline=None)
@given(matrices(3, 4))
def test_kernel_is_annihilated_and_rank_nullity(m):
    s = LinearSolver(m, 4)
    for v in s.kernel():
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
    assert s.rank + len(s.kernel()) == 4


def test_subspace_membership_and_sum():
    a = Subspace(3, [[F(1), F(0), F(0)]])
    b = Subspace(3, [[F(0), F(1), F(1)]])
    assert not a.contains([F(1), F(1), F(1)])
    assert (a + b).contains([F(1), F(1), F(1)])
    assert (a + b).rank == 2
