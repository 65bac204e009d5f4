from __future__ import annotations

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from leviflat.algebra.linsolve import Infeasible, check_solution, solve_rational_linear
from leviflat.algebra.numbers import Q

entries = st.fractions(min_value=-3, max_value=3, max_denominator=3)


def test_particular_solution_is_zero_on_free_columns():
    sol = solve_rational_linear([[1, 1, 0], [0, 0, 1]], [2, 3])
    assert sol.particular == [2, 0, 3]
    assert sol.pivots == (0, 2)
    assert sol.kernel == [[-1, 1, 0]]


def test_sparse_rows_accepted():
    sol = solve_rational_linear([{0: 2}, {1: 1, 0: 1}], [4, 5])
    assert sol.particular == [2, 3]


def test_infeasible_system():
    with pytest.raises(Infeasible):
        solve_rational_linear([[1, 1], [2, 2]], [1, 3])


@settings(max_examples=100)
@given(st.integers(1, 5), st.integers(1, 5), st.data())
def test_against_sympy(rows, cols, data):
    A = [[data.draw(entries) for _ in range(cols)] for _ in range(rows)]
    b = [data.draw(entries) for _ in range(rows)]
    M = sp.Matrix([[sp.Rational(x.numerator, x.denominator) for x in r] for r in A])
    rhs = sp.Matrix([sp.Rational(x.numerator, x.denominator) for x in b])
    consistent = M.rank() == M.row_join(rhs).rank()
    if not consistent:
        with pytest.raises(Infeasible):
            solve_rational_linear(A, b)
        return
    sol = solve_rational_linear(A, b)
    assert check_solution(A, sol.particular, b)
    assert sol.rank == M.rank()
    assert len(sol.kernel) == cols - M.rank()
    for v in sol.kernel:
        assert check_solution(A, v, [0] * rows)


def test_solution_entries_are_exact_rationals():
    sol = solve_rational_linear([[3, 0], [0, 7]], [1, Fraction(1, 2)])
    assert sol.particular == [Q(1, 3), Q(1, 14)]
