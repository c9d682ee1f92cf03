import random
from fractions import Fraction

import pytest

from cfinvar.exceptions import InfeasibleError, InvalidQueryError
from cfinvar.simplex import nullspace, row_echelon, solve_equality_lp


def test_minimize_and_maximize():
    # x1 + x2 + s = 1
    a_eq = [[1, 1, 1]]
    solution = solve_equality_lp(a_eq, [1], [-1, -1, 0])
    assert solution.value == -1
    assert sum(solution.x[:2]) == 1
    assert solve_equality_lp(a_eq, [1], [1, 2, 0], maximize=True).value == 2
    assert solve_equality_lp(a_eq, [1], [1, 2, 0]).value == 0


def test_negative_rhs():
    solution = solve_equality_lp([[-1, -1]], [-2], [1, 3])
    assert solution.value == 2
    assert solution.x == (2, 0)


def test_infeasible():
    with pytest.raises(InfeasibleError):
        solve_equality_lp([[1, 1]], [-1], [1, 1])
    with pytest.raises(InfeasibleError):
        solve_equality_lp([[1, 0], [1, 0]], [1, 2], [0, 0])


def test_unbounded():
    with pytest.raises(InvalidQueryError, match='unbounded'):
        solve_equality_lp([[1, -1]], [0], [-1, 0])


def test_inconsistent_sizes():
    with pytest.raises(InvalidQueryError):
        solve_equality_lp([[1, 1]], [1, 2], [0, 0])


def test_redundant_rows():
    a_eq = [[1, 1, 0], [2, 2, 0], [0, 0, 1]]
    solution = solve_equality_lp(a_eq, [1, 2, Fraction(1, 3)], [1, 0, 0])
    assert solution.value == 0
    assert solution.x == (0, 1, Fraction(1, 3))


def test_random_programs_against_feasible_points():
    rng = random.Random(7)
    for _ in range(40):
        m, n = rng.randint(1, 3), rng.randint(3, 6)
        a_eq = [[Fraction(rng.randint(0, 4)) for _ in range(n)] for _ in range(m)]
        points = [[Fraction(rng.randint(0, 5), rng.randint(1, 3)) for _ in range(n)] for _ in range(4)]
        b_eq = [sum(a * x for a, x in zip(row, points[0])) for row in a_eq]
        # points that satisfy the equations are feasible
        feasible = [p for p in points if all(sum(a * x for a, x in zip(row, p)) == b for row, b in zip(a_eq, b_eq))]
        c = [Fraction(rng.randint(0, 5)) for _ in range(n)]
        solution = solve_equality_lp(a_eq, b_eq, c)
        assert all(x >= 0 for x in solution.x)
        for row, b in zip(a_eq, b_eq):
            assert sum(a * x for a, x in zip(row, solution.x)) == b
        for point in feasible:
            assert solution.value <= sum(ci * xi for ci, xi in zip(c, point))


def test_deterministic_vertex():
    a_eq = [[1, 1, 1, 1]]
    first = solve_equality_lp(a_eq, [1], [0, 0, 0, 0])
    assert first == solve_equality_lp(a_eq, [1], [0, 0, 0, 0])


def test_row_echelon():
    rows, pivots = row_echelon([[2, 4], [1, 2]])
    assert rows == [[1, 2]]
    assert pivots == [0]
    rows, pivots = row_echelon([[0, 1, 2], [1, 0, 3]])
    assert rows == [[1, 0, 3], [0, 1, 2]]
    assert pivots == [0, 1]
    assert row_echelon([]) == ([], [])


def test_nullspace():
    basis = nullspace([[1, 1, 1]])
    assert len(basis) == 2
    for vector in basis:
        assert sum(vector) == 0
    assert nullspace([], n_cols=2) == [[1, 0], [0, 1]]
    assert nullspace([[1, 0], [0, 1]]) == []
