"""Exact linear programming and linear algebra over the rationals."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from cfinvar.exceptions import InfeasibleError, InvalidQueryError

__all__ = ['LinearProgramSolution', 'nullspace', 'row_echelon', 'solve_equality_lp']

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearProgramSolution:
    """Optimal value, an optimal basic solution and the number of pivots taken."""

    value: Fraction
    x: tuple[Fraction, ...]
    pivots: int


def _pivot(tableau: list[list[Fraction]], basis: list[int], row: int, col: int) -> None:
    pivot_row = tableau[row]
    factor = pivot_row[col]
    if factor != 1:
        tableau[row] = pivot_row = [value / factor for value in pivot_row]
    for i, other in enumerate(tableau):
        if i == row:
            continue
        multiple = other[col]
        if multiple != 0:
            tableau[i] = [a - multiple * b for a, b in zip(other, pivot_row)]
    basis[row] = col


def _run_simplex(
    tableau: list[list[Fraction]], basis: list[int], cost: Sequence[Fraction], columns: int
) -> tuple[int, bool]:
    """Minimize cost . x over a tableau in canonical form; only the first `columns` columns may enter.

    Bland's rule: the lowest-index improving column enters, ties in the ratio test leave by lowest basis index.
    Returns the number of pivots and whether the problem is bounded.
    """
    pivots = 0
    while True:
        entering = None
        for j in range(columns):
            if j in basis:
                continue
            reduced = cost[j] - sum((cost[b] * row[j] for b, row in zip(basis, tableau) if row[j] != 0), Fraction(0))
            if reduced < 0:
                entering = j
                break
        if entering is None:
            return pivots, True

        leaving = None
        best = None
        for i, row in enumerate(tableau):
            if row[entering] > 0:
                ratio = row[-1] / row[entering]
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leaving]):
                    best, leaving = ratio, i
        if leaving is None:
            return pivots, False
        _pivot(tableau, basis, leaving, entering)
        pivots += 1


def solve_equality_lp(
    a_eq: Sequence[Sequence[Fraction]], b_eq: Sequence[Fraction], c: Sequence[Fraction], maximize: bool = False
) -> LinearProgramSolution:
    """Optimize c . x subject to A x = b and x >= 0, exactly.

    Two-phase simplex on a dense tableau of Fractions: phase one drives artificial variables to zero, redundant
    rows are dropped, phase two optimizes the objective. Pivoting follows Bland's rule, so the result
    (including the returned vertex) is deterministic.

    Args:
        a_eq (Sequence[Sequence[Fraction]]): Constraint matrix, one row per equation.
        b_eq (Sequence[Fraction]): Right-hand side.
        c (Sequence[Fraction]): Objective coefficients.
        maximize (bool, optional): Maximize instead of minimize. Default: False.

    Raises:
        InvalidQueryError: inconsistent dimensions or an unbounded objective.
        InfeasibleError: no x >= 0 satisfies the equations.

    Returns:
        LinearProgramSolution: optimal value and vertex.

    """
    n = len(c)
    if len(a_eq) != len(b_eq) or any(len(row) != n for row in a_eq):
        raise InvalidQueryError('constraint matrix, right-hand side and objective have inconsistent sizes')
    m = len(a_eq)

    tableau = []
    for i, (row, rhs) in enumerate(zip(a_eq, b_eq)):
        row = [Fraction(value) for value in row]
        rhs = Fraction(rhs)
        if rhs < 0:
            row, rhs = [-value for value in row], -rhs
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        tableau.append(row + artificial + [rhs])
    basis = list(range(n, n + m))

    phase_one_cost = [Fraction(0)] * n + [Fraction(1)] * m
    pivots, _ = _run_simplex(tableau, basis, phase_one_cost, n + m)
    infeasibility = sum((row[-1] for b, row in zip(basis, tableau) if b >= n), Fraction(0))
    if infeasibility != 0:
        raise InfeasibleError(f'linear constraints are infeasible (phase one residual {infeasibility})')

    # drive the remaining (zero-valued) artificial variables out of the basis.
    i = 0
    while i < len(tableau):
        if basis[i] >= n:
            column = next((j for j in range(n) if tableau[i][j] != 0), None)
            if column is None:
                del tableau[i]
                del basis[i]
                continue
            _pivot(tableau, basis, i, column)
            pivots += 1
        i += 1

    sign = Fraction(-1) if maximize else Fraction(1)
    cost = [sign * Fraction(value) for value in c] + [Fraction(0)] * m
    more, bounded = _run_simplex(tableau, basis, cost, n)
    pivots += more
    if not bounded:
        raise InvalidQueryError('objective is unbounded')

    x = [Fraction(0)] * n
    for b, row in zip(basis, tableau):
        x[b] = row[-1]
    value = sum((Fraction(ci) * xi for ci, xi in zip(c, x)), Fraction(0))
    logger.debug('lp with %d rows and %d columns solved in %d pivots', m, n, pivots)
    return LinearProgramSolution(value, tuple(x), pivots)


def row_echelon(matrix: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form.

    Args:
        matrix (Sequence[Sequence[Fraction]]): The matrix.

    Returns:
        tuple[list[list[Fraction]], list[int]]: the nonzero rows of the reduced form and the pivot columns.

    """
    rows = [[Fraction(value) for value in row] for row in matrix]
    if not rows:
        return [], []
    n_cols = len(rows[0])
    pivots = []
    pivot_row = 0
    for col in range(n_cols):
        found = next((r for r in range(pivot_row, len(rows)) if rows[r][col] != 0), None)
        if found is None:
            continue
        rows[pivot_row], rows[found] = rows[found], rows[pivot_row]
        lead = rows[pivot_row][col]
        rows[pivot_row] = [value / lead for value in rows[pivot_row]]
        for r in range(len(rows)):
            if r != pivot_row and rows[r][col] != 0:
                factor = rows[r][col]
                rows[r] = [a - factor * b for a, b in zip(rows[r], rows[pivot_row])]
        pivots.append(col)
        pivot_row += 1
        if pivot_row == len(rows):
            break
    return rows[:pivot_row], pivots


def nullspace(matrix: Sequence[Sequence[Fraction]], n_cols: int | None = None) -> list[list[Fraction]]:
    """Basis of {x : M x = 0}, one vector per free column.

    Args:
        matrix (Sequence[Sequence[Fraction]]): The matrix.
        n_cols (int, optional): Number of columns, needed when the matrix has no rows. Default: None.

    Returns:
        list[list[Fraction]]: the basis vectors.

    """
    if n_cols is None:
        n_cols = len(matrix[0])
    reduced, pivots = row_echelon(matrix)
    free = [col for col in range(n_cols) if col not in pivots]
    basis = []
    for col in free:
        vector = [Fraction(0)] * n_cols
        vector[col] = Fraction(1)
        for row, pivot in zip(reduced, pivots):
            vector[pivot] = -row[col]
        basis.append(vector)
    return basis
