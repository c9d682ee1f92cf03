"""Observationally equivalent canonical models and sharp bounds on counterfactual quantities.

For a root intervened variable Z, a canonical model of the remaining variables is a distribution p over their
response-index tuples. It reproduces an observed law exactly when, for every level z with P(Z=z) > 0 and every
assignment v of the remaining variables, the tuples whose replay under do(Z=z) yields v carry P(v | Z=z). These
equations together with p >= 0 define a polytope; counterfactual probabilities are linear in p, so their extreme
values over it are linear programs.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Sequence

import numpy as np

from cfinvar.config import get_config
from cfinvar.exceptions import InvalidQueryError, ResourceLimitError, UnsupportedStructureError, ZeroProbabilityError
from cfinvar.graph import CausalDag
from cfinvar.misc import dynamic_default
from cfinvar.response import CanonicalResponseVector, ResponseFunctionTable, evaluate_world, response_table
from cfinvar.scm import Clause, CounterfactualQuery, ExactDistribution, check_query
from cfinvar.simplex import nullspace, solve_equality_lp

__all__ = [
    'BoundsResult',
    'ConditionalQuery',
    'ConstraintRow',
    'DegreeBounds',
    'EquivalencePolytope',
    'LinearFunctional',
    'OptimumResult',
    'build_polytope',
    'ci_degree_bounds',
    'conditional_query_bounds',
    'coordinate_functional',
    'degree_functional',
    'event_functional',
    'functional_bounds',
    'lambda_interval',
    'lp_optimize',
    'sample_polytope',
    'sample_polytope_per_seed',
    'sample_polytope_points',
]

logger = logging.getLogger(__name__)

INTERIOR_MARGIN = Fraction(1, 2**40)


@dataclass(frozen=True)
class ConstraintRow:
    """sum(p[c] for c in columns) == rhs, for one observable cell (Z=level, rest=cell)."""

    level: Hashable
    cell: tuple[Hashable, ...]
    columns: tuple[int, ...]
    rhs: Fraction


@dataclass(frozen=True)
class EquivalencePolytope:
    """Response distributions of the non-intervened variables that reproduce an observed law.

    Column c of the system is the response tuple `tuples[c]` over `variables`; `worlds[z][c]` is the replay of
    that tuple under do(Z=z), as values of `variables`.
    """

    dag: CausalDag
    intervened: str
    variables: tuple[str, ...]
    tables: Mapping[str, ResponseFunctionTable]
    tuples: tuple[tuple[int, ...], ...]
    rows: tuple[ConstraintRow, ...]
    worlds: Mapping[Hashable, tuple[tuple[Hashable, ...], ...]]
    intervened_marginal: Mapping[Hashable, Fraction]

    @property
    def dimension(self) -> int:
        """Number of response tuples m."""
        return len(self.tuples)

    def equality_system(self) -> tuple[list[list[Fraction]], list[Fraction]]:
        """Dense (A, b)."""
        matrix = []
        for row in self.rows:
            line = [Fraction(0)] * self.dimension
            for column in row.columns:
                line[column] = Fraction(1)
            matrix.append(line)
        return matrix, [row.rhs for row in self.rows]

    def affine_dimension(self) -> int:
        """Dimension of the affine hull of the equations (an upper bound for the polytope's)."""
        matrix, _ = self.equality_system()
        return len(nullspace(matrix, self.dimension))

    def column_of(self, indices: Sequence[int]) -> int:
        """Column of a response tuple."""
        try:
            return self.tuples.index(tuple(indices))
        except ValueError:
            raise InvalidQueryError(f'{tuple(indices)} is not a response tuple of {list(self.variables)}') from None

    def vector(self, point: Sequence[Fraction]) -> CanonicalResponseVector:
        """Canonical response vector of a point."""
        return CanonicalResponseVector(self.variables, dict(zip(self.tuples, point)))

    def is_feasible(self, point: Sequence[Fraction]) -> bool:
        """Exact membership test."""
        if len(point) != self.dimension or any(value < 0 for value in point):
            return False
        return all(sum((point[c] for c in row.columns), Fraction(0)) == row.rhs for row in self.rows)

    def reproduce_observation(self, point: Sequence[Fraction]) -> ExactDistribution:
        """Observational law of (Z, variables) when Z keeps its observed marginal and the rest follows `point`."""
        probabilities = defaultdict(Fraction)
        for level, weight in self.intervened_marginal.items():
            for column, q in enumerate(point):
                if q:
                    probabilities[(level, *self.worlds[level][column])] += weight * q
        return ExactDistribution((self.intervened, *self.variables), probabilities)


def build_polytope(
    dag: CausalDag, observed: ExactDistribution, intervened: str, limit: int | None = None
) -> EquivalencePolytope:
    """Constraint system of the canonical models equivalent to `observed`.

    Args:
        dag (CausalDag): The graph; `intervened` must be a root.
        observed (ExactDistribution): Observational law over (at least) every graph variable.
        intervened (str): Intervened variable Z.
        limit (int, optional): Largest number of response tuples. Default: the configured response limit.

    Raises:
        UnsupportedStructureError: Z has parents.
        ZeroProbabilityError: some level of Z has probability zero.
        InvalidQueryError: the observation misses graph variables or does not sum to one.
        ResourceLimitError: too many response tuples.

    Returns:
        EquivalencePolytope: the polytope.

    """
    dag.check_node(intervened)
    if dag.parents(intervened):
        raise UnsupportedStructureError(
            f'intervened variable {intervened} must be a root, it has parents {list(dag.parents(intervened))}'
        )
    missing = sorted(set(dag.nodes) - set(observed.variables))
    if missing:
        raise InvalidQueryError(f'observation does not cover {missing}')
    if observed.total() != 1:
        raise InvalidQueryError('observation does not sum to 1')

    variables = tuple(v for v in dag.nodes if v != intervened)
    joint = observed.marginal((intervened, *variables))
    marginal = observed.marginal((intervened,))
    levels = dag.domain(intervened).values
    zero = [level for level in levels if marginal.probabilities.get((level,), 0) == 0]
    if zero:
        raise ZeroProbabilityError(f'levels {zero} of {intervened} have probability zero')

    tables = {variable: response_table(dag, variable) for variable in variables}
    size = math.prod(tables[variable].count for variable in variables)
    limit = dynamic_default(limit, get_config().response_limit)
    if size > limit:
        raise ResourceLimitError('response tuple space', size, limit)
    tuples = tuple(itertools.product(*(range(tables[variable].count) for variable in variables)))

    worlds = {}
    rows = []
    for level in levels:
        replayed = []
        by_cell = defaultdict(list)
        for column, indices in enumerate(tuples):
            world = evaluate_world(dict(zip(variables, indices)), dag, {intervened: level}, tables)
            cell = tuple(world[variable] for variable in variables)
            replayed.append(cell)
            by_cell[cell].append(column)
        worlds[level] = tuple(replayed)
        weight = marginal.probabilities[(level,)]
        for cell in itertools.product(*(dag.domain(variable) for variable in variables)):
            rhs = joint.probabilities.get((level, *cell), Fraction(0)) / weight
            rows.append(ConstraintRow(level, cell, tuple(by_cell.get(cell, ())), rhs))

    logger.debug('polytope over %s: %d columns, %d rows', list(variables), len(tuples), len(rows))
    return EquivalencePolytope(
        dag,
        intervened,
        variables,
        tables,
        tuples,
        tuple(rows),
        worlds,
        {level: marginal.probabilities[(level,)] for level in levels},
    )


@dataclass(frozen=True)
class LinearFunctional:
    """Linear map p -> sum(coefficients[c] * p[c])."""

    coefficients: tuple[Fraction, ...]

    def __call__(self, point: Sequence[Fraction]) -> Fraction:  # noqa: D102
        if len(point) != len(self.coefficients):
            raise InvalidQueryError(f'functional has dimension {len(self.coefficients)}, point has {len(point)}')
        return sum((a * x for a, x in zip(self.coefficients, point) if a), Fraction(0))


def _check_dimension(polytope: EquivalencePolytope, functional: LinearFunctional) -> None:
    if len(functional.coefficients) != polytope.dimension:
        raise InvalidQueryError(
            f'functional has dimension {len(functional.coefficients)}, polytope has {polytope.dimension}'
        )


def degree_functional(
    polytope: EquivalencePolytope, target: str, pair: tuple[Hashable, Hashable] | None = None
) -> LinearFunctional:
    """P(Y(z) = Y(z')) as a functional: 1 on tuples whose replays agree on the target.

    Args:
        polytope (EquivalencePolytope): The polytope.
        target (str): Target Y.
        pair (tuple, optional): (z, z'). Default: the first two levels of Z (or the only level twice).

    Returns:
        LinearFunctional: the functional.

    """
    if target not in polytope.variables:
        raise InvalidQueryError(f'target {target!r} is not a non-intervened variable of the polytope')
    levels = polytope.dag.domain(polytope.intervened).values
    if pair is None:
        pair = (levels[0], levels[1] if len(levels) > 1 else levels[0])
    for level in pair:
        if level not in levels:
            raise InvalidQueryError(f'{level!r} is not a level of {polytope.intervened}')
    position = polytope.variables.index(target)
    left, right = polytope.worlds[pair[0]], polytope.worlds[pair[1]]
    return LinearFunctional(
        tuple(Fraction(int(a[position] == b[position])) for a, b in zip(left, right))
    )


def event_functional(polytope: EquivalencePolytope, query: CounterfactualQuery) -> LinearFunctional:
    """Probability of a cross-world conjunction as a functional.

    Every intervention of the query must set the intervened variable, so the worlds depend on the response tuple
    only.

    Raises:
        InvalidQueryError: an intervention leaves Z unset.

    """
    check_query(polytope.dag, query)
    for intervention in query.interventions():
        if polytope.intervened not in intervention:
            raise InvalidQueryError(f'every intervention must set {polytope.intervened}, got {intervention}')
    coefficients = []
    for indices in polytope.tuples:
        response = dict(zip(polytope.variables, indices))
        cache = {}

        def world(intervention: Mapping[str, Hashable], response: dict = response, cache: dict = cache) -> dict:
            token = tuple(sorted(dict(intervention).items(), key=str))
            if token not in cache:
                cache[token] = evaluate_world(response, polytope.dag, intervention, polytope.tables)
            return cache[token]

        holds = all(
            all(world(clause.intervention)[v] == value for v, value in clause.event.items())
            for clause in query.clauses
        ) and all(world(c.left)[c.variable] == world(c.right)[c.variable] for c in query.comparisons)
        coefficients.append(Fraction(int(holds)))
    return LinearFunctional(tuple(coefficients))


def coordinate_functional(polytope: EquivalencePolytope, indices: Sequence[int]) -> LinearFunctional:
    """Mass on one response tuple."""
    column = polytope.column_of(indices)
    return LinearFunctional(tuple(Fraction(int(c == column)) for c in range(polytope.dimension)))


@dataclass(frozen=True)
class OptimumResult:
    """Optimal value, the attaining vertex as a point and as a canonical vector."""

    value: Fraction
    point: tuple[Fraction, ...]
    vertex: CanonicalResponseVector
    pivots: int = 0


def lp_optimize(polytope: EquivalencePolytope, objective: LinearFunctional, sense: str = 'min') -> OptimumResult:
    """Exact optimum of a functional over the polytope.

    Args:
        polytope (EquivalencePolytope): The polytope.
        objective (LinearFunctional): The functional.
        sense (str, optional): 'min' or 'max'. Default: 'min'.

    Raises:
        InfeasibleError: the polytope is empty.

    Returns:
        OptimumResult: value and attaining vertex.

    """
    if sense not in ('min', 'max'):
        raise InvalidQueryError(f"sense must be 'min' or 'max', got {sense!r}")
    _check_dimension(polytope, objective)
    matrix, rhs = polytope.equality_system()
    solution = solve_equality_lp(matrix, rhs, objective.coefficients, maximize=sense == 'max')
    return OptimumResult(solution.value, solution.x, polytope.vector(solution.x), solution.pivots)


@dataclass(frozen=True)
class BoundsResult:
    """Sharp [min, max] of a quantity over the polytope with attaining vertices."""

    min: Fraction
    max: Fraction
    argmin: CanonicalResponseVector
    argmax: CanonicalResponseVector
    argmin_point: tuple[Fraction, ...] = ()
    argmax_point: tuple[Fraction, ...] = ()


@dataclass(frozen=True)
class DegreeBounds(BoundsResult):
    """Bounds on the degree of almost sure invariance."""

    @property
    def as_ci_possible(self) -> bool:
        """Some equivalent model is almost surely invariant."""
        return self.max == 1

    @property
    def as_ci_forced(self) -> bool:
        """Every equivalent model is almost surely invariant."""
        return self.min == 1


def functional_bounds(
    polytope: EquivalencePolytope, functional: LinearFunctional, scale: Fraction = Fraction(1)
) -> BoundsResult:
    """Min and max of `functional / scale`."""
    low = lp_optimize(polytope, functional, 'min')
    high = lp_optimize(polytope, functional, 'max')
    return BoundsResult(low.value / scale, high.value / scale, low.vertex, high.vertex, low.point, high.point)


def lambda_interval(polytope: EquivalencePolytope) -> BoundsResult:
    """Range of the mass on the constant-first-value response function (one target, binary root parent)."""
    if len(polytope.variables) != 1:
        raise UnsupportedStructureError('the response line needs exactly one non-intervened variable')
    return functional_bounds(polytope, coordinate_functional(polytope, (0,)))


def _max_min_degree(polytope: EquivalencePolytope, functionals: list[LinearFunctional]) -> OptimumResult:
    """max over p of min_k f_k(p), as the LP: maximize t with f_k(p) - t - s_k = 0, s_k >= 0."""
    m = polytope.dimension
    k = len(functionals)
    matrix, rhs = polytope.equality_system()
    a_eq = [line + [Fraction(0)] * (1 + k) for line in matrix]
    for i, functional in enumerate(functionals):
        slack = [Fraction(0)] * k
        slack[i] = Fraction(-1)
        a_eq.append([*functional.coefficients, Fraction(-1), *slack])
        rhs.append(Fraction(0))
    objective = [Fraction(0)] * m + [Fraction(1)] + [Fraction(0)] * k
    solution = solve_equality_lp(a_eq, rhs, objective, maximize=True)
    point = solution.x[:m]
    return OptimumResult(solution.value, point, polytope.vector(point), solution.pivots)


def ci_degree_bounds(
    dag: CausalDag,
    observed: ExactDistribution,
    target: str,
    intervened: str,
    polytope: EquivalencePolytope | None = None,
) -> DegreeBounds:
    """Sharp bounds on min over pairs (z, z') of P(Y(z) = Y(z')) among observationally equivalent models.

    The lower bound is the smallest pairwise minimum. The upper bound maximizes the minimum over pairs jointly,
    which for a binary Z is the maximum of the single pair functional.

    Args:
        dag (CausalDag): The graph.
        observed (ExactDistribution): Observational law.
        target (str): Target Y.
        intervened (str): Root intervened variable Z.
        polytope (EquivalencePolytope, optional): A prebuilt polytope for (dag, observed, intervened).

    Returns:
        DegreeBounds: the bounds with attaining vertices.

    """
    polytope = polytope if polytope is not None else build_polytope(dag, observed, intervened)
    levels = dag.domain(intervened).values
    pairs = list(itertools.combinations(levels, 2))
    if not pairs:
        point = lp_optimize(polytope, LinearFunctional((Fraction(0),) * polytope.dimension))
        return DegreeBounds(Fraction(1), Fraction(1), point.vertex, point.vertex, point.point, point.point)

    functionals = [degree_functional(polytope, target, pair) for pair in pairs]
    lows = [lp_optimize(polytope, functional, 'min') for functional in functionals]
    low = min(lows, key=lambda result: result.value)
    if len(functionals) == 1:
        high = lp_optimize(polytope, functionals[0], 'max')
    else:
        high = _max_min_degree(polytope, functionals)
    logger.debug('degree bounds of %s under %s: [%s, %s]', target, intervened, low.value, high.value)
    return DegreeBounds(low.value, high.value, low.vertex, high.vertex, low.point, high.point)


@dataclass(frozen=True)
class ConditionalQuery:
    """P(target(level) = value | given, Z = factual_level)."""

    target: str
    value: Hashable
    level: Hashable
    factual_level: Hashable
    given: Mapping[str, Hashable] | None = None


def conditional_query_bounds(
    dag: CausalDag, observed: ExactDistribution, intervened: str, query: ConditionalQuery
) -> BoundsResult:
    """Sharp bounds on a counterfactual conditional among observationally equivalent models.

    Z is a root with its own noise, so conditioning on Z = z amounts to the world do(Z=z); the numerator
    P(Y(z') = y, W(z) = w) is linear in p and the denominator P(W = w | Z = z) is fixed by the observation.

    Raises:
        InvalidQueryError: Z in the conditioning set.
        ZeroProbabilityError: P(W = w, Z = z) = 0.

    """
    given = dict(query.given or {})
    if intervened in given:
        raise InvalidQueryError(f'conditioning set must not contain the intervened variable {intervened}')
    polytope = build_polytope(dag, observed, intervened)
    condition = {**given, intervened: query.factual_level}
    check_query(dag, CounterfactualQuery((Clause({query.target: query.value}, {intervened: query.level}),)))
    denominator = observed.probability(condition) / observed.probability({intervened: query.factual_level})
    if denominator == 0:
        raise ZeroProbabilityError(f'conditioning event {condition} has probability zero')
    numerator = event_functional(
        polytope,
        CounterfactualQuery(
            (
                Clause({query.target: query.value}, {intervened: query.level}),
                Clause(given, {intervened: query.factual_level}),
            )
        ),
    )
    return functional_bounds(polytope, numerator, denominator)


def _relative_interior(polytope: EquivalencePolytope) -> tuple[list[Fraction], list[int]]:
    """A relative interior point and the coordinates that are positive somewhere on the polytope."""
    vertices = []
    free = []
    for column in range(polytope.dimension):
        best = lp_optimize(polytope, coordinate_functional(polytope, polytope.tuples[column]), 'max')
        if best.value > 0:
            free.append(column)
            vertices.append(best.point)
    if not vertices:
        vertices.append(lp_optimize(polytope, LinearFunctional((Fraction(0),) * polytope.dimension)).point)
    center = [sum((v[c] for v in vertices), Fraction(0)) / len(vertices) for c in range(polytope.dimension)]
    return center, free


@dataclass(frozen=True, eq=False)
class _WalkChart:
    """Exact start point, free coordinates and nullspace basis of the polytope, with their float forms."""

    center: list[Fraction]
    free: list[int]
    basis: list[list[Fraction]]
    float_basis: np.ndarray | None = None
    orthonormal: np.ndarray | None = None
    origin: np.ndarray | None = None


def _walk_chart(polytope: EquivalencePolytope) -> _WalkChart:
    center, free = _relative_interior(polytope)
    matrix, _ = polytope.equality_system()
    reduced = [[line[c] for c in free] for line in matrix]
    basis = nullspace(reduced, len(free)) if free else []
    logger.debug('hit-and-run over %d free coordinates, dimension %d', len(free), len(basis))
    if not basis:
        return _WalkChart(center, free, basis)
    float_basis = np.array([[float(value) for value in vector] for vector in basis]).T
    orthonormal, _ = np.linalg.qr(float_basis)
    origin = np.array([float(center[c]) for c in free])
    return _WalkChart(center, free, basis, float_basis, orthonormal, origin)


def _walk(
    chart: _WalkChart, rng: np.random.Generator, n: int, burn_in: int, thinning: int
) -> list[tuple[Fraction, ...]]:
    if not chart.basis:
        return [tuple(chart.center) for _ in range(n)]
    current = chart.origin.copy()
    points = []
    step = 0
    while len(points) < n:
        direction = chart.orthonormal @ rng.standard_normal(chart.orthonormal.shape[1])
        direction /= np.linalg.norm(direction)
        with np.errstate(divide='ignore', invalid='ignore'):
            bounds = -current / direction
        low = np.max(bounds[direction > 0], initial=-np.inf)
        high = np.min(bounds[direction < 0], initial=np.inf)
        current = current + rng.uniform(low, high) * direction
        step += 1
        if step > burn_in and (step - burn_in) % thinning == 0:
            points.append(_snap(chart.center, chart.free, chart.basis, chart.float_basis, current - chart.origin))
    return points


def sample_polytope_points(
    polytope: EquivalencePolytope,
    n: int,
    seed: int,
    burn_in: int | None = None,
    thinning: int | None = None,
) -> list[tuple[Fraction, ...]]:
    """Exactly feasible points from a hit-and-run walk over the polytope.

    The walk runs in floating point inside the affine hull of the coordinates that are not identically zero,
    starting at a relative interior point. Each kept float point is mapped back through an exact rational
    nullspace basis, so the equations hold exactly, and pulled toward the start point if rounding left a
    coordinate negative.

    Args:
        polytope (EquivalencePolytope): The polytope.
        n (int): Number of points.
        seed (int): Seed of the numpy generator.
        burn_in (int, optional): Steps discarded first. Default: the configured burn-in.
        thinning (int, optional): Steps between kept points. Default: the configured thinning.

    Returns:
        list[tuple[Fraction, ...]]: the points.

    """
    if n < 0:
        raise InvalidQueryError('number of samples must be non-negative')
    if n == 0:
        return []
    config = get_config()
    burn_in = dynamic_default(burn_in, config.burn_in)
    thinning = dynamic_default(thinning, config.thinning)
    return _walk(_walk_chart(polytope), np.random.default_rng(seed), n, burn_in, thinning)


def sample_polytope_per_seed(
    polytope: EquivalencePolytope, seeds: Sequence[int], burn_in: int | None = None
) -> list[tuple[Fraction, ...]]:
    """One point per seed, each from its own walk of `burn_in + 1` steps.

    The point for a seed equals `sample_polytope_points(polytope, 1, seed, burn_in, thinning=1)[0]`, so every
    sample can be reproduced on its own.

    Args:
        polytope (EquivalencePolytope): The polytope.
        seeds (Sequence[int]): Seed of every walk.
        burn_in (int, optional): Steps discarded first. Default: the configured burn-in.

    Returns:
        list[tuple[Fraction, ...]]: the points, in the order of `seeds`.

    """
    if not seeds:
        return []
    burn_in = dynamic_default(burn_in, get_config().burn_in)
    chart = _walk_chart(polytope)
    return [_walk(chart, np.random.default_rng(seed), 1, burn_in, 1)[0] for seed in seeds]


def _snap(
    center: list[Fraction], free: list[int], basis: list[list[Fraction]], float_basis: np.ndarray, offset: np.ndarray
) -> tuple[Fraction, ...]:
    """Exact point center + sum(alpha_k basis_k), with alpha the float coordinates of `offset`."""
    alpha, *_ = np.linalg.lstsq(float_basis, offset, rcond=None)
    delta = [Fraction(0)] * len(free)
    for coefficient, vector in zip(alpha, basis):
        coefficient = Fraction(float(coefficient))
        if coefficient:
            delta = [d + coefficient * v for d, v in zip(delta, vector)]
    shrink = Fraction(1)
    for i, c in enumerate(free):
        if center[c] + delta[i] < 0:
            shrink = min(shrink, center[c] / -delta[i])
    if shrink < 1:
        # stay strictly inside the face the walk was on.
        shrink *= 1 - INTERIOR_MARGIN
        logger.warning('snapped point pulled toward the center by %s', float(shrink))
    point = list(center)
    for i, c in enumerate(free):
        point[c] = center[c] + shrink * delta[i]
    return tuple(point)


def sample_polytope(
    polytope: EquivalencePolytope,
    n: int,
    seed: int,
    burn_in: int | None = None,
    thinning: int | None = None,
) -> list[CanonicalResponseVector]:
    """`sample_polytope_points` as canonical response vectors."""
    return [polytope.vector(point) for point in sample_polytope_points(polytope, n, seed, burn_in, thinning)]
