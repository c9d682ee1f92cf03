"""Discrete structural causal models with exact (rational) evaluation."""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from cfinvar.exceptions import InvalidQueryError, ValidationError
from cfinvar.graph import CausalDag, FiniteDomain, topological_order
from cfinvar.misc import format_rational

__all__ = [
    'Clause',
    'Comparison',
    'CounterfactualQuery',
    'DiscreteScm',
    'ExactDistribution',
    'NoiseSpec',
    'TabularMechanism',
    'ValidationReport',
    'WorldJoint',
    'append_function_node',
    'check_conditional_independence',
    'check_query',
    'counterfactual_probability',
    'ensure_valid',
    'evaluate',
    'intervene',
    'iter_noise',
    'joint_distribution',
    'mechanism_depends_on_parent',
    'remove_vacuous_edges',
    'replay',
    'sample_worlds',
    'validate_model',
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """Independent finite noise of one variable, indexed 0..k-1."""

    variable: str
    probabilities: tuple[Fraction, ...]

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'probabilities', tuple(Fraction(q) for q in self.probabilities))

    @property
    def size(self) -> int:
        """Number of noise values k."""
        return len(self.probabilities)

    def support(self) -> Iterator[tuple[int, Fraction]]:
        """(noise value, probability) pairs with positive probability."""
        return ((n, q) for n, q in enumerate(self.probabilities) if q > 0)

    @classmethod
    def uniform(cls, variable: str, size: int) -> 'NoiseSpec':
        """Uniform noise over `size` values."""
        return cls(variable, tuple(Fraction(1, size) for _ in range(size)))


@dataclass(frozen=True)
class TabularMechanism:
    """Structural assignment as a table (parent values, noise value) -> output value.

    Parent values in a table key follow the order of `parents`.
    """

    variable: str
    parents: tuple[str, ...]
    table: Mapping[tuple[tuple[Hashable, ...], int], Hashable]

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'parents', tuple(self.parents))

    def output(self, parent_values: Mapping[str, Hashable], noise: int) -> Hashable:
        """Output for an assignment of (at least) the parents and a noise value.

        Raises:
            ValidationError: the table has no row for the pair.

        """
        key = (tuple(parent_values[parent] for parent in self.parents), noise)
        try:
            return self.table[key]
        except KeyError:
            row = _render_row(self.parents, key)
            raise ValidationError([f'mechanism of {self.variable} has no row {row}']) from None

    @classmethod
    def tabulate(
        cls,
        variable: str,
        parents: Sequence[str],
        parent_domains: Sequence[FiniteDomain],
        noise_size: int,
        function: Callable[[Mapping[str, Hashable], int], Hashable],
    ) -> 'TabularMechanism':
        """Build the table of `function(parent assignment, noise)` over every row."""
        table = {}
        for values in itertools.product(*parent_domains):
            for noise in range(noise_size):
                table[(tuple(values), noise)] = function(dict(zip(parents, values)), noise)
        return cls(variable, tuple(parents), table)

    @classmethod
    def constant(cls, variable: str, value: Hashable, noise_size: int) -> 'TabularMechanism':
        """Parentless mechanism that outputs `value` for every noise value."""
        return cls(variable, (), {((), noise): value for noise in range(noise_size)})


def _render_row(parents: Sequence[str], key: tuple[tuple, int]) -> str:
    values, noise = key
    parts = [f'{parent}={value}' for parent, value in zip(parents, values)]
    parts.append(f'noise={noise}')
    return '(' + ', '.join(parts) + ')'


@dataclass(frozen=True)
class DiscreteScm:
    """DAG, one tabular mechanism and one independent noise per variable."""

    dag: CausalDag
    mechanisms: Mapping[str, TabularMechanism]
    noises: Mapping[str, NoiseSpec]

    @property
    def variables(self) -> tuple[str, ...]:
        """Variables in name order."""
        return self.dag.nodes

    @classmethod
    def from_functions(
        cls,
        domains: Mapping[str, Sequence[Hashable]],
        edges: Iterable[tuple[str, str]],
        noises: Mapping[str, Sequence[Fraction]],
        functions: Mapping[str, Callable[[Mapping[str, Hashable], int], Hashable]],
    ) -> 'DiscreteScm':
        """Tabulate a model from Python functions `f(parent assignment, noise) -> value`.

        Args:
            domains (Mapping[str, Sequence[Hashable]]): domain of every variable.
            edges (Iterable[tuple[str, str]]): (parent, child) pairs.
            noises (Mapping[str, Sequence[Fraction]]): noise probabilities of every variable.
            functions (Mapping[str, Callable]): structural assignment of every variable.

        Returns:
            DiscreteScm: the tabulated model.

        """
        dag = CausalDag(domains, edges)
        mechanisms = {}
        noise_specs = {}
        for variable in dag.nodes:
            parents = dag.parents(variable)
            noise_specs[variable] = NoiseSpec(variable, tuple(noises[variable]))
            mechanisms[variable] = TabularMechanism.tabulate(
                variable,
                parents,
                [dag.domain(parent) for parent in parents],
                noise_specs[variable].size,
                functions[variable],
            )
        return cls(dag, mechanisms, noise_specs)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of `validate_model`. Warnings (e.g. vacuous edges) do not make a model invalid."""

    violations: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        """Whether the model has no violation."""
        return not self.violations


@dataclass(frozen=True)
class ExactDistribution:
    """Exact law over a tuple of variables; only positive-probability assignments are stored."""

    variables: tuple[str, ...]
    probabilities: Mapping[tuple[Hashable, ...], Fraction]

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(
            self, 'probabilities', {key: Fraction(q) for key, q in self.probabilities.items() if q != 0}
        )

    def total(self) -> Fraction:
        """Sum of all probabilities."""
        return sum(self.probabilities.values(), Fraction(0))

    def support(self) -> list[tuple[dict[str, Hashable], Fraction]]:
        """(assignment, probability) pairs in sorted-key order."""
        return [
            (dict(zip(self.variables, key)), q)
            for key, q in sorted(self.probabilities.items(), key=lambda item: tuple(map(str, item[0])))
        ]

    def marginal(self, variables: Iterable[str]) -> 'ExactDistribution':
        """Law of a subset of the variables."""
        variables = tuple(variables)
        missing = [v for v in variables if v not in self.variables]
        if missing:
            raise InvalidQueryError(f'variables {missing} are not in the distribution')
        positions = [self.variables.index(v) for v in variables]
        result = defaultdict(Fraction)
        for key, q in self.probabilities.items():
            result[tuple(key[i] for i in positions)] += q
        return ExactDistribution(variables, result)

    def probability(self, assignment: Mapping[str, Hashable]) -> Fraction:
        """Marginal probability of a partial assignment."""
        variables = tuple(assignment)
        return self.marginal(variables).probabilities.get(tuple(assignment[v] for v in variables), Fraction(0))

    def conditional(self, event: Mapping[str, Hashable], given: Mapping[str, Hashable]) -> Fraction:
        """P(event | given).

        Raises:
            InvalidQueryError: the conditioning event has probability zero.

        """
        denominator = self.probability(given)
        if denominator == 0:
            raise InvalidQueryError(f'conditioning event {dict(given)} has probability zero')
        joint = dict(given)
        for variable, value in event.items():
            if variable in joint and joint[variable] != value:
                return Fraction(0)
            joint[variable] = value
        return self.probability(joint) / denominator


@dataclass(frozen=True)
class Clause:
    """Event that must hold in the world obtained by `intervention` (empty: the factual world)."""

    event: Mapping[str, Hashable]
    intervention: Mapping[str, Hashable] = field(default_factory=dict)


@dataclass(frozen=True)
class Comparison:
    """`variable` under `left` equals `variable` under `right`."""

    variable: str
    left: Mapping[str, Hashable]
    right: Mapping[str, Hashable]


@dataclass(frozen=True)
class CounterfactualQuery:
    """Conjunction of clauses and comparisons evaluated on one shared noise draw."""

    clauses: tuple[Clause, ...] = ()
    comparisons: tuple[Comparison, ...] = ()

    def interventions(self) -> list[dict[str, Hashable]]:
        """Distinct interventions the query refers to, in first-use order."""
        found = []
        mappings = [clause.intervention for clause in self.clauses]
        for comparison in self.comparisons:
            mappings.extend((comparison.left, comparison.right))
        for intervention in mappings:
            if dict(intervention) not in found:
                found.append(dict(intervention))
        return found

    @classmethod
    def invariance(cls, target: str, intervened: str, level: Hashable, other: Hashable) -> 'CounterfactualQuery':
        """The event Y(z) = Y(z')."""
        return cls(comparisons=(Comparison(target, {intervened: level}, {intervened: other}),))


@dataclass(frozen=True)
class WorldJoint:
    """Joint law of several worlds that share one noise draw.

    Each key holds one world per intervention; a world is a tuple of values following `order`.
    """

    order: tuple[str, ...]
    interventions: tuple[Mapping[str, Hashable], ...]
    probabilities: Mapping[tuple[tuple[Hashable, ...], ...], Fraction]

    def position(self, variable: str) -> int:
        """Index of `variable` inside a world tuple."""
        return self.order.index(variable)


def validate_model(model: DiscreteScm) -> ValidationReport:
    """Check every invariant of a model.

    Violations are returned as data and name the offending variable or table row.

    Args:
        model (DiscreteScm): The model.

    Returns:
        ValidationReport: violations and warnings.

    """
    dag = model.dag
    violations = dag.violations()
    warnings = []

    for variable in dag.nodes:
        if variable not in model.mechanisms:
            violations.append(f'{variable} has no mechanism')
        if variable not in model.noises:
            violations.append(f'{variable} has no noise')
    for variable in sorted(set(model.mechanisms) | set(model.noises)):
        if variable not in dag:
            violations.append(f'{variable} has a mechanism or noise but is not a declared variable')
    if violations:
        return ValidationReport(tuple(violations))

    for variable in dag.nodes:
        noise = model.noises[variable]
        if noise.variable != variable:
            violations.append(f'noise stored under {variable} is declared for {noise.variable}')
        if noise.size < 1:
            violations.append(f'noise of {variable} has no values')
        if any(q < 0 for q in noise.probabilities):
            violations.append(f'noise of {variable} has a negative probability')
        total = sum(noise.probabilities, Fraction(0))
        if total != 1:
            violations.append(f'noise of {variable} sums to {format_rational(total)}')

        mechanism = model.mechanisms[variable]
        if mechanism.variable != variable:
            violations.append(f'mechanism stored under {variable} is declared for {mechanism.variable}')
        parents = dag.parents(variable)
        if len(set(mechanism.parents)) != len(mechanism.parents) or set(mechanism.parents) != set(parents):
            violations.append(
                f'mechanism of {variable} uses parents {list(mechanism.parents)}, graph parents are {list(parents)}'
            )
            continue
        violations.extend(_table_violations(model, variable))

    if not violations:
        for child in dag.nodes:
            for parent in dag.parents(child):
                if not mechanism_depends_on_parent(model, child, parent):
                    warnings.append(f'edge {parent} -> {child} is vacuous')
                    logger.warning('edge %s -> %s is vacuous', parent, child)
    return ValidationReport(tuple(violations), tuple(warnings))


def _table_violations(model: DiscreteScm, variable: str) -> list[str]:
    dag = model.dag
    mechanism = model.mechanisms[variable]
    domain = dag.domain(variable)
    expected = set()
    violations = []
    for values in itertools.product(*(dag.domain(parent) for parent in mechanism.parents)):
        for noise in range(model.noises[variable].size):
            key = (tuple(values), noise)
            expected.add(key)
            if key not in mechanism.table:
                violations.append(f'mechanism of {variable} is missing row {_render_row(mechanism.parents, key)}')
            elif mechanism.table[key] not in domain:
                violations.append(
                    f'mechanism of {variable} outputs {mechanism.table[key]!r} outside its domain at row '
                    f'{_render_row(mechanism.parents, key)}'
                )
    for key in mechanism.table:
        if key not in expected:
            violations.append(f'mechanism of {variable} has unexpected row {key!r}')
    return violations


def ensure_valid(model: DiscreteScm) -> DiscreteScm:
    """Return the model, or raise ValidationError listing its violations."""
    report = validate_model(model)
    if not report.ok:
        raise ValidationError(report.violations)
    return model


def _check_assignment(dag: CausalDag, assignment: Mapping[str, Hashable], what: str) -> None:
    for variable, value in assignment.items():
        if variable not in dag:
            raise InvalidQueryError(f'{what} refers to unknown variable {variable!r}')
        if value not in dag.domain(variable):
            raise InvalidQueryError(f'{what} sets {variable} to {value!r}, outside its domain')


def iter_noise(model: DiscreteScm) -> Iterator[tuple[dict[str, int], Fraction]]:
    """Every noise tuple with positive probability, with its probability."""
    variables = model.dag.nodes
    supports = [list(model.noises[variable].support()) for variable in variables]
    for combination in itertools.product(*supports):
        weight = math.prod((q for _, q in combination), start=Fraction(1))
        yield {variable: n for variable, (n, _) in zip(variables, combination)}, weight


def evaluate(
    model: DiscreteScm, noise: Mapping[str, int], intervention: Mapping[str, Hashable] | None = None
) -> dict[str, Hashable]:
    """Replay the mechanisms for one noise tuple, with intervened variables forced.

    Args:
        model (DiscreteScm): The model.
        noise (Mapping[str, int]): Noise value of every variable.
        intervention (Mapping[str, Hashable], optional): Forced values. Default: None.

    Returns:
        dict[str, Hashable]: the world.

    """
    intervention = intervention or {}
    world = {}
    for variable in topological_order(model.dag):
        if variable in intervention:
            world[variable] = intervention[variable]
        else:
            world[variable] = model.mechanisms[variable].output(world, noise[variable])
    return world


def replay(model: DiscreteScm, interventions: Sequence[Mapping[str, Hashable]]) -> WorldJoint:
    """Joint law of the worlds under several interventions sharing one noise draw.

    This is the sum over noise tuples, carried out variable by variable in topological order with equal partial
    worlds merged, so the cost grows with the number of distinct partial worlds rather than with the number of
    noise tuples.

    Args:
        model (DiscreteScm): The model.
        interventions (Sequence[Mapping[str, Hashable]]): One intervention per world ({} for the factual world).

    Returns:
        WorldJoint: the joint law of the worlds.

    """
    interventions = tuple(dict(intervention) for intervention in interventions)
    for intervention in interventions:
        _check_assignment(model.dag, intervention, 'intervention')
    order = tuple(topological_order(model.dag))
    position = {variable: i for i, variable in enumerate(order)}

    states: dict[tuple, Fraction] = {tuple(() for _ in interventions): Fraction(1)}
    for variable in order:
        mechanism = model.mechanisms[variable]
        table = mechanism.table
        parent_positions = [position[parent] for parent in mechanism.parents]
        support = list(model.noises[variable].support())
        merged: dict[tuple, Fraction] = defaultdict(Fraction)
        for worlds, weight in states.items():
            for noise, q in support:
                extended = []
                for world, intervention in zip(worlds, interventions):
                    if variable in intervention:
                        value = intervention[variable]
                    else:
                        key = (tuple(world[i] for i in parent_positions), noise)
                        if key not in table:
                            raise ValidationError(
                                [f'mechanism of {variable} is missing row {_render_row(mechanism.parents, key)}']
                            )
                        value = table[key]
                    extended.append((*world, value))
                merged[tuple(extended)] += weight * q
        states = merged
    logger.debug('replayed %d worlds into %d joint states', len(interventions), len(states))
    return WorldJoint(order, interventions, dict(states))


def joint_distribution(model: DiscreteScm, over: Iterable[str]) -> ExactDistribution:
    """Exact observational law of a subset of the variables.

    Args:
        model (DiscreteScm): The model.
        over (Iterable[str]): Variables to keep, in the order of the result.

    Returns:
        ExactDistribution: the marginal law; over an empty subset, a single atom of mass 1.

    """
    over = tuple(over)
    model.dag.check_nodes(over)
    joint = replay(model, [{}])
    positions = [joint.position(variable) for variable in over]
    result = defaultdict(Fraction)
    for (world,), q in joint.probabilities.items():
        result[tuple(world[i] for i in positions)] += q
    return ExactDistribution(over, result)


def intervene(model: DiscreteScm, assignment: Mapping[str, Hashable]) -> DiscreteScm:
    """Replace the mechanism of every intervened variable by a constant and drop its parents.

    Noises are kept, so intervened and factual models share noise tuples.

    Args:
        model (DiscreteScm): The model.
        assignment (Mapping[str, Hashable]): Forced values.

    Raises:
        InvalidQueryError: unknown variable or value.

    Returns:
        DiscreteScm: the intervened model.

    """
    _check_assignment(model.dag, assignment, 'intervention')
    mechanisms = dict(model.mechanisms)
    for variable, value in assignment.items():
        mechanisms[variable] = TabularMechanism.constant(variable, value, model.noises[variable].size)
    return DiscreteScm(model.dag.without_incoming(assignment), mechanisms, dict(model.noises))


def check_query(dag: CausalDag, query: CounterfactualQuery) -> None:
    """Raise InvalidQueryError when a query refers to unknown variables or values, or sets an event variable."""
    for clause in query.clauses:
        _check_assignment(dag, clause.intervention, 'clause intervention')
        _check_assignment(dag, clause.event, 'clause event')
        overlap = set(clause.event) & set(clause.intervention)
        if overlap:
            raise InvalidQueryError(f'clause event refers to intervened variables {sorted(overlap)}')
    for comparison in query.comparisons:
        dag.check_node(comparison.variable)
        _check_assignment(dag, comparison.left, 'comparison intervention')
        _check_assignment(dag, comparison.right, 'comparison intervention')


def counterfactual_probability(model: DiscreteScm, query: CounterfactualQuery) -> Fraction:
    """Exact probability of a cross-world conjunction.

    Every clause and comparison is evaluated in the world of its own intervention, all worlds sharing one noise
    tuple; the result is the total weight of noise tuples satisfying all of them.

    Args:
        model (DiscreteScm): The model.
        query (CounterfactualQuery): The conjunction.

    Returns:
        Fraction: its probability (1 for the empty conjunction).

    """
    check_query(model.dag, query)
    interventions = query.interventions()
    joint = replay(model, interventions or [{}])
    index = {tuple(sorted(intervention.items(), key=str)): i for i, intervention in enumerate(interventions)}

    def world_of(intervention: Mapping[str, Hashable]) -> int:
        return index[tuple(sorted(dict(intervention).items(), key=str))]

    checks = []
    for clause in query.clauses:
        i = world_of(clause.intervention)
        checks.extend((i, joint.position(variable), value) for variable, value in clause.event.items())
    comparisons = [
        (world_of(comparison.left), world_of(comparison.right), joint.position(comparison.variable))
        for comparison in query.comparisons
    ]

    total = Fraction(0)
    for worlds, q in joint.probabilities.items():
        if all(worlds[i][p] == value for i, p, value in checks) and all(
            worlds[i][p] == worlds[j][p] for i, j, p in comparisons
        ):
            total += q
    return total


def mechanism_depends_on_parent(model: DiscreteScm, child: str, parent: str) -> bool:
    """Whether the mechanism of `child` functionally uses `parent`.

    True iff for some positive-probability noise value and some setting of the other parents, two values of the
    parent give different outputs. False means the edge is vacuous and can be removed.

    Raises:
        InvalidQueryError: `parent` is not a graph parent of `child`.

    """
    dag = model.dag
    if parent not in dag.parents(child):
        raise InvalidQueryError(f'{parent} is not a parent of {child}')
    mechanism = model.mechanisms[child]
    others = [p for p in mechanism.parents if p != parent]
    for noise, _ in model.noises[child].support():
        for values in itertools.product(*(dag.domain(p) for p in others)):
            assignment = dict(zip(others, values))
            outputs = {mechanism.output({**assignment, parent: value}, noise) for value in dag.domain(parent)}
            if len(outputs) > 1:
                return True
    return False


def remove_vacuous_edges(model: DiscreteScm) -> DiscreteScm:
    """Drop every edge whose parent the child's mechanism does not use."""
    dag = model.dag
    vacuous = [
        (parent, child)
        for child in dag.nodes
        for parent in dag.parents(child)
        if not mechanism_depends_on_parent(model, child, parent)
    ]
    if not vacuous:
        return model
    reduced = dag.without_edges(vacuous)
    mechanisms = dict(model.mechanisms)
    for child in {child for _, child in vacuous}:
        mechanism = model.mechanisms[child]
        # the dropped parents are pinned at their first value; positive-probability rows do not depend on them.
        pinned = {parent: dag.domain(parent).values[0] for parent, c in vacuous if c == child}
        parents = reduced.parents(child)
        mechanisms[child] = TabularMechanism.tabulate(
            child,
            parents,
            [dag.domain(p) for p in parents],
            model.noises[child].size,
            lambda assignment, noise, mechanism=mechanism, pinned=pinned: mechanism.output(
                {**assignment, **pinned}, noise
            ),
        )
    logger.debug('removed vacuous edges %s', vacuous)
    return DiscreteScm(reduced, mechanisms, dict(model.noises))


def append_function_node(model: DiscreteScm, function: Any, name: str = 'Yhat') -> DiscreteScm:
    """Append the deterministic node `name := f(inputs)` to a model.

    Args:
        model (DiscreteScm): The model.
        function (FunctionSpec): The function; its inputs become the parents of the new node.
        name (str, optional): Name of the new node. Default: 'Yhat'.

    Returns:
        DiscreteScm: the extended model.

    """
    dag = model.dag.with_node(name, function.codomain, function.inputs)
    parents = dag.parents(name)
    mechanisms = dict(model.mechanisms)
    mechanisms[name] = TabularMechanism.tabulate(
        name, parents, [dag.domain(p) for p in parents], 1, lambda assignment, _: function(assignment)
    )
    noises = dict(model.noises)
    noises[name] = NoiseSpec(name, (Fraction(1),))
    return DiscreteScm(dag, mechanisms, noises)


def check_conditional_independence(
    dist: ExactDistribution, a: Iterable[str], b: Iterable[str], s: Iterable[str] = ()
) -> bool:
    """Exact test of a _||_ b | s.

    Checks P(a, b, s) P(s) = P(a, s) P(b, s) for every assignment, which avoids division.

    Args:
        dist (ExactDistribution): The law.
        a (Iterable[str]): First variable set.
        b (Iterable[str]): Second variable set.
        s (Iterable[str], optional): Conditioning set. Default: ().

    Raises:
        InvalidQueryError: overlapping sets or unknown variables.

    Returns:
        bool: whether the independence holds exactly.

    """
    a, b, s = tuple(sorted(a)), tuple(sorted(b)), tuple(sorted(s))
    if set(a) & set(b) or set(a) & set(s) or set(b) & set(s):
        raise InvalidQueryError('independence sets must be pairwise disjoint')
    if not a or not b:
        dist.marginal(a + b + s)
        return True

    abs_ = dist.marginal(a + b + s).probabilities
    as_ = dist.marginal(a + s).probabilities
    bs_ = dist.marginal(b + s).probabilities
    s_ = dist.marginal(s).probabilities

    by_s = defaultdict(list)
    for key, q in bs_.items():
        by_s[key[len(b) :]].append((key[: len(b)], q))
    for key, q_as in as_.items():
        a_values, s_values = key[: len(a)], key[len(a) :]
        for b_values, q_bs in by_s.get(s_values, []):
            q_abs = abs_.get(a_values + b_values + s_values, Fraction(0))
            if q_abs * s_[s_values] != q_as * q_bs:
                return False
    return True


def sample_worlds(model: DiscreteScm, seed: int, n: int) -> list[dict[str, Hashable]]:
    """Draw worlds by sampling every noise independently and replaying the mechanisms.

    Args:
        model (DiscreteScm): The model.
        seed (int): Seed of the numpy generator; equal seeds give equal samples.
        n (int): Number of worlds.

    Returns:
        list[dict[str, Hashable]]: the sampled worlds.

    """
    if n < 0:
        raise InvalidQueryError('number of samples must be non-negative')
    rng = np.random.default_rng(seed)
    draws = {}
    for variable in model.dag.nodes:
        probabilities = np.array([float(q) for q in model.noises[variable].probabilities])
        draws[variable] = rng.choice(len(probabilities), size=n, p=probabilities / probabilities.sum())
    return [evaluate(model, {variable: int(draws[variable][i]) for variable in draws}) for i in range(n)]
