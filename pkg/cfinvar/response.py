"""Response-function canonical form of discrete mechanisms.

A response function of a variable is a deterministic map from parent assignments to values. With P parent
assignments and V values there are V**P of them, indexed by base-V numbers: parent assignments are listed in
lexicographic order (first parent most significant) and the digit of weight V**j is the output index at the j-th
assignment. For one binary parent and a binary codomain, index 0 is constant 0, 1 is negation, 2 is identity and
3 is constant 1.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

from cfinvar.config import get_config
from cfinvar.exceptions import InvalidQueryError, ResourceLimitError
from cfinvar.graph import CausalDag, FiniteDomain, topological_order
from cfinvar.misc import dynamic_default
from cfinvar.scm import CounterfactualQuery, DiscreteScm, ExactDistribution, check_query

__all__ = [
    'RESPONSE_LINE_ORDER',
    'CanonicalResponseVector',
    'ProductCanonicalScm',
    'ResponseFunctionTable',
    'canonical_counterfactual_probability',
    'canonical_distribution',
    'canonicalize',
    'enumerate_response_functions',
    'evaluate_world',
    'response_table',
    'to_joint_vector',
]

logger = logging.getLogger(__name__)

# canonical indices of the listing (constant 0, constant 1, identity, negation) for one binary parent.
RESPONSE_LINE_ORDER = (0, 3, 2, 1)


@dataclass(frozen=True)
class ResponseFunctionTable:
    """Bijection between indices 0..count-1 and the functions parent assignments -> codomain.

    Nothing is materialized: evaluating an index at an assignment is digit extraction.
    """

    variable: str
    parents: tuple[str, ...]
    parent_domains: tuple[FiniteDomain, ...]
    codomain: FiniteDomain

    @property
    def parent_size(self) -> int:
        """Number of parent assignments P."""
        return math.prod(len(domain) for domain in self.parent_domains)

    @property
    def count(self) -> int:
        """Number of response functions V**P."""
        return len(self.codomain) ** self.parent_size

    def parent_assignments(self) -> Iterator[tuple[Hashable, ...]]:
        """Parent assignments in canonical (lexicographic) order."""
        return itertools.product(*self.parent_domains)

    def position(self, parent_values: Mapping[str, Hashable] | Sequence[Hashable]) -> int:
        """Position of a parent assignment in the canonical order."""
        if isinstance(parent_values, Mapping):
            parent_values = [parent_values[parent] for parent in self.parents]
        position = 0
        for domain, value in zip(self.parent_domains, parent_values):
            position = position * len(domain) + domain.index(value)
        return position

    def _check_index(self, index: int) -> None:
        if not 0 <= index < self.count:
            raise InvalidQueryError(f'response index {index} of {self.variable} is outside 0..{self.count - 1}')

    def evaluate(self, index: int, parent_values: Mapping[str, Hashable] | Sequence[Hashable]) -> Hashable:
        """Output of response function `index` at a parent assignment."""
        self._check_index(index)
        digit = (index // len(self.codomain) ** self.position(parent_values)) % len(self.codomain)
        return self.codomain.values[digit]

    def outputs(self, index: int) -> list[Hashable]:
        """Outputs of response function `index` over every parent assignment, in canonical order."""
        self._check_index(index)
        size = len(self.codomain)
        values = []
        for _ in range(self.parent_size):
            index, digit = divmod(index, size)
            values.append(self.codomain.values[digit])
        return values

    def index_of(self, outputs: Sequence[Hashable]) -> int:
        """Index of the function with the given outputs (in canonical assignment order)."""
        if len(outputs) != self.parent_size:
            raise InvalidQueryError(f'expected {self.parent_size} outputs for {self.variable}, got {len(outputs)}')
        index = 0
        for value in reversed(outputs):
            index = index * len(self.codomain) + self.codomain.index(value)
        return index

    def digits(self, index: int) -> str:
        """Output value indices of a function as a string, e.g. '01' for the binary identity."""
        codes = [str(self.codomain.index(value)) for value in self.outputs(index)]
        return ''.join(codes) if len(self.codomain) <= 10 else '.'.join(codes)


def enumerate_response_functions(
    parent_domains: Sequence[FiniteDomain | Sequence],
    codomain: FiniteDomain | Sequence,
    variable: str = '',
    parents: Sequence[str] | None = None,
    limit: int | None = None,
) -> ResponseFunctionTable:
    """Response functions from the product of the parent domains into the codomain.

    Args:
        parent_domains (Sequence[FiniteDomain | Sequence]): Domain of every parent, in parent order.
        codomain (FiniteDomain | Sequence): Values of the variable.
        variable (str, optional): Name of the variable. Default: ''.
        parents (Sequence[str], optional): Parent names. Default: positional names.
        limit (int, optional): Largest allowed count. Default: the configured response limit.

    Raises:
        InvalidQueryError: empty codomain.
        ResourceLimitError: more functions than `limit`.

    Returns:
        ResponseFunctionTable: the index <-> function bijection.

    """
    parent_domains = tuple(d if isinstance(d, FiniteDomain) else FiniteDomain(tuple(d)) for d in parent_domains)
    codomain = codomain if isinstance(codomain, FiniteDomain) else FiniteDomain(tuple(codomain))
    if len(codomain) < 1:
        raise InvalidQueryError('codomain must have at least one value')
    parents = tuple(parents) if parents is not None else tuple(f'_{i}' for i in range(len(parent_domains)))
    table = ResponseFunctionTable(variable, parents, parent_domains, codomain)
    limit = dynamic_default(limit, get_config().response_limit)
    if table.count > limit:
        raise ResourceLimitError(f'response functions of {variable or "variable"}', table.count, limit)
    return table


def response_table(dag: CausalDag, variable: str) -> ResponseFunctionTable:
    """Response functions of a graph variable over its graph parents (no size limit)."""
    parents = dag.parents(variable)
    return ResponseFunctionTable(variable, parents, tuple(dag.domain(p) for p in parents), dag.domain(variable))


@dataclass(frozen=True)
class CanonicalResponseVector:
    """Distribution over response-index tuples of `variables`; only positive entries are stored."""

    variables: tuple[str, ...]
    probabilities: Mapping[tuple[int, ...], Fraction]

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'variables', tuple(self.variables))
        object.__setattr__(
            self, 'probabilities', {key: Fraction(q) for key, q in self.probabilities.items() if q != 0}
        )

    def total(self) -> Fraction:
        """Sum of the entries."""
        return sum(self.probabilities.values(), Fraction(0))

    def get(self, indices: Sequence[int]) -> Fraction:
        """Probability of one response tuple."""
        return self.probabilities.get(tuple(indices), Fraction(0))

    def dense(self, counts: Sequence[int]) -> list[Fraction]:
        """Every entry, zeros included, with tuples in lexicographic index order."""
        return [self.get(key) for key in itertools.product(*(range(count) for count in counts))]

    def marginal(self, variables: Iterable[str]) -> 'CanonicalResponseVector':
        """Distribution of a subset of the response indices."""
        variables = tuple(variables)
        positions = [self.variables.index(variable) for variable in variables]
        result = defaultdict(Fraction)
        for key, q in self.probabilities.items():
            result[tuple(key[i] for i in positions)] += q
        return CanonicalResponseVector(variables, result)


@dataclass(frozen=True)
class ProductCanonicalScm:
    """Independent distributions over the response indices of every variable."""

    dag: CausalDag
    tables: Mapping[str, ResponseFunctionTable]
    distributions: Mapping[str, Mapping[int, Fraction]]

    def support(self, variable: str) -> list[tuple[int, Fraction]]:
        """(index, probability) pairs with positive probability in index order."""
        return sorted((index, q) for index, q in self.distributions[variable].items() if q > 0)


def canonicalize(model: DiscreteScm) -> ProductCanonicalScm:
    """Re-express every noise as a distribution over the response functions its rows realize.

    The probability of an index is the total probability of the noise values whose mechanism rows realize it.

    Args:
        model (DiscreteScm): A valid model.

    Returns:
        ProductCanonicalScm: the canonical model; its observational and counterfactual laws equal the model's.

    """
    dag = model.dag
    tables = {}
    distributions = {}
    for variable in dag.nodes:
        table = response_table(dag, variable)
        mechanism = model.mechanisms[variable]
        assignments = [dict(zip(table.parents, values)) for values in table.parent_assignments()]
        distribution = defaultdict(Fraction)
        for noise, q in model.noises[variable].support():
            distribution[table.index_of([mechanism.output(assignment, noise) for assignment in assignments])] += q
        tables[variable] = table
        distributions[variable] = dict(distribution)
    return ProductCanonicalScm(dag, tables, distributions)


def to_joint_vector(
    canon: ProductCanonicalScm, over: Iterable[str] | None = None, limit: int | None = None
) -> CanonicalResponseVector:
    """Product measure over the response indices of the listed variables.

    Args:
        canon (ProductCanonicalScm): The canonical model.
        over (Iterable[str], optional): Variables, in the order of the tuples. Default: all variables.
        limit (int, optional): Largest number of tuples. Default: the configured response limit.

    Raises:
        InvalidQueryError: empty or unknown variable list.
        ResourceLimitError: too many tuples.

    Returns:
        CanonicalResponseVector: the joint vector.

    """
    over = tuple(over) if over is not None else canon.dag.nodes
    if not over:
        raise InvalidQueryError('a joint response vector needs at least one variable')
    canon.dag.check_nodes(over)
    supports = [canon.support(variable) for variable in over]
    size = math.prod(len(support) for support in supports)
    limit = dynamic_default(limit, get_config().response_limit)
    if size > limit:
        raise ResourceLimitError('joint response vector', size, limit)
    probabilities = {}
    for combination in itertools.product(*supports):
        probabilities[tuple(index for index, _ in combination)] = math.prod(
            (q for _, q in combination), start=Fraction(1)
        )
    return CanonicalResponseVector(over, probabilities)


def evaluate_world(
    response: Mapping[str, int],
    dag: CausalDag,
    intervention: Mapping[str, Hashable] | None = None,
    tables: Mapping[str, ResponseFunctionTable] | None = None,
) -> dict[str, Hashable]:
    """Replay response functions in topological order.

    Args:
        response (Mapping[str, int]): Response index of every non-intervened variable.
        dag (CausalDag): The graph.
        intervention (Mapping[str, Hashable], optional): Forced values. Default: None.
        tables (Mapping[str, ResponseFunctionTable], optional): Prebuilt tables. Default: built from the graph.

    Raises:
        InvalidQueryError: a required index is missing.

    Returns:
        dict[str, Hashable]: the world.

    """
    intervention = intervention or {}
    world = {}
    for variable in topological_order(dag):
        if variable in intervention:
            world[variable] = intervention[variable]
            continue
        if variable not in response:
            raise InvalidQueryError(f'no response index for {variable}')
        table = tables[variable] if tables is not None else response_table(dag, variable)
        world[variable] = table.evaluate(response[variable], world)
    return world


def canonical_distribution(
    canon: ProductCanonicalScm, over: Iterable[str], intervention: Mapping[str, Hashable] | None = None
) -> ExactDistribution:
    """Law of `over` induced by a canonical model, optionally under an intervention."""
    over = tuple(over)
    vector = to_joint_vector(canon)
    result = defaultdict(Fraction)
    for key, q in vector.probabilities.items():
        world = evaluate_world(dict(zip(vector.variables, key)), canon.dag, intervention, canon.tables)
        result[tuple(world[variable] for variable in over)] += q
    return ExactDistribution(over, result)


def canonical_counterfactual_probability(canon: ProductCanonicalScm, query: CounterfactualQuery) -> Fraction:
    """Probability of a cross-world conjunction, summing over response tuples instead of noise tuples."""
    check_query(canon.dag, query)
    vector = to_joint_vector(canon)
    total = Fraction(0)
    for key, q in vector.probabilities.items():
        response = dict(zip(vector.variables, key))
        worlds = {}

        def world(intervention: Mapping[str, Hashable], response: dict = response, worlds: dict = worlds) -> dict:
            token = tuple(sorted(dict(intervention).items(), key=str))
            if token not in worlds:
                worlds[token] = evaluate_world(response, canon.dag, intervention, canon.tables)
            return worlds[token]

        if all(
            all(world(clause.intervention)[v] == value for v, value in clause.event.items())
            for clause in query.clauses
        ) and all(
            world(comparison.left)[comparison.variable] == world(comparison.right)[comparison.variable]
            for comparison in query.comparisons
        ):
            total += q
    return total
