"""Causal graphs: descendants, d-separation and covariate adjustment."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Sequence

import networkx as nx

from cfinvar.config import ADJUSTMENT_READINGS, get_config
from cfinvar.exceptions import CycleError, InvalidQueryError
from cfinvar.misc import dynamic_default, render_set, subsets

__all__ = [
    'AdjustmentSet',
    'CausalDag',
    'FiniteDomain',
    'IndependenceStatement',
    'adjustment_reading_discrepancies',
    'augment_with_function',
    'd_separated',
    'descendants',
    'enumerate_adjustment_sets',
    'implied_independences',
    'is_valid_adjustment_set',
    'non_descendants',
    'proper_backdoor_graph',
    'topological_order',
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FiniteDomain:
    """Ordered finite set of values a variable can take."""

    values: tuple[Hashable, ...]

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'values', tuple(self.values))

    def __len__(self) -> int:  # noqa: D105
        return len(self.values)

    def __iter__(self) -> Iterator[Hashable]:  # noqa: D105
        return iter(self.values)

    def __contains__(self, value: object) -> bool:  # noqa: D105
        return value in self.values

    def index(self, value: Hashable) -> int:
        """Position of `value` in the canonical order."""
        try:
            return self.values.index(value)
        except ValueError:
            raise InvalidQueryError(f'{value!r} is not in the domain {list(self.values)}') from None

    def parse(self, token: str) -> Hashable:
        """Find the value whose text form is `token`.

        Args:
            token (str): Text as written in a document.

        Raises:
            InvalidQueryError: no value matches.

        Returns:
            Hashable: the domain value.

        """
        for value in self.values:
            if str(value) == token:
                return value
        raise InvalidQueryError(f'{token!r} is not in the domain {[str(v) for v in self.values]}')


class CausalDag:
    """Directed acyclic graph over named variables, each with a finite domain.

    The object is immutable; derived graphs are built by `without_incoming`, `with_node` and `subgraph`.

    Args:
        domains (Mapping[str, FiniteDomain | Sequence]): domain of every variable.
        edges (Iterable[tuple[str, str]]): (parent, child) pairs.

    """

    def __init__(  # noqa: D107
        self, domains: Mapping[str, FiniteDomain | Sequence], edges: Iterable[tuple[str, str]] = ()
    ) -> None:
        self._domains = {
            str(name): domain if isinstance(domain, FiniteDomain) else FiniteDomain(tuple(domain))
            for name, domain in domains.items()
        }
        self._edges = tuple(sorted({(str(parent), str(child)) for parent, child in edges}))
        self._graph = nx.DiGraph()
        self._graph.add_nodes_from(sorted(self._domains))
        self._graph.add_edges_from(self._edges)

    def __repr__(self) -> str:  # noqa: D105
        edges = ', '.join(f'{p}->{c}' for p, c in self._edges)
        return f'CausalDag(nodes={list(self.nodes)}, edges=[{edges}])'

    def __eq__(self, other: object) -> bool:  # noqa: D105
        if not isinstance(other, CausalDag):
            return NotImplemented
        return self._domains == other._domains and self._edges == other._edges

    def __hash__(self) -> int:  # noqa: D105
        return hash((tuple(sorted(self._domains.items())), self._edges))

    def __contains__(self, node: object) -> bool:  # noqa: D105
        return node in self._domains

    @property
    def nodes(self) -> tuple[str, ...]:
        """Declared variables in name order."""
        return tuple(sorted(self._domains))

    @property
    def edges(self) -> tuple[tuple[str, str], ...]:
        """(parent, child) pairs in sorted order."""
        return self._edges

    @property
    def domains(self) -> dict[str, FiniteDomain]:
        """Copy of the variable to domain map."""
        return dict(self._domains)

    @property
    def graph(self) -> nx.DiGraph:
        """Read-only networkx view of the graph."""
        return self._graph.copy(as_view=True)

    def check_node(self, node: str) -> str:
        """Raise InvalidQueryError for undeclared nodes; return the node otherwise."""
        if node not in self._domains:
            raise InvalidQueryError(f'unknown variable {node!r}')
        return node

    def check_nodes(self, nodes: Iterable[str]) -> frozenset[str]:
        """Check every node and return them as a set."""
        return frozenset(self.check_node(node) for node in nodes)

    def domain(self, node: str) -> FiniteDomain:
        """Domain of `node`."""
        return self._domains[self.check_node(node)]

    def parents(self, node: str) -> tuple[str, ...]:
        """Pa(node) in name order."""
        return tuple(sorted(self._graph.predecessors(self.check_node(node))))

    def children(self, node: str) -> tuple[str, ...]:
        """Children of node in name order."""
        return tuple(sorted(self._graph.successors(self.check_node(node))))

    def is_acyclic(self) -> bool:
        """Whether the graph has no directed cycle."""
        return nx.is_directed_acyclic_graph(self._graph)

    def violations(self) -> list[str]:
        """Structural problems of the graph, as readable messages."""
        violations = []
        for name, domain in self._domains.items():
            if not name:
                violations.append('variable with an empty name')
            if len(domain) == 0:
                violations.append(f'domain of {name} is empty')
            if len(set(domain.values)) != len(domain):
                violations.append(f'domain of {name} has duplicate values')
        for parent, child in self._edges:
            for node in (parent, child):
                if node not in self._domains:
                    violations.append(f'edge {parent} -> {child} references undeclared variable {node}')
        if not self.is_acyclic():
            cycle = [edge[0] for edge in nx.find_cycle(self._graph)]
            violations.append('graph has a cycle: ' + ' -> '.join([*cycle, cycle[0]]))
        return violations

    def without_incoming(self, nodes: Iterable[str]) -> 'CausalDag':
        """Graph with every edge into `nodes` removed (the graph of an intervention)."""
        removed = set(nodes)
        return CausalDag(self._domains, [edge for edge in self._edges if edge[1] not in removed])

    def without_edges(self, edges: Iterable[tuple[str, str]]) -> 'CausalDag':
        """Graph with the given edges removed."""
        removed = set(edges)
        return CausalDag(self._domains, [edge for edge in self._edges if edge not in removed])

    def with_node(self, node: str, domain: FiniteDomain | Sequence, parents: Iterable[str]) -> 'CausalDag':
        """Graph with a new childless node appended."""
        if node in self._domains:
            raise InvalidQueryError(f'variable {node!r} already exists')
        parents = self.check_nodes(parents)
        domains = dict(self._domains)
        domains[node] = domain if isinstance(domain, FiniteDomain) else FiniteDomain(tuple(domain))
        return CausalDag(domains, [*self._edges, *((parent, node) for parent in parents)])

    def subgraph(self, nodes: Iterable[str]) -> 'CausalDag':
        """Induced subgraph."""
        keep = self.check_nodes(nodes)
        return CausalDag(
            {node: self._domains[node] for node in keep},
            [edge for edge in self._edges if edge[0] in keep and edge[1] in keep],
        )


@dataclass(frozen=True)
class AdjustmentSet:
    """Result of the adjustment criterion for one candidate set.

    `failing_condition` is 1 when a non-causal path stays open and 2 when a member descends from a mediator.
    """

    exposure: str
    outcome: str
    members: frozenset[str]
    valid: bool
    failing_condition: int | None = None

    def render(self) -> str:
        """Members as "{A, B}"."""
        return render_set(self.members)


@dataclass(frozen=True)
class IndependenceStatement:
    """left _||_ right | given."""

    left: frozenset[str]
    right: frozenset[str]
    given: frozenset[str]

    def __post_init__(self) -> None:  # noqa: D105
        if self.left & self.right or self.left & self.given or self.right & self.given:
            raise InvalidQueryError('independence statement sets must be pairwise disjoint')

    def render(self) -> str:
        """Render as "Y _||_ Z | {S}"."""
        return f'{", ".join(sorted(self.left))} _||_ {", ".join(sorted(self.right))} | {render_set(self.given)}'


def topological_order(dag: CausalDag) -> list[str]:
    """Order the variables so that every parent precedes its children.

    Ties are broken by variable name, so the order is deterministic.

    Args:
        dag (CausalDag): The graph.

    Raises:
        CycleError: the graph has a cycle.

    Returns:
        list[str]: the ordered variables.

    """
    graph = dag.graph
    if not nx.is_directed_acyclic_graph(graph):
        raise CycleError([edge[0] for edge in nx.find_cycle(graph)])
    return list(nx.lexicographical_topological_sort(graph))


def descendants(dag: CausalDag, node: str) -> frozenset[str]:
    """De(node): every variable reachable by a directed path, node included."""
    dag.check_node(node)
    return frozenset({node} | nx.descendants(dag.graph, node))


def non_descendants(dag: CausalDag, node: str) -> frozenset[str]:
    """Nd(node): the complement of De(node)."""
    return frozenset(dag.nodes) - descendants(dag, node)


def _check_disjoint(dag: CausalDag, *groups: Iterable[str]) -> list[frozenset[str]]:
    sets = [dag.check_nodes(group) for group in groups]
    for i, first in enumerate(sets):
        for second in sets[i + 1 :]:
            if first & second:
                raise InvalidQueryError(f'sets must be disjoint, both contain {sorted(first & second)}')
    return sets


def d_separated(dag: CausalDag, a: Iterable[str], b: Iterable[str], s: Iterable[str] = ()) -> bool:
    """Whether `s` blocks every path between `a` and `b`.

    Args:
        dag (CausalDag): The graph.
        a (Iterable[str]): First variable set.
        b (Iterable[str]): Second variable set.
        s (Iterable[str], optional): Conditioning set. Default: ().

    Raises:
        InvalidQueryError: unknown variables or overlapping sets.

    Returns:
        bool: True iff a and b are d-separated given s.

    """
    a, b, s = _check_disjoint(dag, a, b, s)
    if not a or not b:
        return True
    return nx.is_d_separator(dag.graph, set(a), set(b), set(s))


def _causal_nodes(graph: nx.DiGraph, exposure: str, outcome: str) -> set[str]:
    """Nodes other than the exposure that lie on a directed exposure -> outcome path."""
    if outcome not in nx.descendants(graph, exposure):
        return set()
    return ((nx.descendants(graph, exposure) & nx.ancestors(graph, outcome)) | {outcome}) - {exposure}


def proper_backdoor_graph(dag: CausalDag, exposure: str, outcome: str) -> CausalDag:
    """Remove the first edge of every directed exposure -> outcome path.

    In this graph the exposure and the outcome are d-separated by a set exactly when the set blocks every path
    that is not a directed exposure -> outcome path.
    """
    dag.check_nodes((exposure, outcome))
    causal = _causal_nodes(dag.graph, exposure, outcome)
    return dag.without_edges([(exposure, child) for child in dag.children(exposure) if child in causal])


def _forbidden(dag: CausalDag, exposure: str, outcome: str, reading: str) -> set[str]:
    graph = dag.graph
    causal = _causal_nodes(graph, exposure, outcome)
    if not causal:
        return set()
    if reading == 'include-exposure':
        causal = causal | {exposure}
    forbidden = set()
    for node in causal:
        forbidden |= {node} | nx.descendants(graph, node)
    return forbidden


def is_valid_adjustment_set(
    dag: CausalDag, exposure: str, outcome: str, s: Iterable[str], reading: str | None = None
) -> AdjustmentSet:
    """Check the two-condition adjustment criterion for (exposure, outcome).

    1. s blocks every path from exposure to outcome that is not a directed exposure -> ... -> outcome path.
    2. s contains no descendant of a node, other than the exposure, on a directed exposure -> outcome path.

    With `reading='include-exposure'` condition 2 also counts the exposure as such a node, which forbids all of
    De(exposure).

    Args:
        dag (CausalDag): The graph.
        exposure (str): Intervened variable Z.
        outcome (str): Outcome Y.
        s (Iterable[str]): Candidate set.
        reading (str, optional): 'exclude-exposure' or 'include-exposure'. Default: the configured reading.

    Raises:
        InvalidQueryError: exposure equals outcome, s contains either, or unknown variables.

    Returns:
        AdjustmentSet: validity and the first failing condition.

    """
    reading = dynamic_default(reading, get_config().adjustment_reading)
    if reading not in ADJUSTMENT_READINGS:
        raise InvalidQueryError(f'unknown adjustment reading {reading!r}')
    dag.check_nodes((exposure, outcome))
    if exposure == outcome:
        raise InvalidQueryError('exposure and outcome must differ')
    members = dag.check_nodes(s)
    if exposure in members or outcome in members:
        raise InvalidQueryError('an adjustment set cannot contain the exposure or the outcome')

    backdoor = proper_backdoor_graph(dag, exposure, outcome)
    blocks = nx.is_d_separator(backdoor.graph, {exposure}, {outcome}, set(members))
    avoids = not (members & _forbidden(dag, exposure, outcome, reading))

    failing = None
    if not blocks:
        failing = 1
    elif not avoids:
        failing = 2
    return AdjustmentSet(exposure, outcome, members, failing is None, failing)


def enumerate_adjustment_sets(
    dag: CausalDag, exposure: str, outcome: str, max_size: int | None = None, reading: str | None = None
) -> list[AdjustmentSet]:
    """All valid adjustment sets up to `max_size`, in size-then-lexicographic order.

    Args:
        dag (CausalDag): The graph.
        exposure (str): Intervened variable Z.
        outcome (str): Outcome Y.
        max_size (int, optional): Largest set size. Default: None (no bound).
        reading (str, optional): reading of condition 2, see `is_valid_adjustment_set`.

    Returns:
        list[AdjustmentSet]: the valid sets.

    """
    dag.check_nodes((exposure, outcome))
    if max_size is not None and max_size > len(dag.nodes):
        raise InvalidQueryError(f'max size {max_size} exceeds the number of variables')
    candidates = [node for node in dag.nodes if node not in (exposure, outcome)]
    found = []
    for members in subsets(candidates, max_size):
        result = is_valid_adjustment_set(dag, exposure, outcome, members, reading)
        if result.valid:
            found.append(result)
    logger.debug('%d valid adjustment sets for (%s, %s)', len(found), exposure, outcome)
    return found


def adjustment_reading_discrepancies(
    dag: CausalDag, exposure: str, outcome: str, max_size: int | None = None
) -> list[frozenset[str]]:
    """Sets valid under one reading of condition 2 but not under the other."""
    found = {}
    for reading in ADJUSTMENT_READINGS:
        results = enumerate_adjustment_sets(dag, exposure, outcome, max_size, reading)
        found[reading] = {result.members for result in results}
    differing = found['exclude-exposure'] ^ found['include-exposure']
    return sorted(differing, key=lambda members: (len(members), sorted(members)))


def augment_with_function(
    dag: CausalDag, inputs: Iterable[str], node: str = 'Yhat', domain: FiniteDomain | Sequence = (0, 1)
) -> CausalDag:
    """Append a childless node whose parents are the inputs of a function."""
    return dag.with_node(node, domain, inputs)


def implied_independences(
    dag: CausalDag,
    target: str,
    exposure: str,
    max_size: int | None = None,
    function_inputs: Iterable[str] | None = None,
    reading: str | None = None,
) -> list[IndependenceStatement]:
    """Independences that counterfactual invariance of the target implies.

    One statement `target _||_ exposure | S` per valid adjustment set S. When `function_inputs` is given the
    target names a new node appended with those inputs as parents, standing for f(X).

    Args:
        dag (CausalDag): The graph.
        target (str): Outcome variable, or the name of the function node.
        exposure (str): Intervened variable Z.
        max_size (int, optional): Largest adjustment set size. Default: None.
        function_inputs (Iterable[str], optional): Inputs of the function. Default: None.
        reading (str, optional): reading of condition 2, see `is_valid_adjustment_set`.

    Returns:
        list[IndependenceStatement]: the implied statements.

    """
    if function_inputs is not None:
        dag = augment_with_function(dag, function_inputs, target)
    return [
        IndependenceStatement(frozenset({target}), frozenset({exposure}), result.members)
        for result in enumerate_adjustment_sets(dag, exposure, target, max_size, reading)
    ]
