"""Model, graph and observation documents.

Documents are YAML. Mechanism rows read `Z=0, noise=1 -> 1`, observation rows `Z=0, Y=1 -> 1/4`, edges `Z -> Y`,
and probabilities are "num/den" strings. Errors carry the line and character offset of the offending node.

    variables:
      Z: [0, 1]
      Y: [0, 1]
    edges:
      - Z -> Y
    mechanisms:
      Z:
        noise: [1/2, 1/2]
        rows:
          - noise=0 -> 0
          - noise=1 -> 1
      Y:
        noise: [1/2, 1/2]
        rows:
          - Z=0, noise=0 -> 0
          ...
"""

from __future__ import annotations

import itertools
import re
from collections import defaultdict
from fractions import Fraction
from typing import Any, Hashable, Mapping

import yaml

from cfinvar.exceptions import InvalidQueryError, ParseError, ValidationError
from cfinvar.graph import CausalDag, FiniteDomain
from cfinvar.invariance import FunctionSpec
from cfinvar.io import dump_yaml_str
from cfinvar.misc import format_rational, parse_rational
from cfinvar.response import CanonicalResponseVector, ResponseFunctionTable
from cfinvar.scm import DiscreteScm, ExactDistribution, NoiseSpec, TabularMechanism, ensure_valid

__all__ = [
    'parse_function',
    'parse_graph',
    'parse_model',
    'parse_observation',
    'render_function',
    'render_vector',
    'serialize_graph',
    'serialize_model',
    'serialize_observation',
]

ROW_RE = re.compile(r'^\s*(?P<lhs>.*?)\s*->\s*(?P<rhs>\S+)\s*$')
EDGE_RE = re.compile(r'^\s*(?P<parent>[^\s-]\S*)\s*->\s*(?P<child>\S+)\s*$')
NOISE = 'noise'


def _fail(node: yaml.Node | None, message: str) -> ParseError:
    if node is None:
        return ParseError(message)
    return ParseError(message, line=node.start_mark.line + 1, position=node.start_mark.index)


def _compose(text: str) -> yaml.Node:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as ex:
        mark = ex.problem_mark or ex.context_mark
        message = ex.problem or 'invalid YAML'
        if mark is None:
            raise ParseError(message) from ex
        raise ParseError(message, line=mark.line + 1, position=mark.index) from ex
    except yaml.YAMLError as ex:
        raise ParseError(str(ex)) from ex
    if root is None:
        raise ParseError('empty document', line=1, position=0)
    return root


def _mapping(node: yaml.Node, what: str) -> list[tuple[yaml.Node, yaml.Node]]:
    if not isinstance(node, yaml.MappingNode):
        raise _fail(node, f'{what} must be a mapping')
    seen = {}
    for key, _ in node.value:
        name = _scalar(key, f'key of {what}')
        if name in seen:
            raise _fail(key, f'duplicate key {name!r} in {what}')
        seen[name] = key
    return list(node.value)


def _sequence(node: yaml.Node, what: str) -> list[yaml.Node]:
    if not isinstance(node, yaml.SequenceNode):
        raise _fail(node, f'{what} must be a list')
    return list(node.value)


def _scalar(node: yaml.Node, what: str) -> str:
    if not isinstance(node, yaml.ScalarNode):
        raise _fail(node, f'{what} must be a scalar')
    return node.value


def _value(node: yaml.Node, what: str) -> Hashable:
    """Domain value: integers stay integers, everything else is text."""
    text = _scalar(node, what)
    if node.tag == 'tag:yaml.org,2002:int':
        return int(text)
    return text


def _sections(root: yaml.Node, required: tuple[str, ...], optional: tuple[str, ...]) -> dict[str, yaml.Node]:
    sections = {}
    for key, value in _mapping(root, 'document'):
        name = key.value
        if name not in required + optional:
            raise _fail(key, f'unknown section {name!r}')
        sections[name] = value
    for name in required:
        if name not in sections:
            raise _fail(root, f'missing section {name!r}')
    return sections


def _parse_variables(node: yaml.Node) -> dict[str, FiniteDomain]:
    domains = {}
    for key, value in _mapping(node, 'variables'):
        name = _scalar(key, 'variable name')
        if not name:
            raise _fail(key, 'empty variable name')
        values = [_value(item, f'value of {name}') for item in _sequence(value, f'domain of {name}')]
        if not values:
            raise _fail(value, f'domain of {name} is empty')
        if len(set(values)) != len(values):
            raise _fail(value, f'domain of {name} has duplicate values')
        domains[name] = FiniteDomain(tuple(values))
    return domains


def _parse_edges(node: yaml.Node | None, domains: Mapping[str, FiniteDomain]) -> list[tuple[str, str]]:
    if node is None or (isinstance(node, yaml.ScalarNode) and node.value == ''):
        return []
    edges = []
    for item in _sequence(node, 'edges'):
        match = EDGE_RE.match(_scalar(item, 'edge'))
        if match is None:
            raise _fail(item, f'edge must read "A -> B", got {item.value!r}')
        for name in (match['parent'], match['child']):
            if name not in domains:
                raise _fail(item, f'edge refers to undeclared variable {name!r}')
        edges.append((match['parent'], match['child']))
    return edges


def _parse_probabilities(node: yaml.Node, what: str) -> tuple[Fraction, ...]:
    if isinstance(node, yaml.ScalarNode):
        tokens = [token.strip() for token in node.value.split(',')]
    else:
        tokens = [_scalar(item, what) for item in _sequence(node, what)]
    try:
        return tuple(parse_rational(token) for token in tokens)
    except ValueError as ex:
        raise _fail(node, f'{what}: {ex}') from ex


def _parse_assignment(item: yaml.Node, text: str) -> dict[str, str]:
    assignment = {}
    if not text:
        return assignment
    for token in text.split(','):
        name, sep, value = token.partition('=')
        name, value = name.strip(), value.strip()
        if not sep or not name:
            raise _fail(item, f'expected name=value, got {token.strip()!r}')
        if name in assignment:
            raise _fail(item, f'{name} is assigned twice')
        assignment[name] = value
    return assignment


def _resolve(item: yaml.Node, domain: FiniteDomain, name: str, token: str) -> Hashable:
    try:
        return domain.parse(token)
    except InvalidQueryError:
        raise _fail(item, f'{token!r} is not a value of {name}') from None


def _parse_mechanism(
    name: str, node: yaml.Node, dag: CausalDag
) -> tuple[TabularMechanism, NoiseSpec]:
    fields = dict((key.value, value) for key, value in _mapping(node, f'mechanism of {name}'))
    for key in fields:
        if key not in ('noise', 'rows'):
            raise _fail(node, f'unknown field {key!r} in mechanism of {name}')
    if 'noise' not in fields or 'rows' not in fields:
        raise _fail(node, f'mechanism of {name} needs noise and rows')
    probabilities = _parse_probabilities(fields['noise'], f'noise of {name}')
    parents = dag.parents(name)

    table = {}
    lines = {}
    for item in _sequence(fields['rows'], f'rows of {name}'):
        match = ROW_RE.match(_scalar(item, f'row of {name}'))
        if match is None:
            raise _fail(item, f'row must read "A=a, noise=k -> v", got {item.value!r}')
        assignment = _parse_assignment(item, match['lhs'])
        if NOISE not in assignment:
            raise _fail(item, f'row of {name} has no noise value')
        try:
            noise = int(assignment.pop(NOISE))
        except ValueError:
            raise _fail(item, f'noise value of {name} must be an integer') from None
        if set(assignment) != set(parents):
            raise _fail(item, f'row of {name} must assign exactly its parents {list(parents)}')
        values = tuple(_resolve(item, dag.domain(p), p, assignment[p]) for p in parents)
        output = _resolve(item, dag.domain(name), name, match['rhs'])
        key = (values, noise)
        if key in table:
            raise _fail(item, f'duplicate row of {name} (first at line {lines[key]})')
        table[key] = output
        lines[key] = item.start_mark.line + 1
    return TabularMechanism(name, parents, table), NoiseSpec(name, probabilities)


def parse_graph(text: str) -> CausalDag:
    """Parse a graph document (`variables` and `edges`).

    Raises:
        ParseError: malformed document.
        ValidationError: the graph has a cycle.

    """
    root = _compose(text)
    sections = _sections(root, ('variables',), ('edges', 'metadata'))
    domains = _parse_variables(sections['variables'])
    dag = CausalDag(domains, _parse_edges(sections.get('edges'), domains))
    violations = dag.violations()
    if violations:
        raise ValidationError(violations)
    return dag


def parse_model(text: str) -> DiscreteScm:
    """Parse a model document and validate the model.

    Args:
        text (str): YAML text.

    Raises:
        ParseError: malformed document, with line and character offset.
        ValidationError: the model violates its invariants.

    Returns:
        DiscreteScm: the model.

    """
    root = _compose(text)
    sections = _sections(root, ('variables', 'mechanisms'), ('edges', 'metadata'))
    domains = _parse_variables(sections['variables'])
    dag = CausalDag(domains, _parse_edges(sections.get('edges'), domains))
    violations = dag.violations()
    if violations:
        raise ValidationError(violations)

    mechanisms = {}
    noises = {}
    for key, node in _mapping(sections['mechanisms'], 'mechanisms'):
        if key.value not in domains:
            raise _fail(key, f'mechanism for undeclared variable {key.value!r}')
        mechanisms[key.value], noises[key.value] = _parse_mechanism(key.value, node, dag)
    return ensure_valid(DiscreteScm(dag, mechanisms, noises))


def parse_observation(text: str) -> ExactDistribution:
    """Parse an observation document (`variables` with domains, `rows` of "A=a, B=b -> p").

    Raises:
        ParseError: malformed rows, unknown values or duplicate rows (citing both lines).
        ValidationError: the probabilities do not sum to 1.

    """
    root = _compose(text)
    sections = _sections(root, ('variables', 'rows'), ('metadata',))
    domains = _parse_variables(sections['variables'])
    names = tuple(domains)

    probabilities = {}
    lines = {}
    for item in _sequence(sections['rows'], 'rows'):
        match = ROW_RE.match(_scalar(item, 'row'))
        if match is None:
            raise _fail(item, f'row must read "A=a, B=b -> p", got {item.value!r}')
        assignment = _parse_assignment(item, match['lhs'])
        unknown = sorted(set(assignment) - set(names))
        if unknown:
            raise _fail(item, f'row refers to undeclared variables {unknown}')
        if set(assignment) != set(names):
            raise _fail(item, f'row must assign every variable {list(names)}')
        key = tuple(_resolve(item, domains[name], name, assignment[name]) for name in names)
        try:
            q = parse_rational(match['rhs'])
        except ValueError as ex:
            raise _fail(item, str(ex)) from ex
        if q < 0:
            raise _fail(item, 'probabilities must be non-negative')
        line = item.start_mark.line + 1
        if key in probabilities:
            raise _fail(item, f'duplicate row {match["lhs"]} at lines {lines[key]} and {line}')
        probabilities[key] = q
        lines[key] = line

    total = sum(probabilities.values(), Fraction(0))
    if total != 1:
        raise ValidationError(
            [f'probabilities sum to {format_rational(total)}, deficit {format_rational(1 - total)}']
        )
    return ExactDistribution(names, probabilities)


def _render_row(names: tuple[str, ...], values: tuple, rhs: str) -> str:
    return ', '.join(f'{name}={value}' for name, value in zip(names, values)) + f' -> {rhs}'


def _graph_sections(dag: CausalDag) -> dict[str, Any]:
    return {
        'variables': {node: list(dag.domain(node)) for node in dag.nodes},
        'edges': [f'{parent} -> {child}' for parent, child in dag.edges],
    }


def serialize_graph(dag: CausalDag) -> str:
    """Canonical graph document."""
    return dump_yaml_str(_graph_sections(dag))


def serialize_model(model: DiscreteScm) -> str:
    """Canonical model document: variables and mechanisms in name order, rows in domain order."""
    dag = model.dag
    document = _graph_sections(dag)
    document['mechanisms'] = {}
    for variable in dag.nodes:
        mechanism = model.mechanisms[variable]
        noise = model.noises[variable]
        parents = dag.parents(variable)
        order = [mechanism.parents.index(parent) for parent in parents]
        rows = []
        for values in itertools.product(*(dag.domain(parent) for parent in parents)):
            stored = [None] * len(parents)
            for i, j in enumerate(order):
                stored[j] = values[i]
            for n in range(noise.size):
                output = mechanism.table[(tuple(stored), n)]
                rows.append(_render_row((*parents, NOISE), (*values, n), str(output)))
        document['mechanisms'][variable] = {
            'noise': [format_rational(q) for q in noise.probabilities],
            'rows': rows,
        }
    return dump_yaml_str(document)


def serialize_observation(dist: ExactDistribution, domains: Mapping[str, FiniteDomain]) -> str:
    """Canonical observation document; zero cells are written too."""
    grouped = defaultdict(Fraction, dist.probabilities)
    rows = [
        _render_row(dist.variables, values, format_rational(grouped[values]))
        for values in itertools.product(*(domains[name] for name in dist.variables))
    ]
    return dump_yaml_str(
        {'variables': {name: list(domains[name]) for name in dist.variables}, 'rows': rows}
    )


def render_vector(vector: CanonicalResponseVector, tables: Mapping[str, ResponseFunctionTable]) -> dict[str, str]:
    """Positive entries of a response vector keyed by digit strings joined by '|', in index order."""
    return {
        '|'.join(tables[variable].digits(index) for variable, index in zip(vector.variables, key)): format_rational(q)
        for key, q in sorted(vector.probabilities.items())
    }


def parse_function(text: str, dag: CausalDag) -> FunctionSpec:
    """Parse a function document (`inputs`, `codomain`, `rows` of "X=0 -> 1") against the domains of a graph.

    Raises:
        ParseError: malformed rows, unknown values or duplicate rows.
        ValidationError: the function is not total.

    """
    root = _compose(text)
    sections = _sections(root, ('inputs', 'codomain', 'rows'), ('metadata',))
    inputs = tuple(_scalar(item, 'input') for item in _sequence(sections['inputs'], 'inputs'))
    for item, name in zip(sections['inputs'].value, inputs):
        if name not in dag:
            raise _fail(item, f'unknown input variable {name!r}')
    values = [_value(item, 'codomain value') for item in _sequence(sections['codomain'], 'codomain')]
    if not values:
        raise _fail(sections['codomain'], 'codomain is empty')
    codomain = FiniteDomain(tuple(values))

    table = {}
    for item in _sequence(sections['rows'], 'rows'):
        match = ROW_RE.match(_scalar(item, 'row'))
        if match is None:
            raise _fail(item, f'row must read "X=x -> v", got {item.value!r}')
        assignment = _parse_assignment(item, match['lhs'])
        if set(assignment) != set(inputs):
            raise _fail(item, f'row must assign exactly the inputs {list(inputs)}')
        key = tuple(_resolve(item, dag.domain(name), name, assignment[name]) for name in inputs)
        if key in table:
            raise _fail(item, f'duplicate row {match["lhs"]}')
        table[key] = _resolve(item, codomain, 'the codomain', match['rhs'])
    function = FunctionSpec(inputs, codomain, table)
    violations = function.violations(dag)
    if violations:
        raise ValidationError(violations)
    return function


def render_function(function: FunctionSpec) -> list[str]:
    """Rows "X=0, C=1 -> 1" of a function table in key order of the table."""
    return [_render_row(function.inputs, values, str(output)) for values, output in function.table.items()]
