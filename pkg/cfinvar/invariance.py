"""Almost sure, distributional and functional counterfactual invariance."""

from __future__ import annotations

import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

from cfinvar.config import get_config
from cfinvar.exceptions import InvalidQueryError, ResourceLimitError, ValidationError
from cfinvar.graph import CausalDag, FiniteDomain, non_descendants, topological_order
from cfinvar.misc import dynamic_default, render_set
from cfinvar.scm import DiscreteScm, append_function_node, evaluate, iter_noise, replay

__all__ = [
    'FciEnumeration',
    'FunctionSpec',
    'InvarianceReport',
    'LatticeReport',
    'as_ci_degree',
    'as_ci_report',
    'dci_gap',
    'dci_report',
    'enumerate_fci_functions',
    'implication_lattice_check',
    'is_fci',
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InvarianceReport:
    """Outcome of one invariance check.

    `degree` is set for the almost sure and functional notions, `gap` for the distributional one. `witness`
    describes a violation and is None exactly when the notion holds.
    """

    notion: str
    holds: bool
    degree: Fraction | None = None
    gap: Fraction | None = None
    witness: Mapping[str, Any] | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class FunctionSpec:
    """A total function of some model variables.

    Args:
        inputs (tuple[str, ...]): Input variables, in the order of the table keys.
        codomain (FiniteDomain): Output values.
        table (Mapping[tuple, Hashable]): Output for every input assignment.

    """

    inputs: tuple[str, ...]
    codomain: FiniteDomain
    table: Mapping[tuple[Hashable, ...], Hashable]

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'inputs', tuple(self.inputs))
        if not isinstance(self.codomain, FiniteDomain):
            object.__setattr__(self, 'codomain', FiniteDomain(tuple(self.codomain)))

    def __call__(self, assignment: Mapping[str, Hashable]) -> Hashable:  # noqa: D102
        key = tuple(assignment[variable] for variable in self.inputs)
        try:
            return self.table[key]
        except KeyError:
            raise ValidationError([f'function is not defined at {dict(zip(self.inputs, key))}']) from None

    @classmethod
    def from_callable(
        cls,
        dag: CausalDag,
        inputs: Sequence[str],
        codomain: FiniteDomain | Sequence,
        function: Callable[..., Hashable],
    ) -> 'FunctionSpec':
        """Tabulate `function(*input values)` over the input domains of a graph."""
        inputs = tuple(inputs)
        domains = [dag.domain(variable) for variable in inputs]
        return cls(inputs, codomain, {values: function(*values) for values in itertools.product(*domains)})

    @classmethod
    def constant(
        cls, dag: CausalDag, inputs: Sequence[str], codomain: FiniteDomain | Sequence, value: Hashable
    ) -> 'FunctionSpec':
        """The constant function."""
        return cls.from_callable(dag, inputs, codomain, lambda *_: value)

    def violations(self, dag: CausalDag) -> list[str]:
        """Totality and range problems against the domains of a graph."""
        violations = []
        for variable in self.inputs:
            if variable not in dag:
                violations.append(f'function input {variable!r} is not a variable')
        if violations:
            return violations
        for values in itertools.product(*(dag.domain(variable) for variable in self.inputs)):
            if values not in self.table:
                violations.append(f'function is not defined at {dict(zip(self.inputs, values))}')
            elif self.table[values] not in self.codomain:
                violations.append(f'function outputs {self.table[values]!r} outside its codomain')
        return violations

    def depends_only_on(self, dag: CausalDag, variables: Iterable[str]) -> bool:
        """Whether the output is determined by the inputs in `variables`."""
        keep = [i for i, variable in enumerate(self.inputs) if variable in set(variables)]
        seen = {}
        for values in itertools.product(*(dag.domain(variable) for variable in self.inputs)):
            key = tuple(values[i] for i in keep)
            if seen.setdefault(key, self.table[values]) != self.table[values]:
                return False
        return True


def _check_pair(model: DiscreteScm, target: str, intervened: str) -> None:
    model.dag.check_nodes((target, intervened))
    if target == intervened:
        raise InvalidQueryError('target and intervened variable must differ')


def _pair_degrees(model: DiscreteScm, intervened: str, output: Callable[[tuple], Hashable]) -> dict[tuple, Fraction]:
    """P(output(world under z) == output(world under z')) for every unordered pair of levels."""
    levels = model.dag.domain(intervened).values
    joint = replay(model, [{intervened: level} for level in levels])
    degrees = {pair: Fraction(0) for pair in itertools.combinations(range(len(levels)), 2)}
    for worlds, q in joint.probabilities.items():
        outputs = [output(world) for world in worlds]
        for i, j in degrees:
            if outputs[i] == outputs[j]:
                degrees[(i, j)] += q
    return {(levels[i], levels[j]): degree for (i, j), degree in degrees.items()}


def as_ci_degree(model: DiscreteScm, target: str, intervened: str) -> Fraction:
    """min over pairs (z, z') of P(Y(z) = Y(z')); almost sure invariance holds iff this is 1.

    Args:
        model (DiscreteScm): A valid model.
        target (str): Target Y.
        intervened (str): Intervened variable Z.

    Returns:
        Fraction: the degree (1 when Z has a single level).

    """
    _check_pair(model, target, intervened)
    position = topological_order(model.dag).index(target)
    degrees = _pair_degrees(model, intervened, lambda world: world[position])
    return min(degrees.values(), default=Fraction(1))


def as_ci_report(model: DiscreteScm, target: str, intervened: str) -> InvarianceReport:
    """Degree of almost sure invariance with a violating pair and noise tuple when it fails."""
    _check_pair(model, target, intervened)
    position = topological_order(model.dag).index(target)
    degrees = _pair_degrees(model, intervened, lambda world: world[position])
    degree = min(degrees.values(), default=Fraction(1))
    witness = None
    if degree < 1:
        pair = min(degrees, key=lambda key: degrees[key])
        for noise, _ in iter_noise(model):
            left = evaluate(model, noise, {intervened: pair[0]})[target]
            right = evaluate(model, noise, {intervened: pair[1]})[target]
            if left != right:
                witness = {'pair': list(pair), 'noise': noise, 'values': [left, right]}
                break
    return InvarianceReport(
        'almost-sure',
        degree == 1,
        degree=degree,
        witness=witness,
        metadata={'pairs': {f'{a},{b}': value for (a, b), value in degrees.items()}},
    )


def dci_report(
    model: DiscreteScm, target: str, intervened: str, conditioning: Iterable[str] = ()
) -> InvarianceReport:
    """Distributional invariance conditional on W and Z.

    The gap is the largest |P(Y(z) = y | W = w, Z = z) - P(Y(z') = y | W = w, Z = z)| over levels z, z', values
    y and assignments w with P(W = w, Z = z) > 0. Levels of Z with probability zero and conditioning cells with
    probability zero are skipped and listed in the metadata.

    Args:
        model (DiscreteScm): A valid model.
        target (str): Target Y.
        intervened (str): Intervened variable Z.
        conditioning (Iterable[str], optional): Conditioning set W; may contain Y but not Z. Default: ().

    Raises:
        InvalidQueryError: Z in W or unknown variables.

    Returns:
        InvarianceReport: gap, witness cell and skipped cells.

    """
    _check_pair(model, target, intervened)
    conditioning = tuple(sorted(model.dag.check_nodes(conditioning)))
    if intervened in conditioning:
        raise InvalidQueryError(f'conditioning set must not contain the intervened variable {intervened}')

    dag = model.dag
    levels = dag.domain(intervened).values
    joint = replay(model, [{}, *({intervened: level} for level in levels)])
    z_pos = joint.position(intervened)
    y_pos = joint.position(target)
    w_pos = [joint.position(variable) for variable in conditioning]

    # cell (z, w) -> (mass, per-level mass of each target value)
    cells: dict[tuple, list] = defaultdict(lambda: [Fraction(0), defaultdict(Fraction)])
    for worlds, q in joint.probabilities.items():
        factual = worlds[0]
        cell = cells[(factual[z_pos], tuple(factual[i] for i in w_pos))]
        cell[0] += q
        for level, world in zip(levels, worlds[1:]):
            cell[1][(level, world[y_pos])] += q

    gap = Fraction(0)
    witness = None
    skipped_levels = [level for level in levels if not any(key[0] == level for key in cells)]
    skipped_cells = []
    for level in levels:
        if level in skipped_levels:
            continue
        for w in itertools.product(*(dag.domain(variable) for variable in conditioning)):
            if (level, w) not in cells:
                skipped_cells.append({intervened: level, **dict(zip(conditioning, w))})
                continue
            mass, counts = cells[(level, w)]
            for other in levels:
                for y in dag.domain(target):
                    difference = abs(counts[(level, y)] - counts[(other, y)]) / mass
                    if difference > gap:
                        gap = difference
                        witness = {
                            'given': {intervened: level, **dict(zip(conditioning, w))},
                            'levels': [level, other],
                            'value': y,
                            'probabilities': [counts[(level, y)] / mass, counts[(other, y)] / mass],
                        }
    if skipped_levels:
        logger.debug('levels %s of %s have probability zero and are skipped', skipped_levels, intervened)
    if skipped_cells:
        logger.debug('%d zero-probability conditioning cells skipped', len(skipped_cells))
    return InvarianceReport(
        'distributional',
        gap == 0,
        gap=gap,
        witness=witness,
        metadata={
            'conditioning': render_set(conditioning),
            'skipped_levels': skipped_levels,
            'skipped_cells': skipped_cells,
        },
    )


def dci_gap(model: DiscreteScm, target: str, intervened: str, conditioning: Iterable[str] = ()) -> Fraction:
    """Gap of distributional invariance conditional on W; it holds iff the gap is 0. See `dci_report`."""
    return dci_report(model, target, intervened, conditioning).gap


def _fresh_name(dag: CausalDag, name: str = 'Yhat') -> str:
    while name in dag:
        name = name + '_'
    return name


def is_fci(model: DiscreteScm, function: FunctionSpec, intervened: str) -> InvarianceReport:
    """Functional invariance: min over pairs (z, z') of P(f(X(z)) = f(X(z'))) equals 1.

    The degree is computed on the worlds directly, and again as the almost sure degree of a node
    Yhat := f(X) appended to the model. The two must agree.

    Raises:
        ValidationError: f is not total.

    """
    model.dag.check_node(intervened)
    violations = function.violations(model.dag)
    if violations:
        raise ValidationError(violations)

    order = topological_order(model.dag)
    positions = [order.index(variable) for variable in function.inputs]
    table = function.table
    degrees = _pair_degrees(model, intervened, lambda world: table[tuple(world[i] for i in positions)])
    degree = min(degrees.values(), default=Fraction(1))

    node = _fresh_name(model.dag)
    appended = as_ci_degree(append_function_node(model, function, node), node, intervened)
    if appended != degree:
        raise RuntimeError(f'functional invariance degrees disagree: {degree} direct, {appended} appended')

    witness = None
    if degree < 1:
        pair = min(degrees, key=lambda key: degrees[key])
        witness = {'pair': list(pair), 'probability': degrees[pair]}
    return InvarianceReport(
        'functional',
        degree == 1,
        degree=degree,
        witness=witness,
        metadata={'inputs': list(function.inputs), 'appended_degree': appended},
    )


@dataclass(frozen=True)
class FciEnumeration:
    """Every functionally invariant function of some inputs, with the non-descendant classification.

    `nd_function_count` is the number of functions of the inputs outside De(Z); every such function is invariant.
    """

    inputs: tuple[str, ...]
    codomain: FiniteDomain
    functions: tuple[FunctionSpec, ...]
    nd_inputs: tuple[str, ...]
    factors_through_nd: bool
    nd_function_count: int
    scanned: int

    @property
    def equals_nd_class(self) -> bool:
        """Whether the invariant functions are exactly the functions of the non-descendant inputs."""
        return self.factors_through_nd and len(self.functions) == self.nd_function_count


def _must_equal(model: DiscreteScm, inputs: tuple[str, ...], intervened: str) -> set[tuple[int, int]]:
    """Pairs of input positions that co-occur across two interventions on one positive-probability noise tuple."""
    dag = model.dag
    levels = dag.domain(intervened).values
    joint = replay(model, [{intervened: level} for level in levels])
    positions = [joint.position(variable) for variable in inputs]
    domains = [dag.domain(variable) for variable in inputs]
    sizes = [len(domain) for domain in domains]

    def flat(world: tuple) -> int:
        index = 0
        for domain, size, position in zip(domains, sizes, positions):
            index = index * size + domain.index(world[position])
        return index

    pairs = set()
    for worlds in joint.probabilities:
        codes = sorted({flat(world) for world in worlds})
        pairs.update((a, b) for a, b in itertools.combinations(codes, 2))
    return pairs


def enumerate_fci_functions(
    model: DiscreteScm,
    inputs: Sequence[str],
    codomain: FiniteDomain | Sequence,
    intervened: str,
    limit: int | None = None,
) -> FciEnumeration:
    """Scan every function of `inputs` into `codomain` and keep the functionally invariant ones.

    A function is invariant iff it takes equal values on every pair of input assignments that the worlds of two
    interventions produce from one positive-probability noise tuple; those pairs are computed once.

    Args:
        model (DiscreteScm): A valid model.
        inputs (Sequence[str]): Input variables.
        codomain (FiniteDomain | Sequence): Output values.
        intervened (str): Intervened variable Z.
        limit (int, optional): Largest number of functions scanned. Default: the configured function limit.

    Raises:
        ResourceLimitError: |codomain| ** |input space| exceeds the limit.

    Returns:
        FciEnumeration: the invariant functions and their classification.

    """
    dag = model.dag
    inputs = tuple(inputs)
    dag.check_nodes((*inputs, intervened))
    codomain = codomain if isinstance(codomain, FiniteDomain) else FiniteDomain(tuple(codomain))
    domains = [dag.domain(variable) for variable in inputs]
    assignments = list(itertools.product(*domains))
    count = len(codomain) ** len(assignments)
    limit = dynamic_default(limit, get_config().function_limit)
    if count > limit:
        raise ResourceLimitError(f'functions of {list(inputs)}', count, limit)

    pairs = sorted(_must_equal(model, inputs, intervened))
    functions = []
    for outputs in itertools.product(range(len(codomain)), repeat=len(assignments)):
        if all(outputs[a] == outputs[b] for a, b in pairs):
            functions.append(
                FunctionSpec(
                    inputs, codomain, {values: codomain.values[o] for values, o in zip(assignments, outputs)}
                )
            )

    nd = non_descendants(dag, intervened)
    nd_inputs = tuple(variable for variable in inputs if variable in nd)
    nd_size = math.prod(len(dag.domain(variable)) for variable in nd_inputs)
    factors = all(function.depends_only_on(dag, nd_inputs) for function in functions)
    logger.debug('%d of %d functions of %s are invariant', len(functions), count, list(inputs))
    return FciEnumeration(
        inputs, codomain, tuple(functions), nd_inputs, factors, len(codomain) ** nd_size, count
    )


@dataclass(frozen=True)
class LatticeReport:
    """Check of the implications between almost sure and distributional invariance on one model."""

    passed: bool
    degree: Fraction
    gaps: Mapping[str, Fraction]
    violations: tuple[str, ...] = ()
    counterexample: Mapping[str, Any] | None = None
    notes: tuple[str, ...] = ()


def implication_lattice_check(
    model: DiscreteScm, target: str, intervened: str, conditioning_sets: Iterable[Iterable[str]]
) -> LatticeReport:
    """Check on one model that
    (i) almost sure invariance implies a zero distributional gap for every supplied W, and
    (ii) a zero gap for some W containing the target implies almost sure invariance.

    Args:
        model (DiscreteScm): A valid model.
        target (str): Target Y.
        intervened (str): Intervened variable Z.
        conditioning_sets (Iterable[Iterable[str]]): The sets W.

    Returns:
        LatticeReport: pass/fail, the gaps and a counterexample cell on failure.

    """
    degree = as_ci_degree(model, target, intervened)
    gaps = {}
    violations = []
    notes = []
    counterexample = None
    for conditioning in conditioning_sets:
        conditioning = tuple(sorted(conditioning))
        report = dci_report(model, target, intervened, conditioning)
        key = render_set(conditioning)
        gaps[key] = report.gap
        if degree == 1 and report.gap != 0:
            violations.append(f'almost surely invariant but the gap given {key} is {report.gap}')
            counterexample = counterexample or report.witness
        if target in conditioning and report.gap == 0 and degree != 1:
            violations.append(f'zero gap given {key}, which contains {target}, but the degree is {degree}')
            counterexample = counterexample or {'conditioning': key, 'degree': degree}
        if report.gap == 0 and degree != 1:
            notes.append(f'distributionally invariant given {key} without almost sure invariance')
    return LatticeReport(not violations, degree, gaps, tuple(violations), counterexample, tuple(notes))
