"""Randomized and grid experiments on invariance, equivalence classes and functional invariance.

Every experiment is a pure function of its configuration: randomness comes from the configured seed only, and
per-sample generators are derived from it with `numpy.random.SeedSequence.spawn`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from tqdm import tqdm

from cfinvar.exceptions import InvalidQueryError, UnsupportedStructureError
from cfinvar.fixtures import (
    independent_observation,
    mod2_chain_model,
    random_scm,
    response_line_dag,
    response_line_observation,
    response_line_vector,
)
from cfinvar.graph import CausalDag, FiniteDomain, descendants
from cfinvar.invariance import as_ci_degree, dci_gap, enumerate_fci_functions
from cfinvar.misc import format_rational, plain
from cfinvar.polytope import (
    build_polytope,
    ci_degree_bounds,
    degree_functional,
    lambda_interval,
    sample_polytope_per_seed,
)
from cfinvar.response import RESPONSE_LINE_ORDER, response_table
from cfinvar.scm import DiscreteScm, ExactDistribution, NoiseSpec, TabularMechanism
from cfinvar.timer import Timer

__all__ = [
    'CSV_HEADER',
    'ExperimentConfig',
    'ExperimentReport',
    'aggregate',
    'dci_embedding_demo',
    'demo_unbounded_degree',
    'fci_rarity',
    'measure_zero_as_ci',
    'sample_seeds',
]

logger = logging.getLogger(__name__)

CSV_HEADER = ('sample', 'seed', 'degree', 'gap', 'fci')

TRUNCATION_NOTE = (
    'random probabilities are Dirichlet(1) draws truncated to rationals, so exact invariance is astronomically '
    'improbable rather than impossible'
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of a randomized experiment.

    Args:
        graph (CausalDag): The graph.
        intervened (str): Intervened variable Z.
        target (str): Target Y.
        n (int, optional): Number of samples. Default: 1000.
        seed (int, optional): Master seed. Default: 0.
        epsilon (Fraction, optional): Threshold of near invariance, degree >= 1 - epsilon. Default: 1/10.
        output (str, optional): CSV path for the per-sample table. Default: None.
        inputs (tuple[str, ...], optional): Function inputs for functional invariance. Default: ().
        codomain_size (int, optional): Number of function outputs. Default: 2.
        observed (ExactDistribution, optional): Fixed observation instead of a random one. Default: None.

    """

    graph: CausalDag
    intervened: str
    target: str
    n: int = 1000
    seed: int = 0
    epsilon: Fraction = Fraction(1, 10)
    output: str | None = None
    inputs: tuple[str, ...] = ()
    codomain_size: int = 2
    observed: ExactDistribution | None = None

    def __post_init__(self) -> None:  # noqa: D105
        object.__setattr__(self, 'epsilon', Fraction(self.epsilon))
        object.__setattr__(self, 'inputs', tuple(self.inputs))
        if self.n < 1:
            raise InvalidQueryError('number of samples must be at least 1')
        if not 0 < self.epsilon < 1:
            raise InvalidQueryError('epsilon must lie strictly between 0 and 1')
        if self.seed < 0:
            raise InvalidQueryError('seed must be non-negative')
        if self.codomain_size < 1:
            raise InvalidQueryError('codomain must have at least one value')
        self.graph.check_nodes((self.intervened, self.target, *self.inputs))

    def echo(self) -> dict[str, Any]:
        """Configuration as plain data."""
        return {
            'variables': {node: list(self.graph.domain(node)) for node in self.graph.nodes},
            'edges': [f'{parent} -> {child}' for parent, child in self.graph.edges],
            'intervened': self.intervened,
            'target': self.target,
            'n': self.n,
            'seed': self.seed,
            'epsilon': format_rational(self.epsilon),
            'inputs': list(self.inputs),
            'codomain_size': self.codomain_size,
            'observed': 'fixed' if self.observed is not None else 'random',
        }


@dataclass(frozen=True)
class ExperimentReport:
    """Per-sample records, aggregates recomputable from them, and the configuration echo."""

    name: str
    config: Mapping[str, Any]
    records: tuple[Mapping[str, Any], ...]
    aggregates: Mapping[str, Any]
    notes: tuple[str, ...] = ()
    parameters: Mapping[str, Any] = field(default_factory=dict)

    def to_document(self) -> dict[str, Any]:
        """Report as plain data, in a stable key order."""
        return {
            'experiment': self.name,
            'config': plain(dict(self.config)),
            'aggregates': plain(dict(self.aggregates)),
            'notes': list(self.notes),
            'records': [plain(dict(record)) for record in self.records],
        }

    def csv_rows(self) -> list[dict[str, Any]]:
        """One row per record with the columns of CSV_HEADER."""
        rows = []
        for record in self.records:
            row = plain(dict(record))
            rows.append({column: '' if row.get(column) is None else row[column] for column in CSV_HEADER})
        return rows


def sample_seeds(seed: int, n: int) -> list[int]:
    """Independent per-sample seeds split from a master seed."""
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]


def demo_unbounded_degree(p: Fraction, grid: int = 11, verbose: bool = False) -> ExperimentReport:
    """Sweep the models equivalent to an observation in which Y is independent of Z.

    The observation on binary Z -> Y has P(Y=0 | Z=0) = P(Y=0 | Z=1) = p; the equivalent models form a segment
    parameterized by the mass lambda on the constant-0 response function, and the degree of almost sure
    invariance is 1 - 2p + 2 lambda along it.

    Args:
        p (Fraction): P(Y = 0 | Z = z), strictly between 0 and 1.
        grid (int, optional): Number of evenly spaced lambda values; 1 gives the midpoint. Default: 11.
        verbose (bool, optional): Show a progress bar. Default: False.

    Returns:
        ExperimentReport: degree per grid point and the exact degree bounds.

    """
    p = Fraction(p)
    if not 0 < p < 1:
        raise InvalidQueryError('p must lie strictly between 0 and 1')
    if grid < 1:
        raise InvalidQueryError('grid must have at least one point')
    dag = response_line_dag()
    observed = response_line_observation(p, p)
    polytope = build_polytope(dag, observed, 'Z')
    bounds = ci_degree_bounds(dag, observed, 'Y', 'Z', polytope=polytope)
    line = lambda_interval(polytope)
    functional = degree_functional(polytope, 'Y')

    records = []
    for k, lam in enumerate(tqdm(_grid(line.min, line.max, grid), disable=not verbose, desc='lambda grid')):
        point = [Fraction(0)] * polytope.dimension
        for source, mass in zip(RESPONSE_LINE_ORDER, response_line_vector(p, p, lam)):
            point[polytope.column_of((source,))] = mass
        records.append({'sample': k, 'lambda': lam, 'degree': functional(point)})

    return ExperimentReport(
        'unbounded-degree',
        {'p': format_rational(p), 'grid': grid},
        tuple(records),
        _aggregate_unbounded(records, {'degree_min': bounds.min, 'degree_max': bounds.max}),
        parameters={'degree_min': bounds.min, 'degree_max': bounds.max},
    )


def _grid(low: Fraction, high: Fraction, size: int) -> list[Fraction]:
    if size == 1:
        return [(low + high) / 2]
    return [low + (high - low) * k / (size - 1) for k in range(size)]


def _aggregate_unbounded(records: Sequence[Mapping[str, Any]], parameters: Mapping[str, Any]) -> dict[str, Any]:
    degrees = [record['degree'] for record in records]
    return {
        'degree_min': parameters['degree_min'],
        'degree_max': parameters['degree_max'],
        'grid_min': min(degrees),
        'grid_max': max(degrees),
        'endpoints_attained': min(degrees) == parameters['degree_min'] and max(degrees) == parameters['degree_max'],
    }


def measure_zero_as_ci(config: ExperimentConfig, verbose: bool = False) -> ExperimentReport:
    """Sample equivalent models of an independence-satisfying observation and count invariant ones.

    The observation is `config.observed` or a random law in which the target does not depend on De(Z). Each
    model is drawn from the equivalence polytope by its own hit-and-run walk, seeded with the record's `seed`;
    each record holds the degree of almost sure invariance, and the aggregates count exact (degree 1) and near
    (degree >= 1 - epsilon) invariance.

    Args:
        config (ExperimentConfig): Configuration; the intervened variable must be a root.
        verbose (bool, optional): Show a progress bar. Default: False.

    Returns:
        ExperimentReport: per-sample degrees and the counts.

    """
    timer = Timer().start()
    rng = np.random.default_rng(config.seed)
    observed = config.observed
    if observed is None:
        observed = independent_observation(config.graph, config.intervened, config.target, rng)
    polytope = build_polytope(config.graph, observed, config.intervened)
    levels = config.graph.domain(config.intervened).values
    pairs = [(a, b) for i, a in enumerate(levels) for b in levels[i + 1 :]]
    functionals = [degree_functional(polytope, config.target, pair) for pair in pairs]

    seeds = sample_seeds(config.seed, config.n)
    points = sample_polytope_per_seed(polytope, seeds)
    records = []
    samples = tqdm(zip(seeds, points), total=config.n, disable=not verbose, desc='measure-zero')
    for i, (seed, point) in enumerate(samples):
        degree = min((functional(point) for functional in functionals), default=Fraction(1))
        records.append({'sample': i, 'seed': seed, 'degree': degree})

    aggregates = _aggregate_measure_zero(records, {'epsilon': config.epsilon})
    logger.info('measure-zero experiment: %d samples in %.2fs', config.n, timer.stop())
    return ExperimentReport(
        'measure-zero',
        config.echo(),
        tuple(records),
        aggregates,
        notes=(TRUNCATION_NOTE, 'samples are hit-and-run points snapped to exact feasible rationals'),
        parameters={'epsilon': config.epsilon},
    )


def _aggregate_measure_zero(records: Sequence[Mapping[str, Any]], parameters: Mapping[str, Any]) -> dict[str, Any]:
    threshold = 1 - parameters['epsilon']
    exact = sum(record['degree'] == 1 for record in records)
    near = sum(record['degree'] >= threshold for record in records)
    return {
        'n': len(records),
        'exact_count': exact,
        'near_count': near,
        'near_fraction': Fraction(near, len(records)),
    }


def _fci_summary(count: int, nd_count: int) -> str:
    return f'{count} invariant of {nd_count} non-descendant'


def fci_rarity(config: ExperimentConfig, verbose: bool = False) -> ExperimentReport:
    """Check on random models that the functionally invariant functions are the functions of Nd(Z).

    Each sample draws a random model with uniformly weighted response functions, enumerates the invariant
    functions of `config.inputs` and records whether they differ from the functions of the non-descendant inputs.
    The mod-2 chain model, whose parity function is invariant although it reads a descendant of Z, is checked
    alongside as the known exception.

    Args:
        config (ExperimentConfig): Configuration with `inputs` and `codomain_size`.
        verbose (bool, optional): Show a progress bar. Default: False.

    Returns:
        ExperimentReport: per-sample classification and the violation count.

    """
    if not config.inputs:
        raise InvalidQueryError('functional invariance needs at least one input')
    timer = Timer().start()
    codomain = FiniteDomain(tuple(range(config.codomain_size)))
    records = []
    for i, seed in enumerate(tqdm(sample_seeds(config.seed, config.n), disable=not verbose, desc='fci-rarity')):
        model = random_scm(config.graph, np.random.default_rng(seed))
        enumeration = enumerate_fci_functions(model, config.inputs, codomain, config.intervened)
        records.append(
            {
                'sample': i,
                'seed': seed,
                'fci_count': len(enumeration.functions),
                'nd_function_count': enumeration.nd_function_count,
                'violation': not enumeration.equals_nd_class,
                'constants_only': len(enumeration.functions) == config.codomain_size,
                'fci': _fci_summary(len(enumeration.functions), enumeration.nd_function_count),
            }
        )

    fixture = enumerate_fci_functions(mod2_chain_model(), ('X',), FiniteDomain((0, 1)), 'Z')
    aggregates = _aggregate_fci(records, {'fixture_flagged': not fixture.equals_nd_class})
    logger.info('fci-rarity experiment: %d samples in %.2fs', config.n, timer.stop())
    return ExperimentReport(
        'fci-rarity',
        config.echo(),
        tuple(records),
        aggregates,
        notes=(TRUNCATION_NOTE,),
        parameters={'fixture_flagged': not fixture.equals_nd_class},
    )


def _aggregate_fci(records: Sequence[Mapping[str, Any]], parameters: Mapping[str, Any]) -> dict[str, Any]:
    return {
        'n': len(records),
        'violations': sum(record['violation'] for record in records),
        'constants_only': sum(record['constants_only'] for record in records),
        'fixture_flagged': parameters['fixture_flagged'],
    }


def _uniform_mechanism(dag: CausalDag, variable: str) -> tuple[TabularMechanism, NoiseSpec]:
    parents = dag.parents(variable)
    domain = dag.domain(variable)
    mechanism = TabularMechanism.tabulate(
        variable, parents, [dag.domain(p) for p in parents], len(domain), lambda _, noise: domain.values[noise]
    )
    return mechanism, NoiseSpec.uniform(variable, len(domain))


def _embedding_model(
    dag: CausalDag, intervened: str, mediator: str, target: str, vector: Sequence[Fraction] | None
) -> DiscreteScm:
    """Z uniform, the mediator on the response line (or uniform noise), target := mediator, the rest uniform."""
    mechanisms = {}
    noises = {}
    for variable in dag.nodes:
        mechanisms[variable], noises[variable] = _uniform_mechanism(dag, variable)
    parents = dag.parents(mediator)
    if vector is not None:
        table = response_table(CausalDag({intervened: (0, 1), mediator: (0, 1)}, [(intervened, mediator)]), mediator)
        mechanisms[mediator] = TabularMechanism.tabulate(
            mediator,
            parents,
            [dag.domain(p) for p in parents],
            4,
            lambda values, noise: table.evaluate(RESPONSE_LINE_ORDER[noise], {intervened: values[intervened]}),
        )
        noises[mediator] = NoiseSpec(mediator, tuple(vector))
    target_parents = dag.parents(target)
    mechanisms[target] = TabularMechanism.tabulate(
        target, target_parents, [dag.domain(p) for p in target_parents], 1, lambda values, _: values[mediator]
    )
    noises[target] = NoiseSpec(target, (Fraction(1),))
    return DiscreteScm(dag, mechanisms, noises)


def dci_embedding_demo(
    graph: CausalDag, intervened: str, mediator: str, target: str, grid: int = 11, p: Fraction = Fraction(1, 2)
) -> ExperimentReport:
    """Distributional gap given {w} when the target copies a parent w.

    With Y := w the gap conditional on W = {w} is zero exactly when w is almost surely invariant, so sweeping the
    equivalence segment of (Z, w) for P(w=0 | Z=z) = p moves the gap between its extremes while every observation
    stays fixed.

    Args:
        graph (CausalDag): Graph with w a parent of the target; if w descends from Z, Z must be a parent of w.
        intervened (str): Root intervened variable Z.
        mediator (str): The vertex w.
        target (str): Target Y.
        grid (int, optional): Number of points on the segment; 1 gives the midpoint. Default: 11.
        p (Fraction, optional): P(w = 0 | Z = z). Default: 1/2.

    Raises:
        UnsupportedStructureError: the graph lacks the required shape or domains.

    Returns:
        ExperimentReport: per-point degree of w and gap, with the reduction check.

    """
    p = Fraction(p)
    graph.check_nodes((intervened, mediator, target))
    if grid < 1:
        raise InvalidQueryError('grid must have at least one point')
    if not 0 < p < 1:
        raise InvalidQueryError('p must lie strictly between 0 and 1')
    if graph.parents(intervened):
        raise UnsupportedStructureError(f'{intervened} must be a root')
    if mediator not in graph.parents(target):
        raise UnsupportedStructureError(f'{mediator} must be a parent of {target}')
    if any(value not in graph.domain(target) for value in graph.domain(mediator)):
        raise UnsupportedStructureError(f'{target} cannot copy {mediator}: domains differ')
    downstream = mediator in descendants(graph, intervened)
    if downstream:
        if intervened not in graph.parents(mediator):
            raise UnsupportedStructureError(f'{intervened} must be a parent of {mediator}')
        for variable in (intervened, mediator):
            if graph.domain(variable).values != (0, 1):
                raise UnsupportedStructureError(f'{variable} must have the domain (0, 1)')

    records = []
    if downstream:
        line = lambda_interval(build_polytope(response_line_dag(), response_line_observation(p, p), 'Z'))
        lambdas = _grid(line.min, line.max, grid)
    else:
        lambdas = [None] * grid
    for k, lam in enumerate(lambdas):
        vector = response_line_vector(p, p, lam) if lam is not None else None
        model = _embedding_model(graph, intervened, mediator, target, vector)
        degree = as_ci_degree(model, mediator, intervened)
        gap = dci_gap(model, target, intervened, (mediator,))
        records.append({'sample': k, 'lambda': lam, 'degree': degree, 'gap': gap})

    return ExperimentReport(
        'dci-embedding',
        {
            'edges': [f'{a} -> {b}' for a, b in graph.edges],
            'intervened': intervened,
            'mediator': mediator,
            'target': target,
            'grid': grid,
            'p': format_rational(p),
        },
        tuple(records),
        _aggregate_embedding(records, {}),
    )


def _aggregate_embedding(records: Sequence[Mapping[str, Any]], parameters: Mapping[str, Any]) -> dict[str, Any]:
    gaps = [record['gap'] for record in records]
    return {
        'gap_min': min(gaps),
        'gap_max': max(gaps),
        'endpoints_attained': min(gaps) == 0 and max(gaps) == 1,
        'reduction_holds': all((record['gap'] == 0) == (record['degree'] == 1) for record in records),
    }


AGGREGATORS: dict[str, Callable[[Sequence[Mapping[str, Any]], Mapping[str, Any]], dict[str, Any]]] = {
    'unbounded-degree': _aggregate_unbounded,
    'measure-zero': _aggregate_measure_zero,
    'fci-rarity': _aggregate_fci,
    'dci-embedding': _aggregate_embedding,
}


def aggregate(report: ExperimentReport) -> dict[str, Any]:
    """Recompute the aggregates of a report from its records."""
    return AGGREGATORS[report.name](report.records, report.parameters)
