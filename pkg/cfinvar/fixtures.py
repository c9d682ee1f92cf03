"""Reference models and random model generators."""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Hashable, Sequence

import numpy as np

from cfinvar.config import get_config
from cfinvar.exceptions import InvalidQueryError, ResourceLimitError
from cfinvar.graph import CausalDag, descendants
from cfinvar.misc import dynamic_default
from cfinvar.response import RESPONSE_LINE_ORDER, response_table
from cfinvar.scm import DiscreteScm, ExactDistribution, NoiseSpec, TabularMechanism, joint_distribution

__all__ = [
    'dirichlet_fractions',
    'independent_observation',
    'mod2_chain_model',
    'random_scm',
    'response_line_dag',
    'response_line_model',
    'response_line_observation',
    'response_line_vector',
    'xor_counterexample_model',
]

HALF = Fraction(1, 2)


def xor_counterexample_model() -> DiscreteScm:
    """Z ~ Ber(1/2), U ~ Ber(1/2), Y := Z xor U.

    Y is independent of Z, yet Y(0) != Y(1) for every noise tuple.
    """
    return DiscreteScm.from_functions(
        domains={'Z': (0, 1), 'Y': (0, 1)},
        edges=[('Z', 'Y')],
        noises={'Z': (HALF, HALF), 'Y': (HALF, HALF)},
        functions={
            'Z': lambda _, noise: noise,
            'Y': lambda parents, noise: parents['Z'] ^ noise,
        },
    )


def mod2_chain_model() -> DiscreteScm:
    """Z ~ Ber(1/2), X := 2 * 1{Z = 1} + N_X, Y := 1{X even} + N_Y with N_X, N_Y ~ Ber(1/2).

    Y is almost surely invariant to Z although the edge Z -> X is active.
    """
    return DiscreteScm.from_functions(
        domains={'Z': (0, 1), 'X': (0, 1, 2, 3), 'Y': (0, 1, 2)},
        edges=[('Z', 'X'), ('X', 'Y')],
        noises={'Z': (HALF, HALF), 'X': (HALF, HALF), 'Y': (HALF, HALF)},
        functions={
            'Z': lambda _, noise: noise,
            'X': lambda parents, noise: 2 * int(parents['Z'] == 1) + noise,
            'Y': lambda parents, noise: int(parents['X'] % 2 == 0) + noise,
        },
    )


def response_line_dag() -> CausalDag:
    """Binary Z -> Y."""
    return CausalDag({'Z': (0, 1), 'Y': (0, 1)}, [('Z', 'Y')])


def response_line_vector(p00: Fraction, p01: Fraction, lam: Fraction) -> tuple[Fraction, ...]:
    """Response distribution of Y on the line of models equivalent to P(Y=0 | Z=z) = p0z.

    Entries follow the listing (constant 0, constant 1, identity, negation).
    """
    p00, p01, lam = Fraction(p00), Fraction(p01), Fraction(lam)
    return (lam, 1 - p00 - p01 + lam, p00 - lam, p01 - lam)


def response_line_model(vector: Sequence[Fraction], pz: Fraction = HALF) -> DiscreteScm:
    """Binary Z -> Y where Y's noise selects a response function with the given probabilities.

    Args:
        vector (Sequence[Fraction]): probabilities of (constant 0, constant 1, identity, negation).
        pz (Fraction, optional): P(Z = 0). Default: 1/2.

    """
    vector = tuple(Fraction(q) for q in vector)
    if len(vector) != 4 or any(q < 0 for q in vector) or sum(vector) != 1:
        raise InvalidQueryError(f'not a distribution over the four response functions: {vector}')
    dag = response_line_dag()
    table = response_table(dag, 'Y')
    pz = Fraction(pz)
    return DiscreteScm(
        dag,
        {
            'Z': TabularMechanism('Z', (), {((), 0): 0, ((), 1): 1}),
            'Y': TabularMechanism.tabulate(
                'Y',
                ('Z',),
                [dag.domain('Z')],
                4,
                lambda parents, noise: table.evaluate(RESPONSE_LINE_ORDER[noise], parents),
            ),
        },
        {'Z': NoiseSpec('Z', (pz, 1 - pz)), 'Y': NoiseSpec('Y', vector)},
    )


def response_line_observation(p00: Fraction, p01: Fraction, pz: Fraction = HALF) -> ExactDistribution:
    """Observational law of (Z, Y) with P(Z = 0) = pz and P(Y = 0 | Z = z) = p0z."""
    p00, p01, pz = Fraction(p00), Fraction(p01), Fraction(pz)
    return ExactDistribution(
        ('Z', 'Y'),
        {
            (0, 0): pz * p00,
            (0, 1): pz * (1 - p00),
            (1, 0): (1 - pz) * p01,
            (1, 1): (1 - pz) * (1 - p01),
        },
    )


def dirichlet_fractions(size: int, rng: np.random.Generator, bits: int | None = None) -> tuple[Fraction, ...]:
    """Symmetric Dirichlet(1) draw truncated to exact positive rationals.

    Normalized exponential draws are scaled by 2**bits and rounded down (plus one, so every entry is positive);
    the result sums to exactly 1.

    Args:
        size (int): Number of entries.
        rng (np.random.Generator): Random generator.
        bits (int, optional): Resolution. Default: the configured noise bits.

    Returns:
        tuple[Fraction, ...]: the probabilities.

    """
    bits = dynamic_default(bits, get_config().noise_bits)
    weights = [1 + int(e * 2**bits) for e in rng.exponential(size=size)]
    total = sum(weights)
    return tuple(Fraction(weight, total) for weight in weights)


def _response_mechanism(dag: CausalDag, variable: str, rng: np.random.Generator, bits: int | None):
    table = response_table(dag, variable)
    limit = get_config().response_limit
    if table.count > limit:
        raise ResourceLimitError(f'response functions of {variable}', table.count, limit)
    parents = dag.parents(variable)
    noise = NoiseSpec(variable, dirichlet_fractions(table.count, rng, bits))
    mechanism = TabularMechanism.tabulate(
        variable, parents, [dag.domain(p) for p in parents], table.count, lambda values, n: table.evaluate(n, values)
    )
    return mechanism, noise


def _coupled_mechanism(dag: CausalDag, variable: str, rng: np.random.Generator, bits: int | None):
    """Random conditional tables realized by one shared uniform noise cut at every cumulative breakpoint."""
    parents = dag.parents(variable)
    domain = dag.domain(variable)
    assignments = list(itertools.product(*(dag.domain(p) for p in parents)))
    cumulative = {}
    breakpoints = {Fraction(0), Fraction(1)}
    for values in assignments:
        running = Fraction(0)
        cuts = []
        for q in dirichlet_fractions(len(domain), rng, bits):
            running += q
            cuts.append(running)
        cumulative[values] = cuts
        breakpoints.update(cuts)
    points = sorted(breakpoints)
    intervals = list(zip(points, points[1:]))

    def output(values: tuple, start: Fraction) -> Hashable:
        return domain.values[next(i for i, cut in enumerate(cumulative[values]) if start < cut)]

    table = {
        (values, n): output(values, start) for values in assignments for n, (start, _) in enumerate(intervals)
    }
    noise = NoiseSpec(variable, tuple(end - start for start, end in intervals))
    return TabularMechanism(variable, parents, table), noise


def random_scm(
    dag: CausalDag, rng: np.random.Generator, kind: str = 'response', noise_bits: int | None = None
) -> DiscreteScm:
    """Random model on a graph.

    Args:
        dag (CausalDag): The graph.
        rng (np.random.Generator): Random generator.
        kind (str, optional): 'response': one noise value per response function, with Dirichlet(1) weights, so
            every response function is used. 'coupled': random conditional tables with a compact comonotone
            noise, for tests that only look at observational or interventional laws. Default: 'response'.
        noise_bits (int, optional): Resolution of the Dirichlet draws. Default: the configured noise bits.

    Returns:
        DiscreteScm: the model.

    """
    if kind not in ('response', 'coupled'):
        raise InvalidQueryError(f"kind must be 'response' or 'coupled', got {kind!r}")
    build = _response_mechanism if kind == 'response' else _coupled_mechanism
    mechanisms = {}
    noises = {}
    for variable in dag.nodes:
        mechanisms[variable], noises[variable] = build(dag, variable, rng, noise_bits)
    return DiscreteScm(dag, mechanisms, noises)


def independent_observation(
    dag: CausalDag, intervened: str, target: str, rng: np.random.Generator, kind: str = 'coupled'
) -> ExactDistribution:
    """Random observational law over the graph's variables in which the target does not depend on De(Z).

    Edges from De(Z) into the target are removed before drawing a random model, so the independences that
    almost sure invariance of the target implies hold by construction.
    """
    downstream = descendants(dag, intervened)
    reduced = dag.without_edges([(parent, target) for parent in dag.parents(target) if parent in downstream])
    return joint_distribution(random_scm(reduced, rng, kind), dag.nodes)
