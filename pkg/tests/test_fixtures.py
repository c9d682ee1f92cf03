from fractions import Fraction

import numpy as np
import pytest

from cfinvar.exceptions import InvalidQueryError, ResourceLimitError
from cfinvar.fixtures import (
    dirichlet_fractions,
    independent_observation,
    mod2_chain_model,
    random_scm,
    response_line_dag,
    response_line_model,
    response_line_observation,
    response_line_vector,
    xor_counterexample_model,
)
from cfinvar.graph import CausalDag
from cfinvar.invariance import as_ci_degree
from cfinvar.response import canonicalize
from cfinvar.scm import joint_distribution, validate_model

HALF = Fraction(1, 2)


def test_dirichlet_fractions():
    rng = np.random.default_rng(0)
    for size in (1, 2, 5):
        draw = dirichlet_fractions(size, rng, bits=10)
        assert len(draw) == size
        assert sum(draw) == 1
        assert all(q > 0 for q in draw)
    first = dirichlet_fractions(4, np.random.default_rng(9))
    assert first == dirichlet_fractions(4, np.random.default_rng(9))


def test_reference_models_are_valid():
    for model in (xor_counterexample_model(), mod2_chain_model()):
        assert validate_model(model).ok


@pytest.mark.parametrize('kind', ['response', 'coupled'])
def test_random_scm(kind):
    dag = CausalDag({'Z': (0, 1), 'X': (0, 1, 2), 'Y': (0, 1)}, [('Z', 'X'), ('X', 'Y'), ('Z', 'Y')])
    model = random_scm(dag, np.random.default_rng(1), kind, noise_bits=12)
    assert validate_model(model).ok
    assert model.dag == dag
    assert joint_distribution(model, dag.nodes).total() == 1
    again = random_scm(dag, np.random.default_rng(1), kind, noise_bits=12)
    assert again == model


def test_random_response_scm_uses_every_function():
    dag = CausalDag({'Z': (0, 1), 'Y': (0, 1)}, [('Z', 'Y')])
    canon = canonicalize(random_scm(dag, np.random.default_rng(3)))
    assert sorted(canon.distributions['Y']) == [0, 1, 2, 3]


def test_random_scm_errors():
    dag = response_line_dag()
    with pytest.raises(InvalidQueryError):
        random_scm(dag, np.random.default_rng(0), 'uniform')
    wide = CausalDag({'A': tuple(range(4)), 'B': tuple(range(4)), 'Y': tuple(range(4))}, [('A', 'Y'), ('B', 'Y')])
    with pytest.raises(ResourceLimitError):
        random_scm(wide, np.random.default_rng(0))


def test_response_line_model_matches_observation():
    for p00, p01 in [(HALF, HALF), (Fraction(1, 3), Fraction(3, 4)), (Fraction(1, 5), 0)]:
        low, high = max(Fraction(0), p00 + p01 - 1), min(p00, p01)
        for lam in (low, high, (low + high) / 2):
            vector = response_line_vector(p00, p01, lam)
            assert sum(vector) == 1
            model = response_line_model(vector, pz=Fraction(1, 3))
            assert validate_model(model).ok
            assert joint_distribution(model, ['Z', 'Y']) == response_line_observation(p00, p01, Fraction(1, 3))
            assert as_ci_degree(model, 'Y', 'Z') == 1 - p00 - p01 + 2 * lam


def test_response_line_model_rejects_non_distributions():
    with pytest.raises(InvalidQueryError):
        response_line_model((HALF, HALF, HALF, -HALF))
    with pytest.raises(InvalidQueryError):
        response_line_model((HALF, HALF))


def test_independent_observation():
    dag = CausalDag({'Z': (0, 1), 'X': (0, 1), 'Y': (0, 1)}, [('Z', 'X'), ('X', 'Y')])
    observed = independent_observation(dag, 'Z', 'Y', np.random.default_rng(5))
    assert observed.variables == ('X', 'Y', 'Z')
    assert observed.total() == 1
    assert observed.marginal(['Z', 'Y']).probabilities == {
        (z, y): observed.probability({'Z': z}) * observed.probability({'Y': y}) for z in (0, 1) for y in (0, 1)
    }
