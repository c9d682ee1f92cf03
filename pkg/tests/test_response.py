from fractions import Fraction

import numpy as np
import pytest

from cfinvar.config import DEFAULT_CONFIG, set_config
from cfinvar.exceptions import InvalidQueryError, ResourceLimitError
from cfinvar.fixtures import random_scm
from cfinvar.graph import CausalDag
from cfinvar.response import (
    RESPONSE_LINE_ORDER,
    canonical_counterfactual_probability,
    canonical_distribution,
    canonicalize,
    enumerate_response_functions,
    evaluate_world,
    response_table,
    to_joint_vector,
)
from cfinvar.scm import Clause, CounterfactualQuery, counterfactual_probability, joint_distribution

HALF = Fraction(1, 2)

GRAPHS = [
    CausalDag({'Z': (0, 1), 'Y': (0, 1)}, [('Z', 'Y')]),
    CausalDag({'Z': (0, 1), 'X': (0, 1, 2), 'Y': (0, 1)}, [('Z', 'X'), ('X', 'Y')]),
    CausalDag({'C': (0, 1), 'Z': (0, 1), 'Y': (0, 1)}, [('C', 'Z'), ('C', 'Y'), ('Z', 'Y')]),
]


def test_binary_listing():
    table = enumerate_response_functions([(0, 1)], (0, 1))
    assert table.count == 4
    assert [table.outputs(index) for index in RESPONSE_LINE_ORDER] == [[0, 0], [1, 1], [0, 1], [1, 0]]
    assert table.digits(2) == '01'
    assert table.digits(1) == '10'
    assert table.evaluate(2, [1]) == 1
    assert table.evaluate(1, {'_0': 1}) == 0
    assert table.index_of([1, 0]) == 1


def test_table_bijection():
    table = enumerate_response_functions([(0, 1), ('a', 'b', 'c')], (0, 1, 2), variable='Y', parents=('A', 'B'))
    assert table.parent_size == 6
    assert table.count == 729
    assert list(table.parent_assignments())[1] == (0, 'b')
    assert table.position({'A': 1, 'B': 'a'}) == 3
    for index in (0, 1, 100, 728):
        assert table.index_of(table.outputs(index)) == index
        for position, values in enumerate(table.parent_assignments()):
            assert table.evaluate(index, values) == table.outputs(index)[position]
    with pytest.raises(InvalidQueryError):
        table.outputs(729)
    with pytest.raises(InvalidQueryError):
        table.index_of([0, 1])


def test_parentless_table():
    table = enumerate_response_functions([], ('x', 'y', 'z'))
    assert table.count == 3
    assert table.outputs(2) == ['z']


def test_wide_codomain_digits():
    table = enumerate_response_functions([], tuple(range(12)))
    assert table.digits(11) == '11'


def test_limits():
    with pytest.raises(ResourceLimitError) as info:
        enumerate_response_functions([(0, 1), (0, 1, 2)], (0, 1, 2), limit=100)
    assert info.value.size == 729
    assert info.value.exit_code == 3
    set_config(DEFAULT_CONFIG.merged({'response_limit': 3}))
    with pytest.raises(ResourceLimitError):
        enumerate_response_functions([(0, 1)], (0, 1))
    with pytest.raises(InvalidQueryError):
        enumerate_response_functions([(0, 1)], ())


def test_canonicalize_xor(xor_model):
    canon = canonicalize(xor_model)
    assert canon.distributions['Y'] == {2: HALF, 1: HALF}
    assert canon.distributions['Z'] == {0: HALF, 1: HALF}
    assert canon.support('Y') == [(1, HALF), (2, HALF)]
    vector = to_joint_vector(canon, ['Y'])
    assert vector.probabilities == {(1,): HALF, (2,): HALF}
    assert vector.dense([4]) == [0, HALF, HALF, 0]


def test_canonicalize_mod2(mod2_model):
    canon = canonicalize(mod2_model)
    table = canon.tables['Y']
    # Y is 1{X even} + N_Y, a function of the parity of X
    for index in canon.distributions['Y']:
        outputs = table.outputs(index)
        assert outputs[0] == outputs[2]
        assert outputs[1] == outputs[3]
    assert canonical_distribution(canon, ['Z', 'Y']) == joint_distribution(mod2_model, ['Z', 'Y'])


def test_joint_vector():
    canon = canonicalize(random_scm(GRAPHS[1], np.random.default_rng(0)))
    vector = to_joint_vector(canon)
    assert vector.variables == ('X', 'Y', 'Z')
    assert vector.total() == 1
    assert len(vector.probabilities) == 9 * 8 * 2
    assert vector.marginal(['Z']).probabilities == canonicalize_marginal(canon, 'Z')
    with pytest.raises(ResourceLimitError):
        to_joint_vector(canon, limit=10)
    with pytest.raises(InvalidQueryError):
        to_joint_vector(canon, [])


def canonicalize_marginal(canon, variable):
    return {(index,): q for index, q in canon.distributions[variable].items()}


def test_evaluate_world():
    dag = GRAPHS[0]
    assert evaluate_world({'Z': 1, 'Y': 2}, dag) == {'Z': 1, 'Y': 1}
    assert evaluate_world({'Y': 1}, dag, {'Z': 1}) == {'Z': 1, 'Y': 0}
    with pytest.raises(InvalidQueryError, match='no response index for Y'):
        evaluate_world({'Z': 0}, dag)


def test_response_table_has_no_limit():
    dag = CausalDag({'A': tuple(range(3)), 'B': tuple(range(3)), 'Y': tuple(range(3))}, [('A', 'Y'), ('B', 'Y')])
    set_config(DEFAULT_CONFIG.merged({'response_limit': 2}))
    assert response_table(dag, 'Y').count == 3**9


@pytest.mark.parametrize('kind', ['response', 'coupled'])
def test_canonical_model_reproduces_laws(kind):
    rng = np.random.default_rng(11)
    for _ in range(35):
        for dag in GRAPHS:
            model = random_scm(dag, rng, kind, noise_bits=8)
            canon = canonicalize(model)
            assert canonical_distribution(canon, dag.nodes) == joint_distribution(model, dag.nodes)
            query = CounterfactualQuery.invariance('Y', 'Z', 0, 1)
            assert canonical_counterfactual_probability(canon, query) == counterfactual_probability(model, query)
            query = CounterfactualQuery((Clause({'Y': 0}), Clause({'Y': 1}, {'Z': 1})))
            assert canonical_counterfactual_probability(canon, query) == counterfactual_probability(model, query)
