from fractions import Fraction

import numpy as np
import pytest

from cfinvar.exceptions import InvalidQueryError, ResourceLimitError, ValidationError
from cfinvar.fixtures import random_scm
from cfinvar.graph import CausalDag, descendants
from cfinvar.invariance import (
    FunctionSpec,
    as_ci_degree,
    as_ci_report,
    dci_gap,
    dci_report,
    enumerate_fci_functions,
    implication_lattice_check,
    is_fci,
)
from cfinvar.misc import subsets
from cfinvar.scm import DiscreteScm

HALF = Fraction(1, 2)


def copy_model(z_noise=(HALF, HALF)):
    """Z -> Y with Y := Z."""
    return DiscreteScm.from_functions(
        domains={'Z': (0, 1), 'Y': (0, 1)},
        edges=[('Z', 'Y')],
        noises={'Z': z_noise, 'Y': (1,)},
        functions={'Z': lambda _, n: n, 'Y': lambda p, _: p['Z']},
    )


def test_xor_almost_sure(xor_model):
    assert as_ci_degree(xor_model, 'Y', 'Z') == 0
    report = as_ci_report(xor_model, 'Y', 'Z')
    assert report.notion == 'almost-sure'
    assert not report.holds
    assert report.degree == 0
    assert report.witness == {'pair': [0, 1], 'noise': {'Y': 0, 'Z': 0}, 'values': [0, 1]}
    assert report.metadata['pairs'] == {'0,1': 0}


def test_xor_distributional(xor_model):
    assert dci_gap(xor_model, 'Y', 'Z') == 0
    assert dci_gap(xor_model, 'Y', 'Z', ['Y']) == 1
    report = dci_report(xor_model, 'Y', 'Z', ['Y'])
    assert not report.holds
    assert report.witness['given'] == {'Z': 0, 'Y': 0}
    assert report.witness['levels'] == [0, 1]
    assert report.metadata['conditioning'] == '{Y}'
    with pytest.raises(InvalidQueryError):
        dci_report(xor_model, 'Y', 'Z', ['Z'])
    with pytest.raises(InvalidQueryError):
        dci_report(xor_model, 'Y', 'Z', ['W'])


def test_pair_checks(xor_model):
    with pytest.raises(InvalidQueryError):
        as_ci_degree(xor_model, 'Z', 'Z')
    with pytest.raises(InvalidQueryError):
        as_ci_degree(xor_model, 'W', 'Z')


def test_mod2_almost_sure(mod2_model):
    assert as_ci_degree(mod2_model, 'Y', 'Z') == 1
    report = as_ci_report(mod2_model, 'Y', 'Z')
    assert report.holds
    assert report.witness is None
    assert as_ci_degree(mod2_model, 'X', 'Z') == 0


def test_root_target_is_invariant(xor_model):
    assert as_ci_degree(xor_model, 'Z', 'Y') == 1


def test_skipped_levels_and_cells():
    report = dci_report(copy_model((1, 0)), 'Y', 'Z', ['Y'])
    assert report.metadata['skipped_levels'] == [1]
    assert report.metadata['skipped_cells'] == [{'Z': 0, 'Y': 1}]
    assert report.gap == 1

    report = dci_report(copy_model(), 'Y', 'Z', ['Y'])
    assert report.metadata['skipped_levels'] == []
    assert report.metadata['skipped_cells'] == [{'Z': 0, 'Y': 1}, {'Z': 1, 'Y': 0}]


def test_function_spec(mod2_model):
    dag = mod2_model.dag
    parity = FunctionSpec.from_callable(dag, ['X'], (0, 1), lambda x: x % 2)
    assert parity({'X': 3, 'Z': 0}) == 1
    assert parity.violations(dag) == []
    assert not parity.depends_only_on(dag, [])
    assert parity.depends_only_on(dag, ['X'])
    assert FunctionSpec.constant(dag, ['X'], (0, 1), 1).depends_only_on(dag, [])

    partial = FunctionSpec(('X',), (0, 1), {(0,): 0, (1,): 7})
    assert partial.violations(dag) == [
        'function outputs 7 outside its codomain',
        "function is not defined at {'X': 2}",
        "function is not defined at {'X': 3}",
    ]
    with pytest.raises(ValidationError):
        partial({'X': 2})
    assert FunctionSpec(('W',), (0,), {}).violations(dag) == ["function input 'W' is not a variable"]


def test_is_fci(mod2_model):
    dag = mod2_model.dag
    parity = FunctionSpec.from_callable(dag, ['X'], (0, 1), lambda x: x % 2)
    report = is_fci(mod2_model, parity, 'Z')
    assert report.holds
    assert report.degree == 1
    assert report.metadata == {'inputs': ['X'], 'appended_degree': 1}

    identity = FunctionSpec.from_callable(dag, ['X'], (0, 1, 2, 3), lambda x: x)
    report = is_fci(mod2_model, identity, 'Z')
    assert not report.holds
    assert report.degree == 0
    assert report.witness == {'pair': [0, 1], 'probability': 0}

    with pytest.raises(ValidationError):
        is_fci(mod2_model, FunctionSpec(('X',), (0, 1), {(0,): 0}), 'Z')


def test_is_fci_agrees_with_target_invariance(mod2_model):
    dag = mod2_model.dag
    target = FunctionSpec.from_callable(dag, ['Y'], (0, 1, 2), lambda y: y)
    assert is_fci(mod2_model, target, 'Z').degree == as_ci_degree(mod2_model, 'Y', 'Z')


def test_enumerate_fci(mod2_model):
    result = enumerate_fci_functions(mod2_model, ['X'], (0, 1), 'Z')
    assert result.scanned == 16
    assert [function.table for function in result.functions] == [
        {(0,): 0, (1,): 0, (2,): 0, (3,): 0},
        {(0,): 0, (1,): 1, (2,): 0, (3,): 1},
        {(0,): 1, (1,): 0, (2,): 1, (3,): 0},
        {(0,): 1, (1,): 1, (2,): 1, (3,): 1},
    ]
    assert result.nd_inputs == ()
    assert result.nd_function_count == 2
    assert not result.factors_through_nd
    assert not result.equals_nd_class
    for function in result.functions:
        assert is_fci(mod2_model, function, 'Z').holds
    with pytest.raises(ResourceLimitError):
        enumerate_fci_functions(mod2_model, ['X'], (0, 1), 'Z', limit=3)


def test_enumerate_fci_non_descendant_inputs():
    # C -> Z -> Y and C -> Y with every response function in use
    dag = CausalDag({'C': (0, 1), 'Z': (0, 1), 'Y': (0, 1)}, [('C', 'Z'), ('C', 'Y'), ('Z', 'Y')])
    model = random_scm(dag, np.random.default_rng(4), noise_bits=12)
    result = enumerate_fci_functions(model, ['C', 'Y'], (0, 1), 'Z')
    assert result.nd_inputs == ('C',)
    assert result.nd_function_count == 4
    assert result.factors_through_nd
    assert result.equals_nd_class


def test_lattice_on_xor(xor_model):
    report = implication_lattice_check(xor_model, 'Y', 'Z', [(), ('Y',)])
    assert report.passed
    assert report.degree == 0
    assert report.gaps == {'{}': 0, '{Y}': 1}
    assert report.violations == ()
    assert report.notes == ('distributionally invariant given {} without almost sure invariance',)


LATTICE_GRAPHS = [
    CausalDag({'Z': (0, 1), 'Y': (0, 1)}, [('Z', 'Y')]),
    CausalDag({'Z': (0, 1), 'X': (0, 1), 'Y': (0, 1)}, [('Z', 'X'), ('X', 'Y')]),
    CausalDag({'C': (0, 1), 'Z': (0, 1), 'Y': (0, 1)}, [('C', 'Z'), ('C', 'Y'), ('Z', 'Y')]),
    CausalDag({'C': (0, 1), 'Z': (0, 1), 'Y': (0, 1)}, [('C', 'Z'), ('C', 'Y')]),
    CausalDag({'Z': (0, 1, 2), 'Y': (0, 1)}, [('Z', 'Y')]),
]


def test_implication_lattice_on_random_models():
    rng = np.random.default_rng(2024)
    for i in range(500):
        dag = LATTICE_GRAPHS[i % len(LATTICE_GRAPHS)]
        kind = 'response' if i % 2 else 'coupled'
        model = random_scm(dag, rng, kind, noise_bits=16)
        conditioning = list(subsets(node for node in dag.nodes if node != 'Z'))
        report = implication_lattice_check(model, 'Y', 'Z', conditioning)
        assert report.passed, report.violations
        if 'Y' not in descendants(dag, 'Z'):
            assert report.degree == 1
            assert all(gap == 0 for gap in report.gaps.values())
