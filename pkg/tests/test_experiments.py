from fractions import Fraction

import pytest

from cfinvar.exceptions import InvalidQueryError, UnsupportedStructureError
from cfinvar.experiments import (
    CSV_HEADER,
    ExperimentConfig,
    aggregate,
    dci_embedding_demo,
    demo_unbounded_degree,
    fci_rarity,
    measure_zero_as_ci,
    sample_seeds,
)
from cfinvar.fixtures import response_line_dag, response_line_observation
from cfinvar.graph import CausalDag
from cfinvar.polytope import build_polytope, degree_functional, sample_polytope_points

HALF = Fraction(1, 2)

BINARY = (0, 1)


def test_unbounded_degree():
    report = demo_unbounded_degree(HALF)
    assert report.aggregates == {
        'degree_min': 0,
        'degree_max': 1,
        'grid_min': 0,
        'grid_max': 1,
        'endpoints_attained': True,
    }
    assert [record['degree'] for record in report.records] == [Fraction(k, 10) for k in range(11)]
    assert report.records[4]['lambda'] == Fraction(1, 5)
    assert aggregate(report) == report.aggregates


def test_unbounded_degree_single_point():
    report = demo_unbounded_degree(Fraction(1, 3), grid=1)
    # lambda ranges over [0, 1/3]; the degree over [1/3, 1]
    assert report.aggregates['degree_min'] == Fraction(1, 3)
    assert report.aggregates['degree_max'] == 1
    assert report.records[0]['degree'] == Fraction(2, 3)
    assert not report.aggregates['endpoints_attained']


def test_unbounded_degree_arguments():
    with pytest.raises(InvalidQueryError):
        demo_unbounded_degree(0)
    with pytest.raises(InvalidQueryError):
        demo_unbounded_degree(1)
    with pytest.raises(InvalidQueryError):
        demo_unbounded_degree(HALF, grid=0)


def test_measure_zero():
    config = ExperimentConfig(
        response_line_dag(), 'Z', 'Y', n=1000, seed=17, observed=response_line_observation(HALF, HALF)
    )
    report = measure_zero_as_ci(config)
    assert report.name == 'measure-zero'
    assert report.aggregates['n'] == 1000
    assert report.aggregates['exact_count'] == 0
    # the degree 2 lambda is uniform on [0, 1]
    assert 0.06 <= report.aggregates['near_fraction'] <= 0.14
    assert all(0 <= record['degree'] <= 1 for record in report.records)
    assert aggregate(report) == report.aggregates
    assert report.config['observed'] == 'fixed'
    assert measure_zero_as_ci(config).records == report.records


def test_measure_zero_records_reproduce_alone():
    observed = response_line_observation(HALF, HALF)
    report = measure_zero_as_ci(ExperimentConfig(response_line_dag(), 'Z', 'Y', n=30, seed=5, observed=observed))
    assert [record['seed'] for record in report.records] == sample_seeds(5, 30)
    polytope = build_polytope(response_line_dag(), observed, 'Z')
    degree = degree_functional(polytope, 'Y')
    for record in report.records[::7]:
        point = sample_polytope_points(polytope, 1, record['seed'], thinning=1)[0]
        assert degree(point) == record['degree']


def test_measure_zero_random_observation():
    dag = CausalDag({'Z': BINARY, 'X': BINARY, 'Y': BINARY}, [('Z', 'X'), ('X', 'Y')])
    config = ExperimentConfig(dag, 'Z', 'Y', n=20, seed=3)
    report = measure_zero_as_ci(config)
    assert report.aggregates['n'] == 20
    assert report.aggregates['exact_count'] == 0
    assert report.config['observed'] == 'random'
    assert len(report.notes) == 2


def test_measure_zero_needs_root():
    dag = CausalDag({'Z': BINARY, 'X': BINARY, 'Y': BINARY}, [('X', 'Z'), ('Z', 'Y')])
    with pytest.raises(UnsupportedStructureError):
        measure_zero_as_ci(ExperimentConfig(dag, 'Z', 'Y', n=5))


def test_fci_rarity():
    dag = CausalDag({'C': BINARY, 'Z': BINARY, 'X': BINARY, 'Y': BINARY}, [('Z', 'X'), ('X', 'Y')])
    config = ExperimentConfig(dag, 'Z', 'Y', n=500, seed=8, inputs=('X', 'C'))
    report = fci_rarity(config)
    assert report.aggregates == {'n': 500, 'violations': 0, 'constants_only': 0, 'fixture_flagged': True}
    assert report.records[0]['fci'] == '4 invariant of 4 non-descendant'
    assert [record['seed'] for record in report.records] == sample_seeds(8, 500)
    assert aggregate(report) == report.aggregates


def test_fci_rarity_needs_inputs():
    with pytest.raises(InvalidQueryError):
        fci_rarity(ExperimentConfig(response_line_dag(), 'Z', 'Y', n=1))


def test_dci_embedding():
    dag = CausalDag({'Z': BINARY, 'W': BINARY, 'Y': BINARY}, [('Z', 'W'), ('W', 'Y')])
    report = dci_embedding_demo(dag, 'Z', 'W', 'Y', grid=5)
    assert report.aggregates == {'gap_min': 0, 'gap_max': 1, 'endpoints_attained': True, 'reduction_holds': True}
    assert [record['degree'] for record in report.records] == [0, Fraction(1, 4), HALF, Fraction(3, 4), 1]
    assert report.records[0]['gap'] == 1
    assert report.records[-1]['gap'] == 0
    assert aggregate(report) == report.aggregates


def test_dci_embedding_non_descendant_mediator():
    dag = CausalDag({'Z': BINARY, 'C': BINARY, 'Y': BINARY}, [('C', 'Y'), ('Z', 'Y')])
    report = dci_embedding_demo(dag, 'Z', 'C', 'Y', grid=2)
    assert report.aggregates['gap_max'] == 0
    assert report.aggregates['reduction_holds']
    assert not report.aggregates['endpoints_attained']
    assert [record['lambda'] for record in report.records] == [None, None]


def test_dci_embedding_structure_errors():
    dag = CausalDag({'Z': BINARY, 'W': BINARY, 'Y': BINARY}, [('Z', 'W'), ('Z', 'Y')])
    with pytest.raises(UnsupportedStructureError):
        dci_embedding_demo(dag, 'Z', 'W', 'Y')
    indirect = CausalDag({'Z': BINARY, 'V': BINARY, 'W': BINARY, 'Y': BINARY}, [('Z', 'V'), ('V', 'W'), ('W', 'Y')])
    with pytest.raises(UnsupportedStructureError):
        dci_embedding_demo(indirect, 'Z', 'W', 'Y')
    narrow = CausalDag({'Z': BINARY, 'W': (0, 1, 2), 'Y': BINARY}, [('Z', 'W'), ('W', 'Y')])
    with pytest.raises(UnsupportedStructureError):
        dci_embedding_demo(narrow, 'Z', 'W', 'Y')
    with pytest.raises(InvalidQueryError):
        dci_embedding_demo(dag, 'Z', 'W', 'Y', p=0)


def test_sample_seeds():
    seeds = sample_seeds(0, 3)
    assert seeds == sample_seeds(0, 3)
    assert len(set(seeds)) == 3
    assert sample_seeds(0, 4)[:3] == seeds
    assert sample_seeds(1, 3) != seeds


def test_config_validation():
    dag = response_line_dag()
    with pytest.raises(InvalidQueryError):
        ExperimentConfig(dag, 'Z', 'Y', n=0)
    with pytest.raises(InvalidQueryError):
        ExperimentConfig(dag, 'Z', 'Y', epsilon=1)
    with pytest.raises(InvalidQueryError):
        ExperimentConfig(dag, 'Z', 'Y', seed=-1)
    with pytest.raises(InvalidQueryError):
        ExperimentConfig(dag, 'Z', 'Y', codomain_size=0)
    with pytest.raises(InvalidQueryError):
        ExperimentConfig(dag, 'Z', 'W')
    echo = ExperimentConfig(dag, 'Z', 'Y', n=7, seed=2).echo()
    assert echo['edges'] == ['Z -> Y']
    assert echo['epsilon'] == '1/10'
    assert echo['variables'] == {'Y': [0, 1], 'Z': [0, 1]}


def test_report_documents():
    config = ExperimentConfig(
        response_line_dag(), 'Z', 'Y', n=3, seed=1, observed=response_line_observation(HALF, HALF)
    )
    report = measure_zero_as_ci(config)
    document = report.to_document()
    assert list(document) == ['experiment', 'config', 'aggregates', 'notes', 'records']
    assert document['aggregates']['n'] == 3
    assert isinstance(document['records'][0]['degree'], str)
    rows = report.csv_rows()
    assert len(rows) == 3
    assert tuple(rows[0]) == CSV_HEADER
    assert rows[0]['gap'] == ''
    assert rows[0]['fci'] == ''
    assert rows[0]['seed'] == sample_seeds(1, 3)[0]
