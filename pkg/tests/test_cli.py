import os

import pytest
import yaml

from cfinvar.cli import build_parser, main, run_command
from cfinvar.config import DEFAULT_CONFIG, get_config
from cfinvar.io import load_yaml, read_text


@pytest.fixture
def path(data_dir):
    return lambda name: os.path.join(data_dir, name)


def test_validate(path):
    code, report = run_command(['validate', '--model', path('xor.scm.yaml')])
    assert code == 0
    assert report == {
        'command': 'validate',
        'valid': True,
        'variables': ['Y', 'Z'],
        'edges': ['Z -> Y'],
        'warnings': [],
    }
    code, report = run_command(['validate', '--graph', path('chain.dag.yaml')])
    assert code == 0
    assert report['edges'] == ['X -> Y', 'Z -> X']


def test_validate_reports_violations(tmp_path, path):
    broken = read_text(path('xor.scm.yaml')).replace('      - Z=1, noise=1 -> 0\n', '')
    model = tmp_path / 'broken.scm.yaml'
    model.write_text(broken)
    code, report = run_command(['validate', '--model', str(model)])
    assert code == 1
    assert report['error'] == 'ValidationError'
    assert 'mechanism of Y is missing row (Z=1, noise=1)' in report['violations']


def test_parse_error_report(tmp_path):
    model = tmp_path / 'bad.scm.yaml'
    text = 'variables:\n  Z: [0, 1]\nmechanisms:\n  Z:\n    noise: [1]\n    rows:\n      - noise=0 -> 2\n'
    model.write_text(text)
    code, report = run_command(['validate', '--model', str(model)])
    assert code == 1
    assert report['error'] == 'ParseError'
    assert report['line'] == 7
    assert report['position'] == text.index('noise=0 -> 2')


def test_missing_file():
    code, report = run_command(['validate', '--model', 'no-such-file.yaml'])
    assert code == 1
    assert report['error'] == 'FileNotFoundError'


def test_analyze(path):
    code, report = run_command(
        ['analyze', '--model', path('xor.scm.yaml'), '--target', 'Y', '--intervene', 'Z', '--given', '', '--given', 'Y']
    )
    assert code == 0
    assert report['as_ci_degree'] == '0/1'
    assert report['as_ci'] is False
    assert report['as_ci_pairs'] == {'0,1': '0/1'}
    assert report['as_ci_witness']['values'] == [0, 1]
    assert report['dci']['{}'] == {'gap': '0/1', 'holds': True, 'witness': None, 'skipped_cells': 0}
    assert report['dci']['{Y}']['gap'] == '1/1'
    assert 'fci' not in report


def test_analyze_function(path):
    code, report = run_command(
        [
            'analyze',
            '--model',
            path('mod2.scm.yaml'),
            '--target',
            'Y',
            '--intervene',
            'Z',
            '--function',
            path('parity.fn.yaml'),
        ]
    )
    assert code == 0
    assert report['as_ci_degree'] == '1/1'
    assert report['fci'] == {'inputs': ['X'], 'degree': '1/1', 'holds': True, 'witness': None}


def test_analyze_unknown_variable(path):
    code, report = run_command(['analyze', '--model', path('xor.scm.yaml'), '--target', 'Q', '--intervene', 'Z'])
    assert code == 1
    assert report['error'] == 'InvalidQueryError'


def test_adjust(path):
    code, report = run_command(['adjust', '--graph', path('chain.dag.yaml'), '--exposure', 'Z', '--outcome', 'Y'])
    assert code == 0
    assert report['valid_sets'] == ['{}']
    assert report['reading'] == 'exclude-exposure'
    assert report['reading_discrepancies'] == []


def test_adjust_function_inputs(path):
    code, report = run_command(
        ['adjust', '--graph', path('zy.dag.yaml'), '--exposure', 'Z', '--outcome', 'Y', '--function-inputs', 'Y']
    )
    assert code == 0
    assert report['independences'] == ['Yhat _||_ Z | {}']


def test_bounds(path):
    argv = ['bounds', '--graph', path('zy.dag.yaml'), '--obs', path('half.obs.yaml'), '--target', 'Y']
    code, report = run_command([*argv, '--intervene', 'Z'])
    assert code == 0
    assert report['degree_min'] == '0/1'
    assert report['degree_max'] == '1/1'
    assert report['response_tuples'] == 4
    assert report['affine_dimension'] == 1
    assert report['as_ci_possible'] is True
    assert report['as_ci_forced'] is False
    assert report['argmax'] == {'00': '1/2', '11': '1/2'}
    assert report['argmin'] == {'10': '1/2', '01': '1/2'}

    query = ['--query-value', '0', '--query-level', '1', '--factual-level', '0']
    code, report = run_command([*argv, '--intervene', 'Z', *query])
    assert code == 0
    assert report['query']['min'] == '1/2'
    assert report['query']['max'] == '1/2'
    assert report['query']['event'] == 'Y(Z=1) = 0'

    code, report = run_command([*argv, '--intervene', 'Z', '--query-value', '0'])
    assert code == 1


def test_bounds_needs_root(tmp_path, path):
    obs = tmp_path / 'chain.obs.yaml'
    obs.write_text(
        'variables:\n  X: [0, 1]\n  Y: [0, 1]\n  Z: [0, 1]\nrows:\n'
        '  - X=0, Y=0, Z=0 -> 1/2\n  - X=1, Y=1, Z=1 -> 1/2\n'
    )
    argv = ['bounds', '--graph', path('chain.dag.yaml'), '--obs', str(obs), '--target', 'Y', '--intervene', 'X']
    code, report = run_command(argv)
    assert code == 2
    assert report['error'] == 'UnsupportedStructureError'
    assert report['exit_code'] == 2


def test_resource_limit_from_config(tmp_path, path):
    config = tmp_path / 'config.yaml'
    config.write_text('response_limit: 1\n')
    argv = ['bounds', '--graph', path('zy.dag.yaml'), '--obs', path('half.obs.yaml'), '--target', 'Y']
    code, report = run_command([*argv, '--intervene', 'Z', '--config', str(config)])
    assert code == 3
    assert report['error'] == 'ResourceLimitError'
    # the file applies to that command only
    assert get_config().response_limit == DEFAULT_CONFIG.response_limit
    code, report = run_command([*argv, '--intervene', 'Z'])
    assert code == 0
    assert report['degree_max'] == '1/1'


def test_enumerate_fci(path):
    code, report = run_command(['enumerate-fci', '--model', path('mod2.scm.yaml'), '--intervene', 'Z', '--inputs', 'X'])
    assert code == 0
    assert report['scanned'] == 16
    assert report['count'] == 4
    assert report['nd_inputs'] == []
    assert report['nd_function_count'] == 2
    assert report['equals_nd_class'] is False
    assert report['functions'][1] == ['X=0 -> 0', 'X=1 -> 1', 'X=2 -> 0', 'X=3 -> 1']


def test_argument_errors(path):
    code, report = run_command(['experiment', 'measure-zero', '--graph', path('zy.dag.yaml')])
    assert code == 1
    assert report['error'] == 'InvalidQueryError'
    code, _ = run_command(['frobnicate'])
    assert code == 1
    code, _ = run_command(['experiment', 'unbounded-degree', '--p', 'half'])
    assert code == 1


def test_measure_zero_experiment(tmp_path, path):
    csv = str(tmp_path / 'samples.csv')
    argv = ['experiment', 'measure-zero', '--graph', path('zy.dag.yaml'), '--target', 'Y', '--intervene', 'Z']
    argv += ['--obs', path('half.obs.yaml'), '--n', '40', '--seed', '3', '--csv', csv]
    code, report = run_command(argv)
    assert code == 0
    assert report['experiment'] == 'measure-zero'
    assert report['aggregates']['n'] == 40
    assert report['config']['seed'] == 3
    lines = read_text(csv).splitlines()
    assert lines[0] == 'sample,seed,degree,gap,fci'
    assert len(lines) == 41
    assert run_command(argv) == (code, report)


def test_unbounded_degree_experiment(tmp_path):
    csv = str(tmp_path / 'grid.csv')
    code, report = run_command(['experiment', 'unbounded-degree', '--p', '1/2', '--grid', '3', '--csv', csv])
    assert code == 0
    assert report['aggregates']['endpoints_attained'] is True
    assert [record['degree'] for record in report['records']] == ['0/1', '1/2', '1/1']
    assert read_text(csv).splitlines() == ['sample,lambda,degree', '0,0/1,0/1', '1,1/4,1/2', '2,1/2,1/1']


def test_dci_embedding_experiment(path):
    argv = ['experiment', 'dci-embedding', '--graph', path('zwy.dag.yaml'), '--target', 'Y', '--intervene', 'Z']
    code, report = run_command([*argv, '--mediator', 'W', '--grid', '3'])
    assert code == 0
    assert report['aggregates']['reduction_holds'] is True
    assert report['aggregates']['endpoints_attained'] is True


def test_main_writes_yaml(capsys, path):
    argv = ['analyze', '--model', path('xor.scm.yaml'), '--target', 'Y', '--intervene', 'Z']
    assert main(argv) == 0
    printed = yaml.safe_load(capsys.readouterr().out)
    assert printed == run_command(argv)[1]


def test_main_output_file(tmp_path, capsys, path):
    output = str(tmp_path / 'report.yaml')
    argv = ['bounds', '--graph', path('zy.dag.yaml'), '--obs', path('half.obs.yaml'), '--target', 'Y']
    argv += ['--intervene', 'Z', '--output', output]
    assert main(argv) == 0
    assert capsys.readouterr().out == ''
    assert load_yaml(output)['degree_max'] == '1/1'


def test_main_error_exit_code(capsys, path):
    assert main(['analyze', '--model', path('xor.scm.yaml'), '--target', 'Y', '--intervene', 'Y']) == 1
    assert 'InvalidQueryError' in capsys.readouterr().out


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args(['--version'])
    assert info.value.code == 0
    assert capsys.readouterr().out.startswith('cfinvar ')
