import logging
from fractions import Fraction

from cfinvar.io import dump_csv, dump_yaml, dump_yaml_str, load_yaml, read_text
from cfinvar.logger import get_logger
from cfinvar.timer import Timer


def test_yaml_roundtrip(tmp_path):
    path = str(tmp_path / 'x.yaml')
    obj = {'b': 1, 'a': ['1/2', '0/1']}
    dump_yaml(obj, path)
    assert load_yaml(path) == obj
    assert read_text(path) == dump_yaml_str(obj)
    # insertion order is kept
    assert read_text(path).startswith('b: 1')


def test_dump_csv(tmp_path):
    path = str(tmp_path / 'x.csv')
    rows = [{'sample': 0, 'degree': '1/2'}, {'sample': 1, 'degree': '1/1', 'other': 'x'}]
    dump_csv(rows, path, ('sample', 'degree'))
    assert read_text(path) == 'sample,degree\n0,1/2\n1,1/1\n'


def test_dump_csv_header_only(tmp_path):
    path = str(tmp_path / 'x.csv')
    dump_csv([], path, ('sample', 'seed'))
    assert read_text(path) == 'sample,seed\n'


def test_get_logger(tmp_path):
    filename = str(tmp_path / 'log.txt')
    logger = get_logger('cfinvar-test-logger', filename=filename, level=logging.DEBUG)
    assert get_logger('cfinvar-test-logger') is logger
    assert len(logger.handlers) == 2
    logger.debug('value %s', Fraction(1, 2))
    for handler in logger.handlers:
        handler.flush()
    assert 'value 1/2' in read_text(filename)
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


def test_timer():
    timer = Timer()
    assert timer.total == 0.0
    with timer:
        pass
    lap = timer.start().stop()
    assert timer.laps == 2
    assert lap >= 0.0
    assert timer.total >= lap
    assert timer.average == timer.total / 2
    timer.reset()
    assert (timer.laps, timer.total) == (0, 0.0)
