from fractions import Fraction

import pytest

from cfinvar.misc import dynamic_default, format_rational, parse_rational, plain, render_set, subsets


def test_dynamic_default():
    assert dynamic_default(None, 3) == 3
    assert dynamic_default(0, 3) == 0


@pytest.mark.parametrize(
    ('value', 'text'), [(Fraction(0), '0/1'), (1, '1/1'), (Fraction(3, 10), '3/10'), (Fraction(-1, 2), '-1/2')]
)
def test_format_rational(value, text):
    assert format_rational(value) == text


def test_parse_rational():
    assert parse_rational('3/6') == Fraction(1, 2)
    assert parse_rational('2') == 2
    assert parse_rational(4) == 4


@pytest.mark.parametrize('text', ['1/0', ' 1/2', '1.5', '1 /2', '', 'a/b'])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_rational_rejects_bool():
    with pytest.raises(ValueError):
        parse_rational(True)


def test_subsets_order():
    assert list(subsets(['b', 'a', 'c'], 2)) == [
        (),
        ('a',),
        ('b',),
        ('c',),
        ('a', 'b'),
        ('a', 'c'),
        ('b', 'c'),
    ]
    assert len(list(subsets('abc'))) == 8


def test_render_set():
    assert render_set(['B', 'A']) == '{A, B}'
    assert render_set([]) == '{}'


def test_plain():
    value = {'a': Fraction(1, 2), 's': frozenset({'Y', 'X'}), 'l': (Fraction(1), 2, None, True), 3: 'x'}
    assert plain(value) == {'a': '1/2', 's': '{X, Y}', 'l': ['1/1', 2, None, True], '3': 'x'}
