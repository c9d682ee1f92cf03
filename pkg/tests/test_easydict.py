import pytest

from cfinvar.easydict import EasyDict


def test_attribute_access():
    d = EasyDict(a=1, nested={'b': 2})
    assert d.a == 1
    assert d.nested.b == 2
    assert isinstance(d.nested, EasyDict)
    d.c = 3
    assert d['c'] == 3
    del d.c
    assert 'c' not in d
    with pytest.raises(AttributeError):
        _ = d.missing


def test_too_many_positional():
    with pytest.raises(TypeError):
        EasyDict({}, {})


def test_merged():
    d = EasyDict(a=1, b=2)
    merged = d.merged({'b': 3})
    assert merged == {'a': 1, 'b': 3}
    assert d.b == 2
    with pytest.raises(KeyError):
        d.merged({'c': 1})
    assert d.merged({'c': 1}, strict=False).c == 1
