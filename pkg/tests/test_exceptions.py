from cfinvar.exceptions import (
    CfinvarException,
    CycleError,
    InfeasibleError,
    InvalidQueryError,
    ParseError,
    ResourceLimitError,
    UnsupportedStructureError,
    ValidationError,
    ZeroProbabilityError,
)


def test_exit_codes():
    assert ParseError('x').exit_code == 1
    assert ValidationError(['x']).exit_code == 1
    assert InvalidQueryError('x').exit_code == 1
    assert ZeroProbabilityError('x').exit_code == 1
    assert CycleError(['A', 'B']).exit_code == 1
    assert InfeasibleError('x').exit_code == 1
    assert UnsupportedStructureError('x').exit_code == 2
    assert ResourceLimitError('x', 10, 5).exit_code == 3


def test_hierarchy():
    assert issubclass(ZeroProbabilityError, InvalidQueryError)
    for cls in (ParseError, ValidationError, CycleError, UnsupportedStructureError, ResourceLimitError):
        assert issubclass(cls, CfinvarException)


def test_messages():
    error = ParseError('bad row', line=3, position=17)
    assert (error.line, error.position) == (3, 17)
    assert str(error) == 'bad row (line 3, position 17)'
    assert str(ParseError('bad')) == 'bad'
    assert ValidationError(['a', 'b']).violations == ('a', 'b')
    assert str(CycleError(['A', 'B'])) == 'graph has a cycle: A -> B -> A'
    limit = ResourceLimitError('functions', 16, 3)
    assert (limit.size, limit.limit) == (16, 3)
    assert '16' in str(limit)
