"""Pure python utilities."""

from __future__ import annotations

import itertools
import re
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence

__all__ = ['dynamic_default', 'format_rational', 'parse_rational', 'plain', 'render_set', 'subsets']

RATIONAL_RE = re.compile(r'^(-?\d+)(?:/(\d+))?$')


def dynamic_default(value: Any | None, default_value: Any) -> Any:
    """Dynamic default value.

    Args:
        value (Any | None): A value or None.
        default_value (Any): The default value used when value is None.

    Returns:
        Any: The selected value depending on the arguments.

    """
    return value if value is not None else default_value


def format_rational(value: Fraction | int) -> str:
    """Render a rational as "num/den", always with an explicit denominator.

    Args:
        value (Fraction | int): The value.

    Returns:
        str: e.g. '0/1', '1/1', '3/10'.

    """
    value = Fraction(value)
    return f'{value.numerator}/{value.denominator}'


def parse_rational(text: str | int) -> Fraction:
    """Parse "num/den" (or an integer) without whitespace.

    Args:
        text (str | int): The text to parse.

    Raises:
        ValueError: malformed text or zero denominator.

    Returns:
        Fraction: the parsed value in lowest terms.

    """
    if isinstance(text, bool):
        raise ValueError(f'not a rational: {text!r}')
    if isinstance(text, int):
        return Fraction(text)
    match = RATIONAL_RE.match(str(text))
    if match is None:
        raise ValueError(f'not a rational: {text!r}')
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise ValueError(f'zero denominator: {text!r}')
    return Fraction(int(match.group(1)), denominator)


def subsets(items: Iterable, max_size: int | None = None) -> Iterator[tuple]:
    """Yield subsets in size-then-lexicographic order.

    Args:
        items (Iterable): Items; sorted before enumeration.
        max_size (int, optional): Largest subset size. Default: None (all sizes).

    Yields:
        tuple: one subset.

    """
    pool = sorted(items)
    max_size = len(pool) if max_size is None else min(max_size, len(pool))
    for size in range(max_size + 1):
        yield from itertools.combinations(pool, size)


def render_set(items: Sequence[str] | Iterable[str]) -> str:
    """Render a variable set as "{A, B}" in sorted order."""
    return '{' + ', '.join(sorted(items)) + '}'


def plain(value: Any) -> Any:
    """Convert a value to plain YAML/CSV data with rationals rendered as "num/den".

    Args:
        value (Any): Fractions, sets, mappings, sequences and scalars, nested.

    Returns:
        Any: str, int, bool, None, list and dict values only.

    """
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (frozenset, set)):
        return render_set(str(item) for item in value)
    if isinstance(value, dict):
        return {str(key): plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(item) for item in value]
    return value
