"""easy dict."""

# ruff: noqa: D105,D107

from __future__ import annotations

from typing import Any, Mapping


class EasyDict(dict):
    """dict that can access keys like attributes.

    Nested dicts are converted to EasyDict on assignment.
    """

    def __init__(self, *args, **kwargs):
        if len(args) > 1:
            raise TypeError(f'EasyDict expected at most 1 arguments, got {len(args)}')

        init_dict = dict(args[0]) if args else {}
        init_dict.update(kwargs)

        for key, value in init_dict.items():
            self.__setattr__(key, value)

    def __getattr__(self, name: str) -> Any:
        try:
            return self[name]
        except KeyError:
            raise AttributeError(name)  # noqa: B904

    def __setattr__(self, name: str, value: Any) -> None:
        if isinstance(value, dict) and not isinstance(value, type(self)):
            value = type(self)(value)
        self[name] = value

    def __delattr__(self, name: str) -> None:
        del self[name]

    def merged(self, other: Mapping[str, Any], strict: bool = True) -> 'EasyDict':
        """Return a copy updated with `other`.

        Args:
            other (Mapping[str, Any]): values to override.
            strict (bool, optional): raise KeyError for keys that are not already present. Default: True.

        Returns:
            EasyDict: the merged copy.

        """
        result = type(self)(self)
        for key, value in other.items():
            if strict and key not in self:
                raise KeyError(key)
            result.__setattr__(key, value)
        return result
