"""Configuration."""

from __future__ import annotations

import logging
import os
from contextlib import contextmanager
from typing import Iterator

from cfinvar.easydict import EasyDict
from cfinvar.exceptions import InvalidQueryError
from cfinvar.io import load_yaml

__all__ = ['DEFAULT_CONFIG', 'get_config', 'load_config', 'set_config', 'use_config']

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = EasyDict(
    # largest response-tuple space that is materialized.
    response_limit=10**7,
    # largest function space scanned by functional invariance enumeration.
    function_limit=10**6,
    # resolution of truncated Dirichlet draws.
    noise_bits=52,
    # hit-and-run walk.
    burn_in=20,
    thinning=5,
    # 'exclude-exposure' or 'include-exposure'.
    adjustment_reading='exclude-exposure',
)

ENV_OVERRIDES = {
    'response_limit': 'CFINVAR_RESPONSE_LIMIT',
    'function_limit': 'CFINVAR_FUNCTION_LIMIT',
}

ADJUSTMENT_READINGS = ('exclude-exposure', 'include-exposure')

_config: EasyDict | None = None


def load_config(path: str | None = None) -> EasyDict:
    """Load the configuration.

    Values from a YAML file override the defaults, and environment variables override both.

    Args:
        path (str, optional): YAML file with overrides. Default: None.

    Raises:
        InvalidQueryError: unknown keys or malformed values.

    Returns:
        EasyDict: the configuration.

    """
    config = DEFAULT_CONFIG
    if path is not None:
        overrides = load_yaml(path) or {}
        try:
            config = config.merged(overrides)
        except KeyError as ex:
            raise InvalidQueryError(f'unknown configuration key {ex.args[0]!r} in {path}') from ex

    for key, env in ENV_OVERRIDES.items():
        value = os.environ.get(env)
        if value is None:
            continue
        try:
            config = config.merged({key: int(value)})
        except ValueError as ex:
            raise InvalidQueryError(f'{env} must be an integer, got {value!r}') from ex
        logger.debug('%s overridden by %s=%s', key, env, value)

    if config.adjustment_reading not in ADJUSTMENT_READINGS:
        raise InvalidQueryError(f'adjustment_reading must be one of {ADJUSTMENT_READINGS}')
    for key in ('response_limit', 'function_limit', 'noise_bits', 'thinning'):
        if int(config[key]) < 1:
            raise InvalidQueryError(f'{key} must be positive')
    return config


def get_config() -> EasyDict:
    """Return the process configuration, loading the defaults on first use."""
    global _config  # noqa: PLW0603
    if _config is None:
        _config = load_config()
    return _config


def set_config(config: EasyDict | None) -> None:
    """Install a configuration for the process. None restores lazy default loading."""
    global _config  # noqa: PLW0603
    _config = config


@contextmanager
def use_config(config: EasyDict) -> Iterator[EasyDict]:
    """Install a configuration for the duration of a with block, then restore the previous one.

    Examples:
        ```
        with use_config(load_config('limits.yaml')):
            ci_degree_bounds(dag, observed, 'Y', 'Z')
        ```

    """
    global _config  # noqa: PLW0603
    previous = _config
    _config = config
    try:
        yield config
    finally:
        _config = previous
