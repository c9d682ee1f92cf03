"""Timer."""

from __future__ import annotations

import time

__all__ = ['Timer']


class Timer:
    """Wall-clock timer for experiment runs; usable as a context manager.

    Each `stop` adds the running interval to `total` and counts one lap.
    """

    def __init__(self) -> None:  # noqa: D107
        self.reset()

    @property
    def total(self) -> float:
        """Total seconds over all laps."""
        return self._total + (self._elapsed() if self._running else 0.0)

    @property
    def laps(self) -> int:
        """Number of finished laps."""
        return self._laps

    @property
    def average(self) -> float:
        """Average seconds per lap."""
        return self.total / max(self._laps, 1)

    def reset(self) -> None:
        """Reset variables."""
        self._t_start = None
        self._running = False
        self._total = 0.0
        self._laps = 0

    def start(self) -> 'Timer':
        """Start timer."""
        self._t_start = time.perf_counter()
        self._running = True
        return self

    def stop(self) -> float:
        """Stop timer and return the seconds of this lap."""
        lap = self._elapsed() if self._running else 0.0
        self._total += lap
        self._laps += 1
        self._t_start = None
        self._running = False
        return lap

    def __enter__(self) -> 'Timer':  # noqa: D105
        return self.start()

    def __exit__(self, *exc_info) -> None:  # noqa: D105
        self.stop()

    def _elapsed(self) -> float:
        return time.perf_counter() - self._t_start
