"""Cooperative deadline tokens polled by long-running loops."""

from __future__ import annotations

import threading
import time
from typing import Optional

from .errors import DeadlineExceeded


class Deadline:
    """Wall-clock limit that loops check with :meth:`check`.

    ``Deadline(None)`` never expires.  A token can also be cancelled from
    another thread.
    """

    __slots__ = ("limit", "_end", "_cancel")

    def __init__(self, seconds: Optional[float] = None):
        self.limit = seconds
        self._end = None if seconds is None else time.monotonic() + seconds
        self._cancel = threading.Event()

    @classmethod
    def never(cls) -> "Deadline":
        return cls(None)

    def cancel(self) -> None:
        self._cancel.set()

    def remaining(self) -> Optional[float]:
        if self._end is None:
            return None
        return max(0.0, self._end - time.monotonic())

    def expired(self) -> bool:
        if self._cancel.is_set():
            return True
        return self._end is not None and time.monotonic() >= self._end

    def check(self, where: str = "") -> None:
        if self.expired():
            raise DeadlineExceeded(f"deadline exceeded{' in ' + where if where else ''}")

    def sub(self, seconds: Optional[float]) -> "Deadline":
        """A child token expiring at the earlier of both limits."""
        if seconds is None:
            return self
        child = Deadline(seconds)
        if self._end is not None and self._end < child._end:
            child._end = self._end
        child._cancel = self._cancel
        return child


NEVER = Deadline(None)
