"""Atomic read-modify-write access to shared integer lists.

The parallel solvers mutate excess and residual words from several threads
at once and rely on fetch-and-add semantics: no increment may be lost.
CPython offers no lock-free integer RMW, so AtomicIntView serializes the
read-modify-write through one lock.  Plain loads are a single list indexing
operation (atomic under the GIL) and skip the lock.

The lock is never held across algorithm steps, only for the single-word
update, so round/coordinator semantics are exactly those of hardware
fetch-and-add.
"""

from __future__ import annotations

import threading


class AtomicIntView:
    """Fetch-and-add view over a shared list of ints.

    Several views may share one lock (and typically do: one lock per solve
    keeps the invariant simple and the GIL serializes contention anyway).
    """

    __slots__ = ("_data", "_lock")

    def __init__(self, data: list[int], lock: threading.Lock | None = None):
        self._data = data
        self._lock = lock if lock is not None else threading.Lock()

    @property
    def lock(self) -> threading.Lock:
        return self._lock

    def load(self, i: int) -> int:
        return self._data[i]

    def fetch_add(self, i: int, delta: int) -> int:
        """Atomically add delta to word i; returns the previous value."""
        with self._lock:
            old = self._data[i]
            self._data[i] = old + delta
            return old
