"""Replay cache shared by the KDC and base stations."""

from __future__ import annotations

from collections import OrderedDict
from typing import Hashable

from .errors import ReplayDetected


class ReplayCache:
    """Remembers (client, client_addr, timestamp) triples inside the skew window.

    Entries whose timestamp is older than ``now - skew`` can never be accepted
    again anyway (the skew check rejects them first), so they are evicted.
    When the cache is full of live entries the oldest one is dropped.
    """

    def __init__(self, skew: int, capacity: int = 65536) -> None:
        self.skew = skew
        self.capacity = capacity
        self._seen: OrderedDict[tuple[Hashable, int, int], int] = OrderedDict()

    def __len__(self) -> int:
        return len(self._seen)

    def __contains__(self, key: tuple[Hashable, int, int]) -> bool:
        return key in self._seen

    def evict(self, now: int) -> None:
        horizon = now - self.skew
        stale = [k for k, ts in self._seen.items() if ts < horizon]
        for k in stale:
            del self._seen[k]

    def check_and_insert(self, client: Hashable, client_addr: int, timestamp: int,
                         now: int) -> None:
        self.evict(now)
        key = (client, client_addr, timestamp)
        if key in self._seen:
            raise ReplayDetected(f"authenticator {key!r} already seen")
        self._seen[key] = timestamp
        while len(self._seen) > self.capacity:
            self._seen.popitem(last=False)
