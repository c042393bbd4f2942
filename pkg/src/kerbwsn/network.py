"""In-process message delivery with a full transcript.

Endpoints are byte-in/byte-out handlers keyed by name. Everything that
crosses the simulated network is recorded, which is what lets the threat
harness eavesdrop and replay verbatim, and lets tests check that secrets
never travel in the clear.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import kind

logger = logging.getLogger(__name__)

Handler = Callable[[bytes, int, int], bytes]


def kdc_endpoint(realm: str) -> str:
    return f"kdc:{realm}"


def bs_endpoint(service) -> str:
    return f"bs:{service.name}@{service.realm}"


@dataclass(frozen=True)
class Message:
    tick: int
    src_addr: int
    dst: str
    payload: bytes
    reply: Optional[bytes]
    error: Optional[str]


class Network:
    def __init__(self) -> None:
        self._endpoints: dict[str, Handler] = {}
        self.transcript: list[Message] = []

    def attach(self, name: str, handler: Handler) -> None:
        if name in self._endpoints:
            raise ValueError(f"endpoint {name!r} already attached")
        self._endpoints[name] = handler

    def endpoints(self) -> list[str]:
        return sorted(self._endpoints)

    def send(self, src_addr: int, dst: str, payload: bytes, now: int) -> bytes:
        """Deliver ``payload`` to ``dst`` claiming source ``src_addr``.

        The source address is whatever the sender says it is; nothing stops
        an attacker from spoofing it.
        """
        handler = self._endpoints[dst]
        try:
            reply = handler(payload, src_addr, now)
        except Exception as exc:
            self.transcript.append(Message(now, src_addr, dst, payload, None, kind(exc)))
            logger.debug("t=%d %d -> %s rejected: %s", now, src_addr, dst, kind(exc))
            raise
        self.transcript.append(Message(now, src_addr, dst, payload, reply, None))
        return reply

    def captured(self, dst: Optional[str] = None, tag: Optional[int] = None) -> list[Message]:
        return [m for m in self.transcript
                if (dst is None or m.dst == dst) and (tag is None or m.payload[:1] == bytes([tag]))]
