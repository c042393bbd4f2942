"""User-side agent: login, ticket caching and base-station access."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .crypto import SealedBlob, SecretKey, derive_key, open_blob, random_nonce, seal
from .errors import DecodeError, ExpiredTgt, IntegrityFailure, NoTgt, WrongPassword
from .messages import (TAG_AS_REPLY, TAG_REPLY_PART, TAG_SENSOR_RESPONSE, TAG_TGS_REPLY,
                       ApRequest, AsRequest, Authenticator, Principal, ReplyPart,
                       SensorQuery, SensorResponse, TgsRequest, decode, encode)
from .network import Network, bs_endpoint, kdc_endpoint

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CachedTicket:
    ticket: SealedBlob
    session_key: SecretKey
    service: Principal
    issued_at: int
    lifetime: int

    def valid_at(self, now: int) -> bool:
        return self.issued_at <= now <= self.issued_at + self.lifetime

    @classmethod
    def from_part(cls, part: ReplyPart) -> CachedTicket:
        return cls(part.ticket, part.session_key, part.service, part.issued_at, part.lifetime)


def _open_reply(blob: SealedBlob, key: SecretKey) -> ReplyPart:
    plaintext = open_blob(blob, key)
    try:
        return decode(plaintext, TAG_REPLY_PART)
    except DecodeError as exc:
        raise IntegrityFailure("reply did not contain a reply part") from exc


@dataclass
class ClientSession:
    user: Principal
    addr: int
    user_key: SecretKey
    net: Network
    rng: np.random.Generator
    tgt: Optional[CachedTicket] = None
    service_tickets: dict[Principal, CachedTicket] = field(default_factory=dict)
    clock_offset: int = 0
    as_exchanges: int = 0
    tgs_exchanges: int = 0

    def local_time(self, now: int) -> int:
        return max(0, now + self.clock_offset)

    def make_authenticator(self, session_key: SecretKey, now: int) -> SealedBlob:
        auth = Authenticator(self.user, self.addr, self.local_time(now))
        return seal(encode(auth), session_key, random_nonce(self.rng))

    def _tgs_exchange(self, realm: str, tgt: CachedTicket, service: Principal,
                      now: int) -> CachedTicket:
        req = TgsRequest(self.user, service, tgt.ticket,
                         self.make_authenticator(tgt.session_key, now))
        self.tgs_exchanges += 1
        reply = decode(self.net.send(self.addr, kdc_endpoint(realm), encode(req), now),
                       TAG_TGS_REPLY)
        return CachedTicket.from_part(_open_reply(reply.sealed_for_client, tgt.session_key))

    def _home_tgt(self, now: int) -> CachedTicket:
        if self.tgt is None:
            raise NoTgt(str(self.user))
        if not self.tgt.valid_at(now):
            raise ExpiredTgt(f"TGT for {self.user} expired at "
                             f"{self.tgt.issued_at + self.tgt.lifetime}")
        return self.tgt

    def _cached(self, principal: Principal, now: int) -> Optional[CachedTicket]:
        entry = self.service_tickets.get(principal)
        if entry is not None and entry.valid_at(now):
            return entry
        return None

    def obtain_service_ticket(self, service: Principal, now: int) -> CachedTicket:
        """Return a usable ticket for ``service``, fetching one only when needed.

        A service in another realm is reached through a cross-realm TGT from
        the home TGS, which is cached like any other ticket.
        """
        entry = self._cached(service, now)
        if entry is not None:
            return entry
        tgt = self._home_tgt(now)
        if service.realm != self.user.realm:
            remote_tgs = Principal.tgs(service.realm)
            cross = self._cached(remote_tgs, now)
            if cross is None:
                cross = self._tgs_exchange(self.user.realm, tgt, service, now)
                self.service_tickets[remote_tgs] = cross
            entry = self._tgs_exchange(service.realm, cross, service, now)
        else:
            entry = self._tgs_exchange(self.user.realm, tgt, service, now)
        self.service_tickets[service] = entry
        return entry

    def build_ap_request(self, service: Principal, query: SensorQuery, now: int) -> ApRequest:
        entry = self.obtain_service_ticket(service, now)
        return ApRequest(self.user, entry.ticket,
                         self.make_authenticator(entry.session_key, now), query)

    def access_base_station(self, service: Principal, query: SensorQuery,
                            now: int) -> SensorResponse:
        req = self.build_ap_request(service, query, now)
        reply = self.net.send(self.addr, bs_endpoint(service), encode(req), now)
        return decode(reply, TAG_SENSOR_RESPONSE)


def login(user: Principal, password: str, addr: int, net: Network, now: int,
          rng: np.random.Generator, clock_offset: int = 0) -> ClientSession:
    """AS exchange; the password is used only locally to derive the user key."""
    session = ClientSession(user, addr, derive_key(password, user.name, user.realm),
                            net, rng, clock_offset=clock_offset)
    req = AsRequest(user, Principal.tgs(user.realm), session.local_time(now))
    session.as_exchanges += 1
    reply = decode(net.send(addr, kdc_endpoint(user.realm), encode(req), now), TAG_AS_REPLY)
    try:
        part = _open_reply(reply.sealed_for_client, session.user_key)
    except IntegrityFailure as exc:
        raise WrongPassword(str(user)) from exc
    session.tgt = CachedTicket.from_part(part)
    logger.debug("%s logged in at %d", user, now)
    return session
