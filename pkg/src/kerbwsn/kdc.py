"""Key distribution center: Authentication Server plus Ticket Granting Server."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .crypto import SecretKey, derive_key, random_nonce, random_session_key, seal
from .errors import (AlreadyRegistered, IntegrityFailure, InvalidInput, StaleAuthenticator,
                     UnknownPrincipal, UnknownRealm, UnknownService, WrongType)
from .messages import (TAG_AS_REQUEST, TAG_TGS_REQUEST, AsReply, AsRequest, Principal,
                       ReplyPart, Ticket, TgsReply, TgsRequest, decode, encode, peek_tag)
from .replay import ReplayCache
from .verify import verify_credentials

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class KdcConfig:
    tgt_lifetime: int = 480
    service_ticket_lifetime: int = 100
    max_clock_skew: int = 5

    def __post_init__(self) -> None:
        for name in ("tgt_lifetime", "service_ticket_lifetime", "max_clock_skew"):
            if getattr(self, name) <= 0:
                raise InvalidInput(f"{name} must be positive")


@dataclass
class PrincipalDb:
    """The centralized database. Stores derived keys only, never passwords."""

    realm: str
    tgs_key: SecretKey
    replay_cache: ReplayCache
    users: dict[Principal, SecretKey] = field(default_factory=dict)
    services: dict[Principal, SecretKey] = field(default_factory=dict)
    remote_realms: dict[str, SecretKey] = field(default_factory=dict)

    def _check_local(self, principal: Principal) -> None:
        if principal.realm != self.realm:
            raise InvalidInput(f"{principal} is not in realm {self.realm}")

    def register_user(self, user: Principal, password: str) -> None:
        self._check_local(user)
        if user in self.users or user in self.services:
            raise AlreadyRegistered(str(user))
        self.users[user] = derive_key(password, user.name, user.realm)

    def register_service(self, service: Principal, key: SecretKey) -> None:
        self._check_local(service)
        if service.is_tgs:
            raise InvalidInput("the TGS principal is reserved")
        if service in self.services or service in self.users:
            raise AlreadyRegistered(str(service))
        self.services[service] = key

    def register_remote_realm(self, realm: str, inter_realm_key: SecretKey) -> None:
        if realm == self.realm:
            raise InvalidInput("cannot register the local realm as remote")
        if realm in self.remote_realms:
            raise AlreadyRegistered(realm)
        self.remote_realms[realm] = inter_realm_key

    def dump(self) -> bytes:
        """Serialized database contents, as an operator backup would hold them."""
        doc = {
            "realm": self.realm,
            "tgs_key": self.tgs_key.bytes.hex(),
            "users": {str(p): k.bytes.hex() for p, k in sorted(self.users.items())},
            "services": {str(p): k.bytes.hex() for p, k in sorted(self.services.items())},
            "remote_realms": {r: k.bytes.hex() for r, k in sorted(self.remote_realms.items())},
        }
        return json.dumps(doc, sort_keys=True).encode()


class Kdc:
    """One realm's KDC. Callers must serialize access to an instance."""

    def __init__(self, realm: str, rng: np.random.Generator,
                 config: KdcConfig | None = None) -> None:
        self.config = config or KdcConfig()
        self.rng = rng
        self.principal = Principal.tgs(realm)
        self.db = PrincipalDb(realm, random_session_key(rng),
                              ReplayCache(self.config.max_clock_skew))
        self.as_count = 0
        self.tgs_count = 0

    @property
    def realm(self) -> str:
        return self.db.realm

    def register_user(self, user: Principal, password: str) -> None:
        self.db.register_user(user, password)

    def register_service(self, service: Principal, key: SecretKey) -> None:
        self.db.register_service(service, key)

    def register_remote_realm(self, realm: str, inter_realm_key: SecretKey) -> None:
        self.db.register_remote_realm(realm, inter_realm_key)

    def _seal_record(self, record, key: SecretKey):
        return seal(encode(record), key, random_nonce(self.rng))

    def _issue(self, client: Principal, client_addr: int, service: Principal,
               lifetime: int, target_key: SecretKey, reply_key: SecretKey, now: int):
        session_key = random_session_key(self.rng)
        ticket = Ticket(client, client_addr, service, session_key, now, lifetime)
        sealed_ticket = self._seal_record(ticket, target_key)
        part = ReplyPart(session_key, sealed_ticket, service, now, lifetime)
        return self._seal_record(part, reply_key)

    def as_exchange(self, req: AsRequest, source_addr: int, now: int) -> AsReply:
        """Issue a TGT sealed for the user's password-derived key.

        No password check happens here: a caller without the password gets a
        reply it cannot open.
        """
        self.as_count += 1
        user_key = self.db.users.get(req.user)
        if user_key is None:
            raise UnknownPrincipal(str(req.user))
        if req.tgs != self.principal:
            raise UnknownService(str(req.tgs))
        if abs(req.requested_at - now) > self.config.max_clock_skew:
            raise StaleAuthenticator(f"AS request time {req.requested_at}, now {now}")
        self.db.replay_cache.check_and_insert(("AS", req.user), source_addr,
                                              req.requested_at, now)
        sealed = self._issue(req.user, source_addr, self.principal,
                             self.config.tgt_lifetime, self.db.tgs_key, user_key, now)
        logger.debug("AS issued TGT for %s at %d", req.user, now)
        return AsReply(sealed)

    def _tgt_key(self, user: Principal) -> SecretKey:
        if user.realm == self.realm:
            return self.db.tgs_key
        key = self.db.remote_realms.get(user.realm)
        if key is None:
            raise UnknownRealm(user.realm)
        return key

    def _target(self, user: Principal, service: Principal) -> tuple[Principal, SecretKey]:
        if service.realm == self.realm:
            key = self.db.services.get(service)
            if key is None:
                raise UnknownService(str(service))
            return service, key
        # only direct realm pairs; a foreign user cannot transit onwards
        key = self.db.remote_realms.get(service.realm)
        if key is None or user.realm != self.realm:
            raise UnknownRealm(service.realm)
        return Principal.tgs(service.realm), key

    def tgs_exchange(self, req: TgsRequest, source_addr: int, now: int) -> TgsReply:
        self.tgs_count += 1
        tgt, auth = verify_credentials(req.tgt, req.authenticator, self._tgt_key(req.user),
                                       req.user, source_addr, now,
                                       self.config.max_clock_skew)
        if tgt.service != self.principal:
            raise IntegrityFailure(f"ticket for {tgt.service} presented to {self.principal}")
        target, target_key = self._target(req.user, req.service)
        # scoped by service so one client may ask for several tickets per tick
        self.db.replay_cache.check_and_insert((auth.client, req.service), auth.client_addr,
                                              auth.timestamp, now)
        sealed = self._issue(tgt.client, tgt.client_addr, target,
                             self.config.service_ticket_lifetime, target_key,
                             tgt.session_key, now)
        logger.debug("TGS %s issued ticket for %s -> %s at %d",
                     self.realm, tgt.client, target, now)
        return TgsReply(sealed)

    def handle(self, payload: bytes, source_addr: int, now: int) -> bytes:
        """Network endpoint: dispatch on the record tag."""
        tag = peek_tag(payload)
        if tag == TAG_AS_REQUEST:
            return encode(self.as_exchange(decode(payload, TAG_AS_REQUEST), source_addr, now))
        if tag == TAG_TGS_REQUEST:
            return encode(self.tgs_exchange(decode(payload, TAG_TGS_REQUEST), source_addr, now))
        raise WrongType(f"KDC cannot handle tag 0x{tag:02x}")
