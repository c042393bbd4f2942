"""Adversary scenarios for the three classic threats and the no-auth baseline.

The attacker sees every message on the simulated network, can inject any
bytes from any claimed address, and knows all formats, but holds no keys.
Each attack runs a list of strategies against its own world and reports
every attempt as data.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .client import ClientSession, login
from .crypto import SealedBlob, derive_key, random_nonce, random_session_key, seal
from .errors import KerbWsnError, kind
from .messages import (TAG_AP_REQUEST, TAG_AS_REPLY, TAG_AS_REQUEST, TAG_SENSOR_RESPONSE,
                       TAG_TGS_REQUEST, ApRequest, Authenticator, Principal, RawQuery,
                       SensorQuery, SensorResponse, Ticket, TgsRequest, decode, encode)
from .network import Network, bs_endpoint, kdc_endpoint
from .scenario import RealmSpec, Scenario, UserSpec
from .world import World, build_world, stream

VICTIM_LOGIN_TICK = 10
PASSWORD_GUESSES = ("password", "123456", "letmein", "wsn", "kerberos")


@dataclass(frozen=True)
class Attempt:
    strategy: str
    served: bool
    rejection: Optional[str]


@dataclass
class AttackOutcome:
    attack_name: str
    auth_enabled: bool
    attempts: list[Attempt] = field(default_factory=list)
    messages_observed: list[tuple[int, int, str, int]] = field(default_factory=list)

    @property
    def served(self) -> bool:
        return any(a.served for a in self.attempts)

    @property
    def rejection(self) -> Optional[str]:
        """First rejection kind seen, or None when anything was served."""
        if self.served:
            return None
        return next((a.rejection for a in self.attempts if a.rejection), None)

    def rejections(self) -> list[str]:
        return sorted({a.rejection for a in self.attempts if a.rejection})


@dataclass
class ThreatWorld:
    world: World
    victim: Principal
    victim_password: str
    victim_addr: int
    victim_session: ClientSession
    attacker: Principal
    attacker_addr: int
    target: Principal
    other_target: Principal
    rng: np.random.Generator

    @property
    def net(self) -> Network:
        return self.world.net

    @property
    def auth_enabled(self) -> bool:
        return self.world.stations[self.target].auth_enabled


def threat_scenario(seed: int) -> Scenario:
    pw = stream(seed, "victim-password").bytes(8).hex()
    realm = RealmSpec("WSN",
                      users=(UserSpec("alice", f"alice-{pw}", 1),
                             UserSpec("mallory", "mallory-has-no-account", 66, False)),
                      services=("bs1", "bs2"))
    return Scenario(seed=seed, realms=(realm,))


def threat_world(seed: int, auth_enabled: bool = True,
                 scenario: Optional[Scenario] = None) -> ThreatWorld:
    """Fresh world in which the victim has just completed one legitimate access."""
    scenario = scenario or threat_scenario(seed)
    world = build_world(scenario, auth_enabled)
    realm = scenario.realms[0]
    victim_spec = next(u for u in realm.users if u.authorized)
    attacker_spec = next((u for u in realm.users if not u.authorized),
                         UserSpec("mallory", "x", max(u.address for u in realm.users) + 1, False))
    victim = Principal(victim_spec.name, realm.name)
    target = Principal(realm.services[0], realm.name)
    other = Principal(realm.services[1 % len(realm.services)], realm.name)
    session = world.login(victim, VICTIM_LOGIN_TICK)
    session.access_base_station(target, SensorQuery(1), VICTIM_LOGIN_TICK)
    return ThreatWorld(world, victim, victim_spec.password, victim_spec.address, session,
                       Principal(attacker_spec.name, realm.name), attacker_spec.address,
                       target, other, stream(seed, "attacker"))


# -- helpers ------------------------------------------------------------------------

def _try(outcome: AttackOutcome, strategy: str, action: Callable[[], object]) -> None:
    try:
        result = action()
    except KerbWsnError as exc:
        outcome.attempts.append(Attempt(strategy, False, kind(exc)))
    else:
        outcome.attempts.append(Attempt(strategy, isinstance(result, SensorResponse), None))


def _observe(tw: ThreatWorld, outcome: AttackOutcome) -> None:
    outcome.messages_observed = [(m.tick, m.src_addr, m.dst, len(m.payload))
                                 for m in tw.net.transcript]


def _captured(tw: ThreatWorld, tag: int, dst: Optional[str] = None) -> bytes:
    msgs = [m for m in tw.net.captured(dst=dst, tag=tag) if m.src_addr == tw.victim_addr]
    return msgs[0].payload


def _send_bs(tw: ThreatWorld, payload: bytes, src: int, now: int,
             service: Optional[Principal] = None) -> SensorResponse:
    reply = tw.net.send(src, bs_endpoint(service or tw.target), payload, now)
    return decode(reply, TAG_SENSOR_RESPONSE)


def _sealed(record, key, rng) -> SealedBlob:
    return seal(encode(record), key, random_nonce(rng))


def _forged_ap(tw: ThreatWorld, ticket_key, addr: int, now: int,
               ticket_blob: Optional[SealedBlob] = None, key_id: Optional[int] = None) -> bytes:
    session_key = random_session_key(tw.rng)
    if ticket_blob is None:
        ticket = Ticket(tw.victim, addr, tw.target, session_key, now, 100)
        ticket_blob = _sealed(ticket, ticket_key, tw.rng)
        if key_id is not None:
            ticket_blob = replace(ticket_blob, key_id=key_id)
    auth = _sealed(Authenticator(tw.victim, addr, now), session_key, tw.rng)
    return encode(ApRequest(tw.victim, ticket_blob, auth, SensorQuery(99)))


def _raw(tw: ThreatWorld, claimed: Principal, query_id: int = 7) -> bytes:
    return encode(RawQuery(claimed, SensorQuery(query_id)))


# -- attacks -------------------------------------------------------------------------

def attack_impersonation(tw: ThreatWorld) -> AttackOutcome:
    """Act as the victim without the victim's password."""
    out = AttackOutcome("impersonation", tw.auth_enabled)
    now = VICTIM_LOGIN_TICK + 1
    captured_ap = decode(_captured(tw, TAG_AP_REQUEST), TAG_AP_REQUEST)
    service_key_id = captured_ap.service_ticket.key_id
    captured_as_reply = next(m.reply for m in tw.net.captured(tag=TAG_AS_REQUEST)
                             if m.reply is not None)

    for i, guess in enumerate(PASSWORD_GUESSES):
        def guess_login(guess=guess, t=now + i):
            session = login(tw.victim, guess, tw.attacker_addr, tw.net, t, tw.rng)
            return session.access_base_station(tw.target, SensorQuery(50 + i), t)
        _try(out, f"guess-password:{guess}", guess_login)
    now += len(PASSWORD_GUESSES)

    def login_as_self():
        session = login(tw.attacker, "anything", tw.attacker_addr, tw.net, now, tw.rng)
        return session.access_base_station(tw.target, SensorQuery(60), now)
    _try(out, "login-unregistered-attacker", login_as_self)

    _try(out, "forged-ticket-random-key", lambda: _send_bs(
        tw, _forged_ap(tw, random_session_key(tw.rng), tw.attacker_addr, now),
        tw.attacker_addr, now))
    _try(out, "forged-ticket-spoofed-key-id", lambda: _send_bs(
        tw, _forged_ap(tw, random_session_key(tw.rng), tw.attacker_addr, now,
                       key_id=service_key_id), tw.attacker_addr, now))
    for guess in PASSWORD_GUESSES[:2]:
        guessed_key = derive_key(guess, tw.target.name, tw.target.realm)
        _try(out, f"forged-ticket-guessed-service-key:{guess}", lambda k=guessed_key: _send_bs(
            tw, _forged_ap(tw, k, tw.victim_addr, now), tw.victim_addr, now))

    def forged_tgt():
        session_key = random_session_key(tw.rng)
        tgt = Ticket(tw.victim, tw.attacker_addr, Principal.tgs(tw.victim.realm),
                     session_key, now, 480)
        req = TgsRequest(tw.victim, tw.target, _sealed(tgt, random_session_key(tw.rng), tw.rng),
                         _sealed(Authenticator(tw.victim, tw.attacker_addr, now),
                                 session_key, tw.rng))
        return tw.net.send(tw.attacker_addr, kdc_endpoint(tw.victim.realm), encode(req), now)
    _try(out, "forged-tgt", forged_tgt)

    _try(out, "stolen-ticket-own-authenticator", lambda: _send_bs(
        tw, _forged_ap(tw, None, tw.victim_addr, now, ticket_blob=captured_ap.service_ticket),
        tw.victim_addr, now))

    as_blob = decode(captured_as_reply, TAG_AS_REPLY).sealed_for_client
    _try(out, "as-reply-as-ticket", lambda: _send_bs(
        tw, _forged_ap(tw, None, tw.victim_addr, now, ticket_blob=as_blob), tw.victim_addr, now))

    _try(out, "raw-query-as-victim", lambda: _send_bs(
        tw, _raw(tw, tw.victim), tw.attacker_addr, now))
    _observe(tw, out)
    return out


def attack_replay(tw: ThreatWorld) -> AttackOutcome:
    """Resend the victim's captured messages verbatim, now and after the skew window."""
    out = AttackOutcome("replay", tw.auth_enabled)
    skew = tw.world.scenario.kdc.max_clock_skew
    kdc = kdc_endpoint(tw.victim.realm)
    as_req = _captured(tw, TAG_AS_REQUEST, kdc)
    tgs_req = _captured(tw, TAG_TGS_REQUEST, kdc)
    ap_req = _captured(tw, TAG_AP_REQUEST)
    src = tw.victim_addr  # spoof the victim's address so only freshness is tested

    for label, now in (("immediate", VICTIM_LOGIN_TICK), ("after-skew", VICTIM_LOGIN_TICK + skew + 1)):
        _try(out, f"as-request:{label}", lambda now=now: tw.net.send(src, kdc, as_req, now))
        _try(out, f"tgs-request:{label}", lambda now=now: tw.net.send(src, kdc, tgs_req, now))
        _try(out, f"ap-request:{label}", lambda now=now: _send_bs(tw, ap_req, src, now))
    _try(out, "ap-request:other-station", lambda: _send_bs(
        tw, ap_req, src, VICTIM_LOGIN_TICK, service=tw.other_target))
    _observe(tw, out)
    return out


def attack_address_spoof(tw: ThreatWorld) -> AttackOutcome:
    """Use the victim's captured ticket from a different (or spoofed) address."""
    out = AttackOutcome("address-spoof", tw.auth_enabled)
    now = VICTIM_LOGIN_TICK
    ap_payload = _captured(tw, TAG_AP_REQUEST)
    ap = decode(ap_payload, TAG_AP_REQUEST)

    _try(out, "stolen-request-attacker-address",
         lambda: _send_bs(tw, ap_payload, tw.attacker_addr, now))
    _try(out, "stolen-ticket-victim-address-forged-authenticator", lambda: _send_bs(
        tw, _forged_ap(tw, None, tw.victim_addr, now, ticket_blob=ap.service_ticket),
        tw.victim_addr, now))
    _try(out, "stolen-ticket-attacker-address-forged-authenticator", lambda: _send_bs(
        tw, _forged_ap(tw, None, tw.attacker_addr, now, ticket_blob=ap.service_ticket),
        tw.attacker_addr, now))
    if tw.auth_enabled:
        sweep = address_sweep(tw, range(0, 128), now + 1, include_session_key=False)
        for addr, (served, rejection) in sweep.items():
            out.attempts.append(Attempt(f"sweep-forged:{addr}", served, rejection))
    else:
        _try(out, "raw-query-spoofed-address", lambda: _send_bs(
            tw, _raw(tw, tw.victim), tw.victim_addr, now))
    _observe(tw, out)
    return out


def address_sweep(tw: ThreatWorld, addresses, now: int,
                  include_session_key: bool = True) -> dict[int, tuple[bool, Optional[str]]]:
    """Present the victim's stolen ticket from every address in ``addresses``.

    Without the session key the authenticator is sealed under a random key.
    With ``include_session_key`` the sweep uses the real session key instead,
    which models the legitimate holder and should serve only from the
    victim's own address.
    """
    entry = tw.victim_session.obtain_service_ticket(tw.target, now)
    results = {}
    for addr in addresses:
        key = entry.session_key if include_session_key else random_session_key(tw.rng)
        auth = _sealed(Authenticator(tw.victim, addr, now), key, tw.rng)
        payload = encode(ApRequest(tw.victim, entry.ticket, auth, SensorQuery(addr)))
        try:
            _send_bs(tw, payload, addr, now)
        except KerbWsnError as exc:
            results[addr] = (False, kind(exc))
        else:
            results[addr] = (True, None)
    return results


def demo_unauthenticated_vulnerability(tw: ThreatWorld) -> AttackOutcome:
    """An unregistered user simply asks the base station for data."""
    out = AttackOutcome("unauthenticated-access", tw.auth_enabled)
    _try(out, "raw-query-unregistered", lambda: _send_bs(
        tw, _raw(tw, tw.attacker), tw.attacker_addr, VICTIM_LOGIN_TICK + 1))
    _observe(tw, out)
    return out


ATTACKS: dict[str, Callable[[ThreatWorld], AttackOutcome]] = {
    "impersonation": attack_impersonation,
    "replay": attack_replay,
    "address-spoof": attack_address_spoof,
    "unauthenticated-access": demo_unauthenticated_vulnerability,
}


def run_attacks(seeds, auth_enabled: bool,
                scenario: Optional[Scenario] = None) -> list[tuple[int, AttackOutcome]]:
    """Every attack against its own fresh world for each seed."""
    results = []
    for seed in seeds:
        for fn in ATTACKS.values():
            sc = replace(scenario, seed=seed) if scenario is not None else None
            results.append((seed, fn(threat_world(seed, auth_enabled, sc))))
    return results
