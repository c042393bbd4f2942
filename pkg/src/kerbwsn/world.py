"""Builds a runnable world (network, KDCs, base stations) from a scenario.

All randomness comes from the scenario seed. Each consumer gets its own
generator keyed by a label, so adding a consumer never perturbs another's
stream.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .base_station import BaseStation
from .client import ClientSession, login
from .crypto import SecretKey, random_session_key
from .kdc import Kdc
from .messages import Principal
from .network import Network, bs_endpoint, kdc_endpoint
from .scenario import Scenario, UserSpec
from .sensor_net import Topology, build_topology


def stream(seed: int, *labels: str) -> np.random.Generator:
    """Independent generator for ``labels`` under the scenario seed."""
    key = tuple(zlib.crc32(label.encode("utf-8")) for label in labels)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


@dataclass
class World:
    scenario: Scenario
    net: Network
    kdcs: dict[str, Kdc]
    stations: dict[Principal, BaseStation]
    users: dict[Principal, UserSpec]
    inter_realm_keys: dict[tuple[str, str], SecretKey] = field(default_factory=dict)

    def user(self, name: str, realm: Optional[str] = None) -> Principal:
        realm = realm or self.scenario.realms[0].name
        return Principal(name, realm)

    def station(self, name: str, realm: Optional[str] = None) -> BaseStation:
        return self.stations[Principal(name, realm or self.scenario.realms[0].name)]

    def login(self, user: Principal, now: int, password: Optional[str] = None,
              clock_offset: int = 0) -> ClientSession:
        entry = self.users[user]
        return login(user, entry.password if password is None else password, entry.address,
                     self.net, now, stream(self.scenario.seed, "client", str(user), str(now)),
                     clock_offset=clock_offset)


def build_world(scenario: Scenario, auth_enabled: bool = True,
                register_trusts: bool = True) -> World:
    seed = scenario.seed
    net = Network()
    kdcs: dict[str, Kdc] = {}
    stations: dict[Principal, BaseStation] = {}
    users: dict[Principal, UserSpec] = {}
    t = scenario.topology

    for realm in scenario.realms:
        kdc = Kdc(realm.name, stream(seed, "kdc", realm.name), scenario.kdc)
        kdcs[realm.name] = kdc
        net.attach(kdc_endpoint(realm.name), kdc.handle)
        for u in realm.users:
            principal = Principal(u.name, realm.name)
            users[principal] = u
            if u.authorized:
                kdc.register_user(principal, u.password)
        for name in realm.services:
            service = Principal(name, realm.name)
            key = random_session_key(stream(seed, "service-key", str(service)))
            kdc.register_service(service, key)
            topo: Topology = build_topology(t.n_nodes, t.area, t.range,
                                            stream(seed, "topology", str(service)),
                                            t.reading_packet_size, t.query_packet_size)
            bs = BaseStation(service, key, topo, scenario.energy, auth_enabled,
                             scenario.kdc.max_clock_skew)
            stations[service] = bs
            net.attach(bs_endpoint(service), bs.handle)

    world = World(scenario, net, kdcs, stations, users)
    if register_trusts:
        for a, b in realm_pairs(scenario):
            key = random_session_key(stream(seed, "inter-realm", a, b))
            kdcs[a].register_remote_realm(b, key)
            kdcs[b].register_remote_realm(a, key)
            world.inter_realm_keys[(a, b)] = key
    return world


def realm_pairs(scenario: Scenario) -> list[tuple[str, str]]:
    return sorted({tuple(sorted(p)) for r in scenario.realms
                   for p in ((r.name, o) for o in r.trusts)})

