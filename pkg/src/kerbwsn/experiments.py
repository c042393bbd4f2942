"""Experiment generators behind the traffic and lifetime figures."""

from __future__ import annotations

import csv
import io
import logging
from typing import Iterable, Sequence

from .client import ClientSession
from .energy import EnergyTrace
from .errors import AccessDenied, EnergyExhausted, ScenarioError
from .messages import Principal, RawQuery, SensorQuery, encode
from .network import bs_endpoint
from .scenario import Scenario
from .sensor_net import collect
from .world import build_world

logger = logging.getLogger(__name__)


def target_service(scenario: Scenario) -> Principal:
    """The base station the experiments load: first service of the first realm."""
    if not scenario.realms or not scenario.realms[0].services:
        raise ScenarioError("experiments need a first realm with at least one service")
    realm = scenario.realms[0]
    return Principal(realm.services[0], realm.name)


def run_lifetime_experiment(scenario: Scenario, auth_enabled: bool) -> EnergyTrace:
    """Every user of the first realm queries the target base station once per tick.

    With auth enabled, authorized users go through the full ticket flow and
    unauthorized ones can only send raw queries, which are rejected. With
    auth disabled everyone sends raw queries and everyone is answered. The run
    stops when the base station cannot pay a charge or at ``run.max_ticks``.
    """
    service = target_service(scenario)
    users = scenario.realms[0].users
    if not users:
        raise ScenarioError("lifetime experiment needs at least one user")
    world = build_world(scenario, auth_enabled)
    bs = world.stations[service]
    sessions: dict[Principal, ClientSession] = {}
    series = [bs.energy.remaining]
    lifetime = 0
    query_id = 0

    for tick in range(1, scenario.run.max_ticks + 1):
        if bs.energy.depleted:
            break
        try:
            for u in users:
                principal = Principal(u.name, service.realm)
                query = SensorQuery(query_id & 0xFFFF_FFFF)
                query_id += 1
                if auth_enabled and u.authorized:
                    session = sessions.get(principal)
                    if session is None or not session.tgt.valid_at(tick):
                        session = sessions[principal] = world.login(principal, tick)
                    session.access_base_station(service, query, tick)
                else:
                    payload = encode(RawQuery(principal, query))
                    try:
                        world.net.send(u.address, bs_endpoint(service), payload, tick)
                    except AccessDenied:
                        pass
        except EnergyExhausted:
            series.append(bs.energy.remaining)
            break
        series.append(bs.energy.remaining)
        lifetime = tick
    return EnergyTrace(tuple(series), lifetime, bs.served, bs.rejected,
                       bs.energy.initial, bs.energy.audited_total())


def traffic_vs_users(scenario: Scenario, user_counts: Sequence[int]) -> list[tuple[int, int]]:
    if not user_counts:
        raise ValueError("user_counts must be non-empty")
    world = build_world(scenario, auth_enabled=False)
    topo = world.stations[target_service(scenario)].topology
    rows = []
    for u in user_counts:
        total = 0
        for _ in range(u):
            gathered, flood = collect(topo)
            total += flood.total_bytes + gathered.total_bytes
            total += topo.reading_packet_size * len(gathered.readings)
        rows.append((u, total))
    return rows


def lifetime_vs_energy(scenario: Scenario,
                       initial_energies: Sequence[int]) -> list[tuple[int, int]]:
    if list(initial_energies) != sorted(initial_energies) or min(initial_energies, default=0) < 0:
        raise ValueError("initial energies must be non-negative and sorted")
    return [(e, run_lifetime_experiment(scenario.with_energy(initial_energy=e), True).lifetime)
            for e in initial_energies]


def to_csv(header: Iterable[str], rows: Iterable[Iterable[object]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def figure_csv(scenario: Scenario, which: int) -> str:
    """CSV text for figure 10, 11, 12 or 13."""
    if which == 10:
        return to_csv(("users", "total_bytes"),
                      traffic_vs_users(scenario, scenario.run.user_counts))
    if which in (11, 12):
        result = run_lifetime_experiment(scenario, auth_enabled=(which == 12))
        return to_csv(("tick", "remaining_milliunits"), enumerate(result.series))
    if which == 13:
        return to_csv(("initial_energy", "lifetime_ticks"),
                      lifetime_vs_energy(scenario, scenario.run.energies))
    raise ValueError(f"no figure {which}")
