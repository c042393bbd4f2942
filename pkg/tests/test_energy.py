import pytest

from kerbwsn.energy import EnergyParams, EnergyState, tx_cost
from kerbwsn.errors import EnergyExhausted, InvalidInput
from kerbwsn.experiments import lifetime_vs_energy, run_lifetime_experiment, traffic_vs_users
from kerbwsn.scenario import RealmSpec, RunParams, Scenario, TopologyParams, UserSpec


def one_node_scenario(users, initial=100_000, packet=100, max_ticks=5000):
    """A single always-connected node, so each answer is exactly ``packet`` bytes."""
    return Scenario(
        seed=1,
        realms=(RealmSpec("WSN", tuple(users), ("bs1",)),),
        topology=TopologyParams(n_nodes=1, area=10.0, range=100.0, reading_packet_size=packet),
        energy=EnergyParams(initial_energy=initial, cost_fixed_tx=100, cost_per_byte=1,
                            verify_cost=10),
        run=RunParams(max_ticks=max_ticks),
    )


ALICE = UserSpec("alice", "pw-a", 1)
BOB = UserSpec("bob", "pw-b", 2)
EVE = UserSpec("eve", "pw-e", 3, authorized=False)


def test_tx_cost():
    p = EnergyParams(cost_fixed_tx=100, cost_per_byte=1)
    assert tx_cost(p, 100) == 200
    assert tx_cost(p, 0) == 100
    assert [tx_cost(p, b) for b in range(50)] == sorted(tx_cost(p, b) for b in range(50))


def test_params_reject_negative_and_float():
    with pytest.raises(InvalidInput):
        EnergyParams(verify_cost=-1)
    with pytest.raises(InvalidInput):
        EnergyParams(cost_per_byte=0.5)


def test_charge_drains_to_zero_on_shortfall():
    state = EnergyState(150)
    state.charge(100, "tx", 1)
    with pytest.raises(EnergyExhausted):
        state.charge(100, "tx", 2)
    assert state.remaining == 0 and state.depleted
    assert state.audited_total() == 150


def hand_stepped_lifetime(initial, per_tick):
    energy, ticks = initial, 0
    while energy >= per_tick:
        energy -= per_tick
        ticks += 1
    return ticks


def test_lifetime_hand_stepped_oracle():
    trace = run_lifetime_experiment(one_node_scenario([ALICE]), auth_enabled=True)
    assert hand_stepped_lifetime(100_000, 10 + 100 + 100) == 476
    assert trace.lifetime == 476
    assert trace.series[:3] == (100_000, 99_790, 99_580)


def test_without_unauthorized_users_auth_costs_only_verification():
    sc = one_node_scenario([ALICE, BOB], max_ticks=100)
    off = run_lifetime_experiment(sc, auth_enabled=False)
    on = run_lifetime_experiment(sc, auth_enabled=True)
    for tick, (a, b) in enumerate(zip(off.series, on.series)):
        assert a - b == tick * 2 * 10


def test_auth_extends_lifetime_under_unauthorized_load():
    sc = one_node_scenario([ALICE, EVE, UserSpec("trudy", "x", 4, authorized=False)])
    off = run_lifetime_experiment(sc, auth_enabled=False)
    on = run_lifetime_experiment(sc, auth_enabled=True)
    assert off.lifetime == 100_000 // (3 * 200)
    assert on.lifetime == 100_000 // (3 * 10 + 200)
    assert on.lifetime > off.lifetime
    assert on.rejected == 2 * on.lifetime


@pytest.mark.parametrize("auth", [True, False])
def test_series_non_increasing_and_audit_balances(auth):
    trace = run_lifetime_experiment(one_node_scenario([ALICE, EVE], initial=20_000), auth)
    assert all(a >= b for a, b in zip(trace.series, trace.series[1:]))
    assert trace.series[-1] == 0 or trace.lifetime == 5000
    assert trace.initial - trace.series[-1] == trace.audited


def test_traffic_vs_users_is_linear():
    sc = Scenario(seed=2)
    rows = dict(traffic_vs_users(sc, (0, 1, 2, 4, 8, 16)))
    assert rows[0] == 0
    assert rows[1] > 0
    for u in (2, 4, 8, 16):
        assert rows[u] == 2 * rows[u // 2]


def test_lifetime_vs_energy():
    sc = one_node_scenario([ALICE])
    rows = lifetime_vs_energy(sc, (0, 209, 210, 1_000, 50_000, 100_000))
    assert [t for _, t in rows] == [e // 210 for e, _ in rows]
    with pytest.raises(ValueError):
        lifetime_vs_energy(sc, (10, 5))
