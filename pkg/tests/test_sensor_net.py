import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from kerbwsn.errors import EmptyNetwork, UnknownNode
from kerbwsn.sensor_net import (BASE_ID, SensorNode, Topology, build_topology, collect,
                                local_broadcast, many_to_one_round, one_to_many_flood)


def oracle_graph(topo):
    """Independent unit-disk graph built with networkx."""
    g = nx.Graph()
    pts = {BASE_ID: (topo.base_pos, topo.base_range)}
    pts.update({n.id: ((n.x, n.y), n.radio_range) for n in topo.nodes})
    g.add_nodes_from(pts)
    for a, (pa, ra) in pts.items():
        for b, (pb, rb) in pts.items():
            if a < b and math.dist(pa, pb) <= min(ra, rb):
                g.add_edge(a, b)
    return g


def random_topo(seed, n=None, rng_range=None):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(0, 60)) if n is None else n
    r = float(rng.uniform(5, 60)) if rng_range is None else rng_range
    return build_topology(n, 100.0, r, rng)


def test_build_is_deterministic():
    assert random_topo(3, 40, 25.0) == random_topo(3, 40, 25.0)
    assert random_topo(3, 40, 25.0) != random_topo(4, 40, 25.0)


def test_full_mesh_when_range_covers_area():
    topo = random_topo(1, 30, 100 * math.sqrt(2) + 1)
    ids = {n.id for n in topo.nodes} | {BASE_ID}
    for v, nbrs in topo.adjacency.items():
        assert set(nbrs) == ids - {v}
    result = many_to_one_round(topo)
    assert set(result.hop_counts.values()) == {1}
    assert result.total_bytes == 30 * topo.reading_packet_size


def test_disconnected_nodes_are_reported():
    nodes = (SensorNode(0, 5, 0, 10), SensorNode(1, 12, 0, 10), SensorNode(2, 80, 80, 10))
    topo = Topology(nodes, (0.0, 0.0), 10.0)
    result = many_to_one_round(topo)
    assert result.hop_counts == {0: 1, 1: 2}
    assert result.disconnected == (2,)
    assert topo.path_to_base(1) == [1, 0, BASE_ID]
    assert topo.path_to_base(2) == []


def test_links_use_the_smaller_range():
    topo = Topology((SensorNode(0, 8, 0, 5), SensorNode(1, 0, 0, 100)), (50.0, 50.0), 1.0)
    assert local_broadcast(topo, 0) == frozenset()
    assert local_broadcast(topo, 1) == frozenset()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_against_networkx_oracle(seed):
    topo = random_topo(seed)
    g = oracle_graph(topo)
    for v in g.nodes:
        assert set(topo.adjacency[v]) == set(g.neighbors(v))
    dist = nx.single_source_shortest_path_length(g, BASE_ID)
    result = many_to_one_round(topo)
    assert result.hop_counts == {v: d for v, d in dist.items() if v != BASE_ID}
    assert result.total_bytes == sum(result.hop_counts.values()) * topo.reading_packet_size
    flood = one_to_many_flood(topo)
    assert flood.reached == frozenset(nx.node_connected_component(g, BASE_ID)) - {BASE_ID}
    assert flood.retransmissions == len(flood.reached)
    assert flood.total_bytes == topo.query_packet_size * (1 + len(flood.reached))
    for n in topo.nodes:
        path = topo.path_to_base(n.id)
        if n.id in dist:
            assert len(path) - 1 == dist[n.id]
            assert all(g.has_edge(a, b) for a, b in zip(path, path[1:]))


def test_route_ties_pick_lowest_id_parent():
    # node 2 is two hops out and in range of both 0 and 1
    nodes = (SensorNode(0, 5, 5, 10), SensorNode(1, 5, -5, 10), SensorNode(2, 12, 0, 10))
    topo = Topology(nodes, (0.0, 0.0), 10.0)
    assert topo.routes[2] == (2, 0)


def test_local_broadcast_symmetric_and_brute_force():
    topo = random_topo(11, 50, 20.0)
    for a in topo.nodes:
        got = local_broadcast(topo, a.id)
        expected = {b.id for b in topo.nodes
                    if b.id != a.id and math.hypot(a.x - b.x, a.y - b.y) <= 20.0}
        if math.hypot(a.x - 50, a.y - 50) <= 20.0:
            expected.add(BASE_ID)
        assert got == expected
        for b in got - {BASE_ID}:
            assert a.id in local_broadcast(topo, b)


def test_unknown_node():
    topo = random_topo(0, 5, 30.0)
    with pytest.raises(UnknownNode):
        local_broadcast(topo, 99)
    with pytest.raises(UnknownNode):
        one_to_many_flood(topo, 99)
    with pytest.raises(KeyError):
        topo.node(99)


def test_empty_network():
    topo = random_topo(0, 0, 30.0)
    assert many_to_one_round(topo).total_bytes == 0
    assert one_to_many_flood(topo).reached == frozenset()
    with pytest.raises(EmptyNetwork):
        collect(topo)


def test_dump_round_trip():
    topo = random_topo(5, 25, 30.0)
    assert Topology.loads(topo.dumps()) == topo


def test_duplicate_ids_rejected():
    with pytest.raises(ValueError):
        Topology((SensorNode(0, 0, 0, 1), SensorNode(0, 1, 1, 1)), (0.0, 0.0), 1.0)
