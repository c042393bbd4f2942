"""Fixed-topology multi-hop sensor network and its three traffic patterns.

Links follow a unit-disk rule with the smaller of the two radio ranges, so
adjacency is always symmetric. The base station sits at ``base_pos`` and
uses ``base_range``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import EmptyNetwork, MalformedEncoding, UnknownNode

READING_PACKET_SIZE = 32
QUERY_PACKET_SIZE = 16
BASE_ID = -1


@dataclass(frozen=True)
class SensorNode:
    id: int
    x: float
    y: float
    radio_range: float
    reading: int = 0


@dataclass(frozen=True)
class RoundResult:
    readings: tuple[tuple[int, int], ...]
    hop_counts: dict[int, int]
    disconnected: tuple[int, ...]
    total_bytes: int


@dataclass(frozen=True)
class FloodResult:
    reached: frozenset[int]
    retransmissions: int
    total_bytes: int


@dataclass(frozen=True, eq=False)
class Topology:
    nodes: tuple[SensorNode, ...]
    base_pos: tuple[float, float]
    base_range: float
    reading_packet_size: int = READING_PACKET_SIZE
    query_packet_size: int = QUERY_PACKET_SIZE
    _index: dict[int, SensorNode] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        index = {n.id: n for n in self.nodes}
        if len(index) != len(self.nodes) or BASE_ID in index:
            raise ValueError("node ids must be unique and not equal to the base id")
        object.__setattr__(self, "_index", index)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Topology):
            return NotImplemented
        return (self.nodes, self.base_pos, self.base_range, self.reading_packet_size,
                self.query_packet_size) == (other.nodes, other.base_pos, other.base_range,
                                            other.reading_packet_size, other.query_packet_size)

    def node(self, node_id: int) -> SensorNode:
        try:
            return self._index[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    @cached_property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        """Neighbor lists (sorted by id) for every node and for the base (id -1)."""
        pts = [(BASE_ID, self.base_pos[0], self.base_pos[1], self.base_range)]
        pts += [(n.id, n.x, n.y, n.radio_range) for n in self.nodes]
        adj: dict[int, list[int]] = {p[0]: [] for p in pts}
        for i, (a, ax, ay, ar) in enumerate(pts):
            for b, bx, by, br in pts[i + 1:]:
                if math.hypot(ax - bx, ay - by) <= min(ar, br):
                    adj[a].append(b)
                    adj[b].append(a)
        return {k: tuple(sorted(v)) for k, v in adj.items()}

    @cached_property
    def routes(self) -> dict[int, tuple[int, int]]:
        """BFS tree from the base: node -> (hop_count, parent).

        Within a layer, nodes are expanded in id order and a node adopts the
        first (lowest-id) parent that reaches it.
        """
        adj = self.adjacency
        routes: dict[int, tuple[int, int]] = {}
        frontier = [BASE_ID]
        depth = 0
        while frontier:
            depth += 1
            nxt: list[int] = []
            for u in sorted(frontier):
                for v in adj[u]:
                    if v != BASE_ID and v not in routes:
                        routes[v] = (depth, u)
                        nxt.append(v)
            frontier = nxt
        return routes

    def path_to_base(self, node_id: int) -> list[int]:
        self.node(node_id)
        path = [node_id]
        while path[-1] != BASE_ID:
            if path[-1] not in self.routes:
                return []
            path.append(self.routes[path[-1]][1])
        return path

    def dumps(self) -> str:
        """Text dump: header lines then one ``id x y range reading`` line per node."""
        lines = [f"base {self.base_pos[0]!r} {self.base_pos[1]!r} {self.base_range!r}",
                 f"packets {self.reading_packet_size} {self.query_packet_size}"]
        lines += [f"{n.id} {n.x!r} {n.y!r} {n.radio_range!r} {n.reading}" for n in self.nodes]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> Topology:
        base = None
        packets = (READING_PACKET_SIZE, QUERY_PACKET_SIZE)
        nodes = []
        for lineno, line in enumerate(text.splitlines(), 1):
            parts = line.split("#", 1)[0].split()
            if not parts:
                continue
            try:
                if parts[0] == "base":
                    base = (float(parts[1]), float(parts[2]), float(parts[3]))
                elif parts[0] == "packets":
                    packets = (int(parts[1]), int(parts[2]))
                else:
                    reading = int(parts[4]) if len(parts) > 4 else 0
                    nodes.append(SensorNode(int(parts[0]), float(parts[1]), float(parts[2]),
                                            float(parts[3]), reading))
            except (IndexError, ValueError) as exc:
                raise MalformedEncoding(f"topology line {lineno}: {line!r}") from exc
        if base is None:
            raise MalformedEncoding("topology dump has no base line")
        return cls(tuple(nodes), (base[0], base[1]), base[2], *packets)


def build_topology(n_nodes: int, area: float, radio_range: float,
                   rng: np.random.Generator,
                   reading_packet_size: int = READING_PACKET_SIZE,
                   query_packet_size: int = QUERY_PACKET_SIZE) -> Topology:
    """Uniform random placement in an ``area`` x ``area`` square, base at the center."""
    if n_nodes < 0:
        raise ValueError("n_nodes must be non-negative")
    xy = rng.uniform(0.0, area, size=(n_nodes, 2))
    readings = rng.integers(-1000, 1001, size=n_nodes)
    nodes = tuple(SensorNode(i, float(xy[i, 0]), float(xy[i, 1]), float(radio_range),
                             int(readings[i]))
                  for i in range(n_nodes))
    return Topology(nodes, (area / 2, area / 2), float(radio_range),
                    reading_packet_size, query_packet_size)


def many_to_one_round(topo: Topology) -> RoundResult:
    """Every connected node sends its reading to the base along its BFS route."""
    routes = topo.routes
    readings, hops, disconnected = [], {}, []
    total = 0
    for n in topo.nodes:
        if n.id in routes:
            h = routes[n.id][0]
            hops[n.id] = h
            readings.append((n.id, n.reading))
            total += h * topo.reading_packet_size
        else:
            disconnected.append(n.id)
    return RoundResult(tuple(readings), hops, tuple(disconnected), total)


def one_to_many_flood(topo: Topology, origin: int = BASE_ID) -> FloodResult:
    """Flood from ``origin`` with duplicate suppression; each node forwards once."""
    adj = topo.adjacency
    if origin not in adj:
        raise UnknownNode(origin)
    seen = {origin}
    queue = deque([origin])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    reached = frozenset(seen - {origin})
    # origin's initial broadcast plus one retransmission per reached node
    total = topo.query_packet_size * (1 + len(reached))
    return FloodResult(reached, len(reached), total)


def local_broadcast(topo: Topology, node_id: int) -> frozenset[int]:
    """Ids of the nodes within radio range of ``node_id`` (the base counts as -1)."""
    if node_id != BASE_ID:
        topo.node(node_id)
    return frozenset(topo.adjacency[node_id])


def collect(topo: Topology) -> tuple[RoundResult, FloodResult]:
    """A full query round: flood the query out, gather readings back."""
    if not topo.nodes:
        raise EmptyNetwork("no sensor nodes deployed")
    return many_to_one_round(topo), one_to_many_flood(topo)

