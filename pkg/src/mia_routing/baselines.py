"""Shortest-route baselines, with and without information accumulation.

Edges are links with positive spectral efficiency, weighted by ``1 / C``: the
time one bit takes over the hop at unit bandwidth. Equal-cost routes are
resolved in favour of the lexicographically smallest node sequence.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Optional

from .network import Network, Traffic


class NoRouteError(ValueError):
    pass


@dataclass(frozen=True)
class Route:
    nodes: tuple[int, ...]
    efficiencies: tuple[float, ...]

    def __post_init__(self):
        if len(self.nodes) < 2:
            raise NoRouteError("a route needs at least two nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise NoRouteError(f"route {self.nodes} repeats a node")
        if len(self.efficiencies) != len(self.nodes) - 1:
            raise NoRouteError("need one spectral efficiency per hop")
        if any(not c > 0 for c in self.efficiencies):
            raise NoRouteError(f"route {self.nodes} uses a link with zero efficiency")

    @classmethod
    def from_nodes(cls, network: Network, nodes) -> "Route":
        nodes = tuple(int(n) for n in nodes)
        if nodes[0] != 1 or nodes[-1] != network.destination:
            raise NoRouteError(f"route must run from 1 to {network.destination}")
        return cls(nodes, tuple(network.c(a, b) for a, b in zip(nodes, nodes[1:])))

    @property
    def cost(self) -> float:
        """Seconds per bit at unit bandwidth."""
        return sum(1.0 / c for c in self.efficiencies)

    def __len__(self):
        return len(self.nodes)


def dijkstra_route(network: Network) -> Route:
    """Minimum ``sum(1/C)`` route from node 1 to the destination."""
    C = network.channel
    L = network.n_nodes
    # labels are (cost, path): among equal costs the smaller path pops first
    queue = [(0.0, (1,))]
    done = set()
    while queue:
        cost, path = heapq.heappop(queue)
        u = path[-1]
        if u in done:
            continue
        done.add(u)
        if u == L:
            return Route.from_nodes(network, path)
        for v in range(1, L + 1):
            if v not in done and C[u - 1, v - 1] > 0:
                heapq.heappush(queue, (_key(cost + 1.0 / C[u - 1, v - 1]), path + (v,)))
    raise NoRouteError(f"destination {L} is unreachable from the source")


def _key(cost: float) -> float:
    # absorb last-bit differences so mathematically equal costs tie
    return float(f"{cost:.12g}")


def multihop_time(route: Route, file_size: float, bandwidth: float = 1.0) -> float:
    """Store-and-forward time: each hop resends the whole file on its own."""
    if not file_size > 0 or not bandwidth > 0:
        raise ValueError("file_size and bandwidth must be > 0")
    return sum(file_size / (bandwidth * c) for c in route.efficiencies)


def route_network(network: Network, route: Route) -> Network:
    """The network seen by a transmission confined to ``route``'s nodes."""
    return network.subnetwork(route.nodes)


def mia_on_route(network: Network, route: Route, traffic: Traffic, config=None):
    """Full optimizer restricted to the route's nodes. Returns its report."""
    from .optimizer import OptimizeConfig, optimize
    return optimize(route_network(network, route), traffic, config or OptimizeConfig())


def mia_on_route_time(network: Network, route: Route, traffic: Traffic,
                      config=None) -> float:
    return mia_on_route(network, route, traffic, config).objective


def all_simple_routes(network: Network, limit: Optional[int] = None):
    """Every simple positive-efficiency route from 1 to L (for small networks)."""
    L = network.n_nodes
    C = network.channel
    out = []

    def walk(path):
        u = path[-1]
        if u == L:
            out.append(Route.from_nodes(network, path))
            return
        for v in range(2, L + 1):
            if v not in path and C[u - 1, v - 1] > 0:
                walk(path + (v,))
                if limit is not None and len(out) >= limit:
                    return

    walk((1,))
    return out
