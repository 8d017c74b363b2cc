"""Decoding orders: sequences of (node, packet) decoding events.

An event ``(1, c)`` marks packet ``c`` becoming available at the source; any
other ``(i, c)`` is node ``i`` decoding packet ``c``. Orders are immutable and
every constructor or mutation returns a validated instance.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

Event = tuple[int, int]


class OrderError(ValueError):
    pass


class NotInOrderError(OrderError, KeyError):
    pass


class IllegalSwapError(OrderError):
    pass


class ProtectedEventError(OrderError):
    pass


@dataclass(frozen=True)
class DecodingOrder:
    events: tuple[Event, ...]
    n_nodes: int
    arrivals: tuple[float, ...]
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        events = tuple((int(i), int(c)) for i, c in self.events)
        object.__setattr__(self, "events", events)
        object.__setattr__(self, "arrivals", tuple(float(a) for a in self.arrivals))
        object.__setattr__(self, "_pos", {e: s for s, e in enumerate(events, start=1)})
        validate(self)

    @property
    def n_packets(self) -> int:
        return len(self.arrivals)

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def __getitem__(self, s: int) -> Event:
        """Event at 1-based position ``s``."""
        if not 1 <= s <= len(self.events):
            raise IndexError(s)
        return self.events[s - 1]

    def __contains__(self, event) -> bool:
        return tuple(event) in self._pos

    def position_of(self, node: int, packet: int) -> int:
        try:
            return self._pos[(node, packet)]
        except KeyError:
            raise NotInOrderError(f"event ({node}, {packet}) is not in the order") from None

    def decoders(self, packet: int) -> list[int]:
        """Nodes holding an event for ``packet``, in decoding order."""
        return [i for i, c in self.events if c == packet]

    def key(self) -> tuple[Event, ...]:
        return self.events

    def with_events(self, events: Iterable[Event]) -> "DecodingOrder":
        return DecodingOrder(tuple(events), self.n_nodes, self.arrivals)


def position_of(order: DecodingOrder, node: int, packet: int) -> int:
    return order.position_of(node, packet)


def validate(order: DecodingOrder) -> None:
    """Raise :class:`OrderError` unless ``order`` is a well-formed decoding order."""
    L, N = order.n_nodes, order.n_packets
    events = order.events
    if L < 2 or N < 1:
        raise OrderError("need at least two nodes and one packet")
    if len(set(events)) != len(events):
        raise OrderError("duplicate decoding event")
    for i, c in events:
        if not (1 <= i <= L and 1 <= c <= N):
            raise OrderError(f"event ({i}, {c}) out of range")
    if len(events) > N * L:
        raise OrderError("order longer than N*L")
    pos = order._pos
    for c in range(1, N + 1):
        if (1, c) not in pos or (L, c) not in pos:
            raise OrderError(f"packet {c} lacks its source or destination event")
        src = pos[(1, c)]
        for i in range(2, L + 1):
            if (i, c) in pos and pos[(i, c)] < src:
                raise OrderError(f"node {i} decodes packet {c} before it is available")
    src_arrivals = [order.arrivals[c - 1] for i, c in events if i == 1]
    if any(b < a for a, b in zip(src_arrivals, src_arrivals[1:])):
        raise OrderError("source events are not in arrival order")


def _argmax_sum(C: np.ndarray, decoded: list[int], candidates: list[int]) -> int:
    best, best_val = None, -np.inf
    for k in candidates:  # ascending, so ties keep the lowest label
        val = sum(C[i - 1, k - 1] for i in decoded)
        if val > best_val:
            best, best_val = k, val
    return best


def init_single_packet_order(network, arrival: float = 0.0) -> DecodingOrder:
    """Greedy single-packet order.

    Starting from the source, repeatedly append the relay with the largest sum
    spectral efficiency from the nodes already decoded; the destination goes
    last.
    """
    L = network.n_nodes
    C = network.channel
    decoded = [1]
    remaining = list(range(2, L))
    while remaining:
        j = _argmax_sum(C, decoded, remaining)
        decoded.append(j)
        remaining.remove(j)
    decoded.append(L)
    return DecodingOrder(tuple((i, 1) for i in decoded), L, (arrival,))


def init_multi_packet_order(single_order: DecodingOrder, traffic) -> DecodingOrder:
    """Expand each single-packet event ``(i, 1)`` into ``(i, 1), ..., (i, N)``."""
    if single_order.n_packets != 1:
        raise OrderError("expected a single-packet order")
    N = traffic.n_packets
    events = [(i, c) for i, _ in single_order.events for c in range(1, N + 1)]
    return DecodingOrder(tuple(events), single_order.n_nodes, traffic.arrivals())


def expand_for_packets(single_order: DecodingOrder, packets: Sequence[int]) -> list[Event]:
    return [(i, c) for i, _ in single_order.events for c in packets]


def check_swap(order: DecodingOrder, m: int) -> Optional[str]:
    """Reason why swapping positions ``m-1`` and ``m`` is illegal, or None."""
    if not 2 <= m <= len(order):
        return f"position {m} out of range 2..{len(order)}"
    (a, ca), (b, cb) = order[m - 1], order[m]
    if a == 1 and b == 1 and order.arrivals[ca - 1] != order.arrivals[cb - 1]:
        return "would reorder source events with distinct arrival times"
    if ca == cb and a == 1:
        return f"would place ({b}, {cb}) before the packet is available"
    return None


def apply_swap(order: DecodingOrder, m: int) -> DecodingOrder:
    """Exchange the events at 1-based positions ``m-1`` and ``m``."""
    reason = check_swap(order, m)
    if reason is not None:
        raise IllegalSwapError(f"swap at {m}: {reason}")
    events = list(order.events)
    events[m - 2], events[m - 1] = events[m - 1], events[m - 2]
    return order.with_events(events)


def apply_drop(order: DecodingOrder, m: int) -> DecodingOrder:
    """Remove the relay event at position ``m``."""
    if not 1 <= m <= len(order):
        raise IndexError(m)
    i, c = order[m]
    if i in (1, order.n_nodes):
        raise ProtectedEventError(f"cannot drop source/destination event ({i}, {c})")
    events = list(order.events)
    del events[m - 1]
    return order.with_events(events)


def order_from_lists(events: Sequence[Sequence[int]], n_nodes: int, arrivals) -> DecodingOrder:
    return DecodingOrder(tuple(tuple(e) for e in events), n_nodes, tuple(arrivals))
