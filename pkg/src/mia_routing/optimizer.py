"""Iterative decoding-order search around the resource-allocation LP.

Each iteration solves the LP for the current order and inspects intervals of
zero length. A relay decode that lands together with the destination decode
of the same packet is dropped; otherwise the events bracketing a zero
interval are swapped. Either move keeps the previous LP optimum feasible, so
the objective never increases.

When those moves run out, an escape step scans the neighbouring orders
(adjacent swaps, swaps of same-node runs, single drops) and continues from the
first one that strictly improves; the search stops when none does.
"""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from typing import Optional

from .formulation import (TOTAL_TIME, ConstraintSet, Objective, ResourceSchedule,
                          ScheduleUnavailableError, earliest_schedule, solve_order, time_scale,
                          zero_delta_indices)
from .network import Network, Traffic
from .order import (DecodingOrder, Event, OrderError, apply_drop, apply_swap, check_swap,
                    expand_for_packets, init_multi_packet_order, init_single_packet_order,
                    validate)

log = logging.getLogger(__name__)


class InfeasibleInstanceError(RuntimeError):
    pass


class Termination(str, enum.Enum):
    FIXED_POINT = "FixedPoint"
    ITERATION_CAP = "IterationCap"
    CYCLE_DETECTED = "CycleDetected"


@dataclass(frozen=True)
class OptimizeConfig:
    objective: Objective = TOTAL_TIME
    constraints: ConstraintSet = ConstraintSet()
    zero_tol: float = 1e-7
    max_iterations: Optional[int] = None
    detect_cycles: bool = True
    swap_all: bool = False
    avoid_revisits: bool = False
    escape: bool = True
    prefer_cross_node: bool = True
    kernel: Optional[str] = None

    def iteration_cap(self, traffic: Traffic, network: Network) -> int:
        if self.max_iterations is not None:
            if self.max_iterations < 1:
                raise ValueError("max_iterations must be >= 1")
            return self.max_iterations
        return 50 * traffic.n_packets * network.n_nodes


@dataclass
class Step:
    iteration: int
    order: DecodingOrder
    objective: float
    action: str  # "drop", "swap", "escape" or "terminate"
    dropped: Optional[Event] = None
    swaps: tuple = ()

    def to_dict(self) -> dict:
        d = {"iteration": self.iteration, "objective": self.objective, "action": self.action,
             "order": [list(e) for e in self.order.events]}
        if self.dropped is not None:
            d["dropped"] = list(self.dropped)
        if self.swaps:
            d["swaps"] = list(self.swaps)
        return d


@dataclass
class OptimizeReport:
    schedule: ResourceSchedule
    trace: list = field(default_factory=list)
    reason: Termination = Termination.FIXED_POINT
    schedules: list = field(default_factory=list, repr=False)

    @property
    def objective(self) -> float:
        return self.schedule.objective_value

    @property
    def iterations(self) -> int:
        return len(self.trace)

    @property
    def order(self) -> DecodingOrder:
        return self.schedule.order

    def trace_jsonl(self) -> str:
        return "\n".join(json.dumps(step.to_dict()) for step in self.trace)


def initial_order(network: Network, traffic: Traffic, config: Optional[OptimizeConfig] = None
                  ) -> DecodingOrder:
    """Greedy single-packet order expanded to every packet.

    With staggered arrivals the files are added one arrival group at a time:
    each group's availability events go right after the events that the
    earlier groups' schedule completes by that arrival, and the group's
    relay and destination events are appended at the end.
    """
    single = init_single_packet_order(network)
    arrivals = traffic.arrivals()
    if len(set(arrivals)) == 1:
        return init_multi_packet_order(single, traffic)
    config = config or OptimizeConfig()
    groups: dict = {}
    for f_idx, f in enumerate(traffic.files):
        groups.setdefault(f.arrival_time, []).append(f_idx)
    events: list = []
    n_files = 0
    for tau in sorted(groups):
        n_files += len(groups[tau])
        sub = Traffic(files=traffic.files[:n_files])
        new = [p.id for p in sub.packets if p.arrival == tau]
        cut = 0
        if events:
            prefix = Traffic(files=traffic.files[:n_files - len(groups[tau])])
            done = DecodingOrder(tuple(events), network.n_nodes, prefix.arrivals())
            sched = earliest_schedule(network, prefix, done, config.objective,
                                      config.constraints, kernel=config.kernel)
            times = sched.event_times
            tol = 1e-9 * max(1.0, tau)
            while cut < len(events) and times[cut] <= tau + tol:
                cut += 1
        block = expand_for_packets(single, new)
        heads = [e for e in block if e[0] == 1]
        events = events[:cut] + heads + events[cut:] + [e for e in block if e[0] != 1]
    return DecodingOrder(tuple(events), network.n_nodes, arrivals)


def relabel_by_delivery(order: DecodingOrder, traffic: Traffic) -> DecodingOrder:
    """Rename equal-size packets of each file so they reach the destination in label order.

    Packets of one file share arrival time and size, so any permutation of
    their labels describes the same schedule; this picks the canonical one.
    """
    L = order.n_nodes
    perm = {}
    for ell in range(1, traffic.n_files + 1):
        ids = [p.id for p in traffic.packets_of(ell)]
        sizes = [traffic.packets[c - 1].size for c in ids]
        if max(sizes) - min(sizes) > 1e-12 * max(sizes):
            perm.update({c: c for c in ids})
            continue
        delivered = sorted(ids, key=lambda c: order.position_of(L, c))
        perm.update(dict(zip(delivered, ids)))
    events = [(i, perm[c]) for i, c in order.events]
    # availability events with one arrival time commute; list them by label
    k = 0
    while k < len(events):
        if events[k][0] != 1:
            k += 1
            continue
        end = k
        while (end < len(events) and events[end][0] == 1
               and order.arrivals[events[end][1] - 1] == order.arrivals[events[k][1] - 1]):
            end += 1
        events[k:end] = sorted(events[k:end])
        k = end
    return order.with_events(events)


def _drop_position(order: DecodingOrder, zeros, L: int) -> Optional[int]:
    """Position of the first relay event that coincides with its packet's delivery.

    The relay event at ``p`` qualifies when every interval after it up to and
    including the destination event of the same packet has zero length.
    """
    zero = set(zeros)
    for m in zeros:
        if m < 2:
            continue
        i, c = order[m - 1]
        if i in (1, L):
            continue
        fL = order.position_of(L, c)
        if fL >= m and all(s in zero for s in range(m, fL + 1)):
            return m - 1
    return None


def _pick_swaps(order: DecodingOrder, zeros, swap_all: bool = False, seen=None,
                prefer_cross_node: bool = True) -> list[int]:
    """Zero-interval positions whose bracketing events get exchanged.

    Exchanging two events of one node only reorders its own packets, so such
    swaps are kept as a fallback behind swaps that move events across nodes.
    """
    picked, fallback = [], []
    for m in zeros:
        if m < 2 or (picked and picked[-1] == m - 1):
            continue
        if order[m - 1][0] == 1 and order[m][0] == 1:
            continue  # two availability events: exchanging them changes nothing
        if check_swap(order, m) is not None:
            continue
        if seen is not None and not swap_all and apply_swap(order, m).key() in seen:
            continue
        if prefer_cross_node and order[m - 1][0] == order[m][0]:
            fallback.append(m)
            continue
        picked.append(m)
        if not swap_all:
            break
    if not picked and fallback:
        picked = fallback if swap_all else fallback[:1]
    return picked


def _block_swap(order: DecodingOrder, m: int) -> Optional[DecodingOrder]:
    """Exchange the run of same-node events ending at ``m-1`` with the run starting at ``m``."""
    ev = list(order.events)
    a, b = ev[m - 2][0], ev[m - 1][0]
    if a == b or 1 in (a, b):
        return None
    lo = m - 2
    while lo > 0 and ev[lo - 1][0] == a:
        lo -= 1
    hi = m - 1
    while hi + 1 < len(ev) and ev[hi + 1][0] == b:
        hi += 1
    if lo == m - 2 and hi == m - 1:
        return None  # plain adjacent swap
    cand = order.with_events(ev[:lo] + ev[m - 1:hi + 1] + ev[lo:m - 1] + ev[hi + 1:])
    try:
        validate(cand)
    except OrderError:
        return None
    return cand


def _escape(order, target, seen, solve):
    """First neighbouring order that strictly beats ``target``, or None.

    Neighbours are every legal adjacent swap, every swap of two adjacent
    same-node runs, and every single relay-event drop. Returns
    ``(new_order, n_solved)``.
    """
    L = order.n_nodes
    cands = []
    for m in range(2, len(order) + 1):
        if order[m - 1][0] == 1 and order[m][0] == 1:
            continue
        if check_swap(order, m) is None:
            cands.append(apply_swap(order, m))
    for m in range(2, len(order) + 1):
        blk = _block_swap(order, m)
        if blk is not None:
            cands.append(blk)
    cands += [apply_drop(order, p) for p in range(1, len(order) + 1)
              if order[p][0] not in (1, L)]
    n = 0
    for cand in cands:
        if cand.key() in seen:
            continue
        n += 1
        try:
            sched = solve(cand)
        except ScheduleUnavailableError:
            continue
        if sched.objective_value < target - 1e-9 * max(1.0, abs(target)):
            return cand, n
    return None


def optimize(network: Network, traffic: Traffic, config: OptimizeConfig = OptimizeConfig(),
             order: Optional[DecodingOrder] = None, keep_schedules: bool = False,
             verbose: bool = False) -> OptimizeReport:
    """Run the drop/swap search from ``order`` (greedy initialization by default)."""
    if order is None:
        order = initial_order(network, traffic, config)
    L = network.n_nodes
    cap = config.iteration_cap(traffic, network)
    scale = time_scale(network, traffic)

    def solve(o):
        return solve_order(network, traffic, o, config.objective, config.constraints,
                           kernel=config.kernel)

    try:
        schedule = solve(order)
    except ScheduleUnavailableError as exc:
        raise InfeasibleInstanceError(f"initial order is not schedulable ({exc.status.value})") from exc

    best = schedule
    trace: list[Step] = []
    kept = [schedule] if keep_schedules else []
    seen = {order.key()}
    prev_swapped = None
    prev_dropped = False
    reason = Termination.ITERATION_CAP
    solves = 1

    while True:
        val = schedule.objective_value
        if val <= best.objective_value + 1e-9 * max(1.0, abs(best.objective_value)):
            best = schedule
        zeros = zero_delta_indices(schedule, config.zero_tol, scale)

        drop_at = _drop_position(order, zeros, L)
        if drop_at is not None:
            step = Step(len(trace), order, val, "drop", dropped=order[drop_at])
            new_order = apply_drop(order, drop_at)
            prev_dropped, prev_swapped = True, None
        else:
            swaps = _pick_swaps(order, zeros, config.swap_all, seen if config.avoid_revisits else None,
                                config.prefer_cross_node)
            swapped = frozenset(frozenset((order[m - 1], order[m])) for m in swaps)
            stuck = not swaps or (swapped == prev_swapped and not prev_dropped)
            escaped = None
            if stuck and config.escape:
                escaped = _escape(order, best.objective_value, seen, solve)
                solves += escaped[1] if escaped else 0
            if stuck and escaped is None:
                trace.append(Step(len(trace), order, val, "terminate"))
                reason = Termination.FIXED_POINT
                break
            if escaped is not None:
                step = Step(len(trace), order, val, "escape")
                new_order = escaped[0]
            else:
                step = Step(len(trace), order, val, "swap", swaps=tuple(swaps))
                new_order = order
                for m in swaps:
                    new_order = apply_swap(new_order, m)
            prev_dropped, prev_swapped = False, swapped

        trace.append(step)
        if verbose:
            log.info(json.dumps(step.to_dict()))
        if config.detect_cycles and new_order.key() in seen:
            trace.append(Step(len(trace), new_order, val, "terminate"))
            reason = Termination.CYCLE_DETECTED
            break
        if solves >= cap:
            reason = Termination.ITERATION_CAP
            break
        seen.add(new_order.key())
        order = new_order
        try:
            schedule = solve(order)
        except ScheduleUnavailableError:
            # cannot happen in exact arithmetic; keep the best schedule found so far
            log.warning("LP became %s after a move; stopping", "unschedulable")
            reason = Termination.CYCLE_DETECTED
            break
        solves += 1
        if keep_schedules:
            kept.append(schedule)

    final = best
    try:
        final = earliest_schedule(network, traffic, relabel_by_delivery(best.order, traffic),
                                  config.objective, config.constraints, kernel=config.kernel)
    except ScheduleUnavailableError:
        log.warning("could not polish the final schedule; reporting the raw LP vertex")
    return OptimizeReport(final, trace, reason, kept)
