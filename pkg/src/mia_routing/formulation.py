"""Resource-allocation LP for a fixed decoding order, and schedule extraction.

Variables are the inter-decoding intervals ``delta[s]`` (one per event), one
time-bandwidth product ``A[i, c, s]`` per transmit-eligible triple, and, for
the average-time objective, one completion-time epigraph variable per file.

A triple ``(i, c, s)`` is transmit-eligible when ``i`` is not the destination,
``i`` holds a decoding event for ``c``, and ``f(i, c) < s <= f(L, c)``.
Transmitting after the destination has decoded never helps, so those
variables are not created.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .network import Network, Traffic
from .order import DecodingOrder
from .simplex import EQ, GE, LE, LinearProgram, LpSolution, Status, solve_lp


class BandwidthMode(str, enum.Enum):
    PER_NODE = "per-node"
    SUM = "sum"


class EnergyMode(str, enum.Enum):
    NONE = "none"
    PER_NODE = "per-node"
    SUM = "sum"


class ObjectiveKind(str, enum.Enum):
    TOTAL_TIME = "total-time"
    AVERAGE_TIME = "avg-time"
    TOTAL_ENERGY = "energy"


class FormulationError(ValueError):
    pass


class ScheduleUnavailableError(RuntimeError):
    def __init__(self, status: Status):
        super().__init__(f"no schedule: LP status {status.value}")
        self.status = status


@dataclass(frozen=True)
class ConstraintSet:
    bandwidth_mode: BandwidthMode = BandwidthMode.PER_NODE
    energy_mode: EnergyMode = EnergyMode.NONE
    overhead_epsilon: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "bandwidth_mode", BandwidthMode(self.bandwidth_mode))
        object.__setattr__(self, "energy_mode", EnergyMode(self.energy_mode))
        if self.overhead_epsilon < 0:
            raise FormulationError("overhead_epsilon must be >= 0")

    def check(self, network: Network) -> None:
        if self.bandwidth_mode is BandwidthMode.SUM and network.total_bandwidth is None:
            raise FormulationError("sum bandwidth mode needs network.total_bandwidth")
        if self.energy_mode is EnergyMode.SUM and network.total_energy is None:
            raise FormulationError("sum energy mode needs network.total_energy")
        if self.energy_mode is EnergyMode.PER_NODE and all(
                n.energy_budget is None for n in network.nodes):
            raise FormulationError("per-node energy mode needs at least one energy_budget")


@dataclass(frozen=True)
class Objective:
    kind: ObjectiveKind = ObjectiveKind.TOTAL_TIME
    time_budget: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ObjectiveKind(self.kind))
        if self.kind is ObjectiveKind.TOTAL_ENERGY:
            if self.time_budget is None or not (0 < self.time_budget < np.inf):
                raise FormulationError("energy objective needs a finite positive time_budget")


TOTAL_TIME = Objective(ObjectiveKind.TOTAL_TIME)
AVERAGE_TIME = Objective(ObjectiveKind.AVERAGE_TIME)


@dataclass
class IndexMap:
    n_events: int
    alloc: dict  # (i, c, s) -> column
    file_time: dict = field(default_factory=dict)  # file -> column

    @property
    def n_vars(self) -> int:
        return self.n_events + len(self.alloc) + len(self.file_time)

    def delta(self, s: int) -> int:
        return s - 1


def eligible_triples(network: Network, order: DecodingOrder):
    L = network.n_nodes
    for i, c in order.events:
        if i == L:
            continue
        lo = order.position_of(i, c) + 1
        hi = order.position_of(L, c)
        for s in range(lo, hi + 1):
            yield i, c, s


def _check_inputs(network, traffic, order, constraints):
    if order.n_nodes != network.n_nodes:
        raise FormulationError("order and network disagree on the node count")
    if order.n_packets != traffic.n_packets:
        raise FormulationError("order and traffic disagree on the packet count")
    if tuple(order.arrivals) != traffic.arrivals():
        raise FormulationError("order arrivals do not match the traffic")
    constraints.check(network)


def build_lp(network: Network, traffic: Traffic, order: DecodingOrder,
             objective: Objective = TOTAL_TIME,
             constraints: ConstraintSet = ConstraintSet()) -> tuple[LinearProgram, IndexMap]:
    _check_inputs(network, traffic, order, constraints)
    L, M = network.n_nodes, len(order)
    C = network.channel
    alloc = {}
    col = M
    for t in eligible_triples(network, order):
        alloc[t] = col
        col += 1
    imap = IndexMap(M, alloc)
    if objective.kind is ObjectiveKind.AVERAGE_TIME:
        for ell in range(1, traffic.n_files + 1):
            imap.file_time[ell] = col
            col += 1
    n = imap.n_vars

    cost = np.zeros(n)
    if objective.kind is ObjectiveKind.TOTAL_TIME:
        cost[:M] = 1.0
    elif objective.kind is ObjectiveKind.AVERAGE_TIME:
        for v in imap.file_time.values():
            cost[v] = 1.0 / traffic.n_files
    else:
        for (i, c, s), v in alloc.items():
            cost[v] = network.psd(i)
    lp = LinearProgram(n, cost)

    by_packet: dict = {}
    for (i, c, s), v in alloc.items():
        by_packet.setdefault(c, []).append((i, s, v))

    # decoding: information accumulated at j for c by its decode event
    need = 1.0 + constraints.overhead_epsilon
    for j, c in order.events:
        if j == 1:
            continue
        fj = order.position_of(j, c)
        row = {}
        for i, s, v in by_packet.get(c, ()):
            if i != j and s <= fj and C[i - 1, j - 1] > 0:
                row[v] = C[i - 1, j - 1]
        lp.add(row, GE, need * traffic.packets[c - 1].size)

    # arrival: source event of c sits at the arrival time of its file
    for c in range(1, traffic.n_packets + 1):
        f1 = order.position_of(1, c)
        lp.add({s - 1: 1.0 for s in range(1, f1 + 1)}, EQ, traffic.packets[c - 1].arrival)

    # bandwidth
    if constraints.bandwidth_mode is BandwidthMode.PER_NODE:
        rows: dict = {}
        for (i, c, s), v in alloc.items():
            rows.setdefault((i, s), {})[v] = 1.0
        for (i, s), row in sorted(rows.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            row[s - 1] = -network.bandwidth(i)
            lp.add(row, LE, 0.0)
    else:
        rows = {}
        for (i, c, s), v in alloc.items():
            rows.setdefault(s, {})[v] = 1.0
        for s in sorted(rows):
            row = rows[s]
            row[s - 1] = -network.total_bandwidth
            lp.add(row, LE, 0.0)

    # energy
    if constraints.energy_mode is EnergyMode.PER_NODE:
        rows = {}
        for (i, c, s), v in alloc.items():
            rows.setdefault(i, {})[v] = network.psd(i)
        for i in sorted(rows):
            budget = network.nodes[i - 1].energy_budget
            if budget is not None:
                lp.add(rows[i], LE, budget)
    elif constraints.energy_mode is EnergyMode.SUM:
        lp.add({v: network.psd(i) for (i, c, s), v in alloc.items()}, LE, network.total_energy)

    # objective-specific rows
    if objective.kind is ObjectiveKind.AVERAGE_TIME:
        for p in traffic.packets:
            fL = order.position_of(L, p.id)
            row = {s - 1: -1.0 for s in range(1, fL + 1)}
            row[imap.file_time[p.file]] = 1.0
            lp.add(row, GE, -p.arrival)
    elif objective.kind is ObjectiveKind.TOTAL_ENERGY:
        lp.add({s: 1.0 for s in range(M)}, LE, objective.time_budget)

    return lp, imap


@dataclass
class ResourceSchedule:
    order: DecodingOrder
    deltas: np.ndarray
    allocations: dict  # (i, c, s) -> amount
    objective_value: float
    objective_kind: ObjectiveKind = ObjectiveKind.TOTAL_TIME
    constraints: ConstraintSet = field(default_factory=ConstraintSet)

    @property
    def event_times(self) -> np.ndarray:
        return np.cumsum(self.deltas)

    def time_of(self, node: int, packet: int) -> float:
        return float(self.event_times[self.order.position_of(node, packet) - 1])

    @property
    def total_time(self) -> float:
        return float(np.sum(self.deltas))

    def node_usage(self, node: int, interval: int) -> float:
        return sum(v for (i, c, s), v in self.allocations.items() if i == node and s == interval)

    def energy(self, network: Network) -> float:
        return sum(v * network.psd(i) for (i, c, s), v in self.allocations.items())


def extract_schedule(order: DecodingOrder, solution: LpSolution, imap: IndexMap,
                     objective: Objective = TOTAL_TIME,
                     constraints: ConstraintSet = ConstraintSet(),
                     tol: float = 1e-7) -> ResourceSchedule:
    if solution.status is not Status.OPTIMAL:
        raise ScheduleUnavailableError(solution.status)
    x = np.where((solution.x < 0) & (solution.x > -tol), 0.0, solution.x)
    deltas = x[:imap.n_events].copy()
    alloc = {t: float(x[v]) for t, v in imap.alloc.items()}
    return ResourceSchedule(order, deltas, alloc, float(solution.objective), objective.kind,
                            constraints)


def solve_order(network: Network, traffic: Traffic, order: DecodingOrder,
                objective: Objective = TOTAL_TIME,
                constraints: ConstraintSet = ConstraintSet(), kernel=None) -> ResourceSchedule:
    """Build, solve and extract in one call. Raises :class:`ScheduleUnavailableError`."""
    lp, imap = build_lp(network, traffic, order, objective, constraints)
    return extract_schedule(order, solve_lp(lp, kernel=kernel), imap, objective, constraints)


def earliest_schedule(network: Network, traffic: Traffic, order: DecodingOrder,
                      objective: Objective = TOTAL_TIME,
                      constraints: ConstraintSet = ConstraintSet(), kernel=None,
                      rel_slack: float = 1e-9) -> ResourceSchedule:
    """Optimal schedule for ``order`` whose decoding events happen as early as possible.

    The LP optimum is usually not unique in its intermediate event times. A
    second solve keeps the objective within ``rel_slack`` of its optimum and
    minimizes the sum of event times. The reported objective is the first-stage
    optimum.
    """
    lp, imap = build_lp(network, traffic, order, objective, constraints)
    first = solve_lp(lp, kernel=kernel)
    if first.status is not Status.OPTIMAL:
        raise ScheduleUnavailableError(first.status)
    best = first.objective
    M = imap.n_events
    second = LinearProgram(lp.n, np.zeros(lp.n), list(lp.constraints))
    second.objective[:M] = np.arange(M, 0, -1, dtype=float)
    second.add({j: v for j, v in enumerate(lp.objective) if v != 0}, LE,
               best + rel_slack * max(1.0, abs(best)))
    sol = solve_lp(second, kernel=kernel)
    if sol.status is not Status.OPTIMAL:
        sol = first
    sched = extract_schedule(order, sol, imap, objective, constraints)
    sched.objective_value = float(best)
    return sched


def time_scale(network: Network, traffic: Traffic) -> float:
    """Largest packet size over the weakest usable link: a natural unit of time."""
    C = network.channel
    pos = C[C > 0]
    if pos.size == 0:
        return 1.0
    return max(p.size for p in traffic.packets) / pos.min()


def zero_delta_indices(schedule: ResourceSchedule, zero_tol: float = 1e-7,
                       scale: float = 1.0) -> list[int]:
    """Positions ``m`` (1-based, ascending) whose interval is numerically zero.

    Position 1 never qualifies when its length is pinned by an arrival at time
    zero, since nothing can precede the first availability event.
    """
    out = []
    for m, d in enumerate(schedule.deltas, start=1):
        if d > zero_tol * scale:
            continue
        if m == 1 and schedule.order[1][0] == 1 and schedule.order.arrivals[schedule.order[1][1] - 1] == 0:
            continue
        out.append(m)
    return out
