"""Replay check of a schedule against the model, independent of the LP.

Only the schedule and the model parameters are read: every constraint is
re-derived by accumulating information and resource interval by interval.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from .formulation import BandwidthMode, EnergyMode, ResourceSchedule
from .network import Network, Traffic


@dataclass
class Finding:
    check: str
    where: str
    detail: str


@dataclass
class ValidationReport:
    checks: dict = field(default_factory=dict)  # check name -> passed
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def fail(self, check: str, where, detail: str) -> None:
        self.checks[check] = False
        self.failures.append(Finding(check, str(where), detail))

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": dict(self.checks),
                "failures": [asdict(f) for f in self.failures]}

    def __bool__(self):
        return self.ok


CHECKS = ("nonnegative", "eligibility", "decoding", "bandwidth", "energy", "arrival")


def replay(network: Network, traffic: Traffic, schedule: ResourceSchedule,
           rel_tol: float = 1e-6) -> ValidationReport:
    rep = ValidationReport({name: True for name in CHECKS})
    order = schedule.order
    L = network.n_nodes
    M = len(order)
    deltas = np.asarray(schedule.deltas, dtype=float)
    times = np.cumsum(deltas)
    horizon = max(1.0, float(times[-1]) if M else 1.0)
    pos = {e: s for s, e in enumerate(order.events, start=1)}

    if deltas.shape != (M,):
        rep.fail("nonnegative", "deltas", f"expected {M} intervals, got {deltas.shape}")
        return rep
    for s, d in enumerate(deltas, start=1):
        if d < -rel_tol * horizon:
            rep.fail("nonnegative", f"delta {s}", f"{d:.3g} < 0")
    for (i, c, s), a in schedule.allocations.items():
        if a < -rel_tol * horizon:
            rep.fail("nonnegative", (i, c, s), f"{a:.3g} < 0")

    # (2) a node transmits a packet only after decoding it; the destination never transmits
    for (i, c, s), a in schedule.allocations.items():
        if abs(a) <= rel_tol * horizon:
            continue
        if i == L:
            rep.fail("eligibility", (i, c, s), "destination transmits")
        elif (i, c) not in pos:
            rep.fail("eligibility", (i, c, s), f"node {i} never decodes packet {c}")
        elif s <= pos[(i, c)]:
            rep.fail("eligibility", (i, c, s), f"transmits before its decode at {pos[(i, c)]}")
        elif not 1 <= s <= M:
            rep.fail("eligibility", (i, c, s), "interval out of range")

    # (3) accumulated information at every decoding event
    C = network.channel
    need = 1.0 + schedule.constraints.overhead_epsilon
    got: dict = {}
    for (i, c, s), a in schedule.allocations.items():
        for j in range(1, L + 1):
            if j != i and C[i - 1, j - 1] > 0 and (j, c) in pos and s <= pos[(j, c)]:
                got[(j, c)] = got.get((j, c), 0.0) + a * C[i - 1, j - 1]
    for (j, c), s in pos.items():
        if j == 1:
            continue
        bits = need * traffic.packets[c - 1].size
        have = got.get((j, c), 0.0)
        if have < bits * (1.0 - rel_tol):
            rep.fail("decoding", (j, c), f"accumulated {have:.6g} of {bits:.6g} bits by position {s}")

    # (4) bandwidth
    usage = np.zeros((L + 1, M + 1))
    for (i, c, s), a in schedule.allocations.items():
        if 1 <= s <= M:
            usage[i, s] += a
    if schedule.constraints.bandwidth_mode is BandwidthMode.PER_NODE:
        for i in range(1, L + 1):
            W = network.bandwidth(i)
            for s in range(1, M + 1):
                cap = deltas[s - 1] * W
                if usage[i, s] > cap + rel_tol * max(cap, 1.0):
                    rep.fail("bandwidth", (i, s), f"uses {usage[i, s]:.6g} > {cap:.6g}")
    else:
        WT = network.total_bandwidth
        for s in range(1, M + 1):
            cap = deltas[s - 1] * WT
            tot = usage[:, s].sum()
            if tot > cap + rel_tol * max(cap, 1.0):
                rep.fail("bandwidth", s, f"uses {tot:.6g} > {cap:.6g}")

    # (5) energy
    spent = {i: usage[i].sum() * network.psd(i) for i in range(1, L + 1)}
    mode = schedule.constraints.energy_mode
    if mode is EnergyMode.PER_NODE:
        for i in range(1, L + 1):
            E = network.nodes[i - 1].energy_budget
            if E is not None and spent[i] > E + rel_tol * max(E, 1.0):
                rep.fail("energy", i, f"spends {spent[i]:.6g} > {E:.6g}")
    elif mode is EnergyMode.SUM:
        E = network.total_energy
        tot = sum(spent.values())
        if tot > E + rel_tol * max(E, 1.0):
            rep.fail("energy", "sum", f"spends {tot:.6g} > {E:.6g}")

    # (6) each source event sits at its arrival time
    for p in traffic.packets:
        if (1, p.id) not in pos:
            rep.fail("arrival", (1, p.id), "missing source event")
            continue
        t = times[pos[(1, p.id)] - 1]
        if abs(t - p.arrival) > rel_tol * max(p.arrival, 1.0):
            rep.fail("arrival", (1, p.id), f"available at {t:.6g}, arrives at {p.arrival:.6g}")
    return rep


class ScheduleRejectedError(RuntimeError):
    def __init__(self, report: ValidationReport):
        first = report.failures[0]
        super().__init__(f"schedule failed replay: {first.check} at {first.where}: {first.detail}")
        self.report = report


def require_valid(network: Network, traffic: Traffic, schedule: ResourceSchedule,
                  rel_tol: float = 1e-6) -> ValidationReport:
    """Replay ``schedule`` and raise :class:`ScheduleRejectedError` if anything fails."""
    rep = replay(network, traffic, schedule, rel_tol)
    if not rep.ok:
        raise ScheduleRejectedError(rep)
    return rep
