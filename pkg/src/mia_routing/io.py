"""JSON and CSV interchange for networks, schedules and trial records.

Network documents look like::

    {"nodes": [{"id": 1, "x": 0.2, "y": 0.2, "psd": 1.0, "bandwidth": 1.0}, ...],
     "noise_psd_half": 1.0, "total_bandwidth": 10.0,
     "channel": [[0, 2, ...], ...],
     "files": [{"size_bits": 20, "arrival_time": 0, "packet_count": 2}]}

``channel`` is optional when every node has coordinates (``x``/``y``, or a
``position`` pair); when present it wins
over the positions. ``files`` is optional.
"""
from __future__ import annotations

import csv
import io as _io
import json
from typing import Optional

import numpy as np

from .formulation import ConstraintSet, ObjectiveKind, ResourceSchedule
from .network import (FileSpec, InvalidParameterError, Network, NodeParams, Traffic,
                      channel_matrix_from_positions, gains_from_positions)
from .order import DecodingOrder, OrderError, validate


class ParseError(ValueError):
    def __init__(self, field: str, msg: str):
        super().__init__(f"{field}: {msg}")
        self.field = field


def _load(text_or_obj, what):
    if isinstance(text_or_obj, (str, bytes)):
        try:
            return json.loads(text_or_obj)
        except json.JSONDecodeError as exc:
            raise ParseError(what, f"invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return text_or_obj


def _get(obj, key, field, kind=None, default=...):
    if not isinstance(obj, dict):
        raise ParseError(field.rsplit(".", 1)[0] or field, "expected an object")
    if key not in obj:
        if default is ...:
            raise ParseError(field, "missing")
        return default
    v = obj[key]
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(field, f"expected a number, got {v!r}")
        return float(v)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ParseError(field, f"expected an integer, got {v!r}")
        return v
    if kind is list and not isinstance(v, list):
        raise ParseError(field, f"expected a list, got {type(v).__name__}")
    return v


def _opt_float(obj, key, field):
    v = _get(obj, key, field, default=None)
    return None if v is None else _get(obj, key, field, float)


def _matrix(rows, field, L):
    if not isinstance(rows, list) or len(rows) != L:
        raise ParseError(field, f"expected {L} rows")
    for k, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != L:
            raise ParseError(f"{field}[{k}]", f"expected {L} entries")
        for j, v in enumerate(row):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"{field}[{k}][{j}]", f"expected a number, got {v!r}")
    return np.array(rows, dtype=float)


# --- networks ----------------------------------------------------------------

def network_to_dict(network: Network, traffic: Optional[Traffic] = None) -> dict:
    nodes = []
    for n in network.nodes:
        d = {"id": n.id, "psd": n.psd, "bandwidth": n.bandwidth}
        if n.position is not None:
            d["x"], d["y"] = n.position
        if n.energy_budget is not None:
            d["energy_budget"] = n.energy_budget
        nodes.append(d)
    out = {"nodes": nodes, "noise_psd_half": network.noise_psd_half,
           "total_bandwidth": network.total_bandwidth, "total_energy": network.total_energy,
           "channel": network.channel.tolist()}
    if network.gains is not None:
        out["gains"] = network.gains.tolist()
    if traffic is not None:
        out["files"] = [{"size_bits": f.size_bits, "arrival_time": f.arrival_time,
                         "packet_count": f.packet_count} for f in traffic.files]
    return out


def emit_network(network: Network, traffic: Optional[Traffic] = None) -> str:
    return json.dumps(network_to_dict(network, traffic), indent=2)


def parse_network(text_or_obj) -> Network:
    obj = _load(text_or_obj, "network")
    raw = _get(obj, "nodes", "nodes", list)
    if len(raw) < 2:
        raise ParseError("nodes", "need at least two nodes")
    nodes = []
    for k, nd in enumerate(raw):
        f = f"nodes[{k}]"
        pos = _get(nd, "position", f + ".position", default=None)
        if pos is None and ("x" in nd or "y" in nd):
            pos = [_get(nd, "x", f + ".x", float), _get(nd, "y", f + ".y", float)]
        if pos is not None:
            if (not isinstance(pos, list) or len(pos) != 2
                    or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in pos)):
                raise ParseError(f + ".position", "expected [x, y]")
            pos = (float(pos[0]), float(pos[1]))
        kw = dict(id=_get(nd, "id", f + ".id", int, default=k + 1),
                  psd=_get(nd, "psd", f + ".psd", float, default=1.0),
                  bandwidth=_get(nd, "bandwidth", f + ".bandwidth", float, default=1.0),
                  position=pos,
                  energy_budget=_opt_float(nd, "energy_budget", f + ".energy_budget"))
        try:
            nodes.append(NodeParams(**kw))
        except InvalidParameterError as exc:
            raise ParseError(f, str(exc)) from exc
    L = len(nodes)
    n0 = _get(obj, "noise_psd_half", "noise_psd_half", float, default=1.0)
    exponent = _get(obj, "path_loss_exponent", "path_loss_exponent", float, default=2.0)
    gains = None
    if obj.get("channel") is not None:
        C = _matrix(obj["channel"], "channel", L)
        if obj.get("gains") is not None:
            gains = _matrix(obj["gains"], "gains", L)
    else:
        if any(n.position is None for n in nodes):
            raise ParseError("channel", "missing, and not every node has a position")
        try:
            C = channel_matrix_from_positions(nodes, n0, exponent)
        except (InvalidParameterError, ValueError) as exc:
            raise ParseError("nodes", str(exc)) from exc
        gains = gains_from_positions([n.position for n in nodes], exponent)
    try:
        return Network(nodes=tuple(nodes), channel=C, noise_psd_half=n0,
                       total_bandwidth=_opt_float(obj, "total_bandwidth", "total_bandwidth"),
                       total_energy=_opt_float(obj, "total_energy", "total_energy"),
                       gains=gains)
    except InvalidParameterError as exc:
        raise ParseError("network", str(exc)) from exc


def parse_traffic(text_or_obj) -> Optional[Traffic]:
    """The ``files`` section of a network document, or None when absent."""
    obj = _load(text_or_obj, "network")
    files = _get(obj, "files", "files", default=None)
    if files is None:
        return None
    if not isinstance(files, list) or not files:
        raise ParseError("files", "expected a non-empty list")
    specs = []
    for k, f in enumerate(files):
        fld = f"files[{k}]"
        try:
            specs.append(FileSpec(_get(f, "size_bits", fld + ".size_bits", float),
                                  _get(f, "arrival_time", fld + ".arrival_time", float, default=0.0),
                                  _get(f, "packet_count", fld + ".packet_count", int, default=1)))
        except InvalidParameterError as exc:
            raise ParseError(fld, str(exc)) from exc
    try:
        return Traffic(files=tuple(specs))
    except InvalidParameterError as exc:
        raise ParseError("files", str(exc)) from exc


# --- schedules ---------------------------------------------------------------

def schedule_to_dict(schedule: ResourceSchedule) -> dict:
    return {
        "n_nodes": schedule.order.n_nodes,
        "arrivals": list(schedule.order.arrivals),
        "order": [list(e) for e in schedule.order.events],
        "deltas": [float(d) for d in schedule.deltas],
        "event_times": [float(t) for t in schedule.event_times],
        "allocations": [{"node": i, "packet": c, "interval": s, "amount": float(a)}
                        for (i, c, s), a in sorted(schedule.allocations.items())],
        "objective": schedule.objective_value,
        "objective_kind": schedule.objective_kind.value,
        "constraints": {"bandwidth": schedule.constraints.bandwidth_mode.value,
                        "energy": schedule.constraints.energy_mode.value,
                        "overhead_epsilon": schedule.constraints.overhead_epsilon},
    }


def emit_schedule(schedule: ResourceSchedule) -> str:
    return json.dumps(schedule_to_dict(schedule), indent=2)


def parse_schedule(text_or_obj) -> ResourceSchedule:
    obj = _load(text_or_obj, "schedule")
    L = _get(obj, "n_nodes", "n_nodes", int)
    arrivals = _get(obj, "arrivals", "arrivals", list)
    events = _get(obj, "order", "order", list)
    for k, e in enumerate(events):
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(v, int) for v in e)):
            raise ParseError(f"order[{k}]", "expected [node, packet]")
    try:
        order = DecodingOrder(tuple(tuple(e) for e in events), L, tuple(float(a) for a in arrivals))
        validate(order)
    except (OrderError, TypeError, ValueError) as exc:
        raise ParseError("order", str(exc)) from exc
    deltas = _get(obj, "deltas", "deltas", list)
    if len(deltas) != len(order) or any(not isinstance(d, (int, float)) for d in deltas):
        raise ParseError("deltas", f"expected {len(order)} numbers")
    alloc = {}
    for k, a in enumerate(_get(obj, "allocations", "allocations", list)):
        f = f"allocations[{k}]"
        key = tuple(_get(a, name, f"{f}.{name}", int) for name in ("node", "packet", "interval"))
        alloc[key] = _get(a, "amount", f + ".amount", float)
    cons = _get(obj, "constraints", "constraints", default={})
    try:
        kind = ObjectiveKind(_get(obj, "objective_kind", "objective_kind", default="total-time"))
    except ValueError as exc:
        raise ParseError("objective_kind", str(exc)) from exc
    try:
        constraints = ConstraintSet(cons.get("bandwidth", "per-node"), cons.get("energy", "none"),
                                    float(cons.get("overhead_epsilon", 0.0)))
    except (ValueError, AttributeError) as exc:
        raise ParseError("constraints", str(exc)) from exc
    return ResourceSchedule(order, np.array(deltas, dtype=float), alloc,
                            _get(obj, "objective", "objective", float), kind, constraints)


def schedules_equal(a: ResourceSchedule, b: ResourceSchedule) -> bool:
    return (a.order == b.order and np.array_equal(a.deltas, b.deltas)
            and a.allocations == b.allocations and a.objective_value == b.objective_value
            and a.objective_kind == b.objective_kind and a.constraints == b.constraints)


# --- trial records -----------------------------------------------------------

TRIAL_HEADER = ("seed", "n_packets", "mode", "objective", "dijkstra_nomia", "dijkstra_mia",
                "iters", "reason")


def write_csv(rows, header, fh=None) -> str:
    """Write ``rows`` (sequences or dicts) under ``header``; returns the text when ``fh`` is None."""
    buf = fh if fh is not None else _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([r[h] for h in header] if isinstance(r, dict) else list(r))
    return buf.getvalue() if fh is None else ""


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(_io.StringIO(text)))
