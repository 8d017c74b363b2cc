import json

import pytest

from mia_routing.io import (TRIAL_HEADER, ParseError, emit_network, emit_schedule, parse_network,
                            parse_schedule, parse_traffic, read_csv, schedules_equal, write_csv)
from mia_routing.network import FileSpec, NetworkParams, Traffic, diamond_network, generate_random_network
from mia_routing.optimizer import optimize


def test_diamond_roundtrip():
    d = diamond_network()
    assert parse_network(emit_network(d)) == d
    assert parse_traffic(emit_network(d)) is None


def test_random_network_roundtrip_with_files():
    net = generate_random_network(7, 9, NetworkParams(total_bandwidth=10))
    t = Traffic(files=(FileSpec(20, 0, 2), FileSpec(20, 4.5, 1)))
    text = emit_network(net, t)
    assert parse_network(text) == net
    assert parse_traffic(text) == t


def test_positions_only_and_channel_override():
    net = generate_random_network(5, 2)
    doc = json.loads(emit_network(net))
    doc.pop("channel")
    doc.pop("gains")
    assert parse_network(doc) == net
    doc["channel"] = [[0, 1, 0, 0, 0]] + [[0] * 5] * 4
    assert parse_network(doc).c(1, 2) == 1 and parse_network(doc).c(1, 5) == 0


def test_schedule_roundtrip():
    rep = optimize(diamond_network(), Traffic.single_file(20, 2))
    text = emit_schedule(rep.schedule)
    assert schedules_equal(parse_schedule(text), rep.schedule)
    doc = json.loads(text)
    assert set(doc) >= {"order", "deltas", "event_times", "allocations", "objective",
                        "objective_kind", "constraints"}
    assert set(doc["allocations"][0]) == {"node", "packet", "interval", "amount"}


@pytest.mark.parametrize("text,field", [
    ("{", "network"),
    ('{"nodes": 3}', "nodes"),
    ('{"nodes": [{"id": 1}, {"id": "two"}]}', "nodes[1].id"),
    ('{"nodes": [{}, {}]}', "channel"),
    ('{"nodes": [{}, {}], "channel": [[0, 1], [0]]}', "channel[1]"),
    ('{"nodes": [{}, {}], "channel": [[0, 1], [0, "a"]]}', "channel[1][1]"),
    ('{"nodes": [{"psd": -1}, {}], "channel": [[0, 1], [0, 0]]}', "nodes[0]"),
    ('{"nodes": [{"x": 0.1}, {}], "channel": [[0, 1], [0, 0]]}', "nodes[0].y"),
])
def test_network_parse_errors_name_field(text, field):
    with pytest.raises(ParseError) as exc:
        parse_network(text)
    assert exc.value.field == field
    assert field in str(exc.value)


@pytest.mark.parametrize("files,field", [
    ('[{"arrival_time": 0}]', "files[0].size_bits"),
    ('[{"size_bits": 20, "packet_count": 1.5}]', "files[0].packet_count"),
    ('[]', "files"),
    ('[{"size_bits": 5, "arrival_time": 3}, {"size_bits": 5, "arrival_time": 1}]', "files"),
])
def test_traffic_parse_errors(files, field):
    with pytest.raises(ParseError) as exc:
        parse_traffic('{"files": %s}' % files)
    assert exc.value.field == field


def test_schedule_parse_errors():
    rep = optimize(diamond_network(), Traffic.single_file(20, 2))
    doc = json.loads(emit_schedule(rep.schedule))
    bad = dict(doc, deltas=[1.0])
    with pytest.raises(ParseError, match="deltas"):
        parse_schedule(bad)
    bad = dict(doc, order=[[1, 1], [1, 1]])
    with pytest.raises(ParseError, match="order"):
        parse_schedule(bad)
    bad = dict(doc, allocations=[{"node": 1, "packet": 1, "interval": 2}])
    with pytest.raises(ParseError, match=r"allocations\[0\].amount"):
        parse_schedule(bad)


def test_csv_header_fixed():
    assert ",".join(TRIAL_HEADER) == "seed,n_packets,mode,objective,dijkstra_nomia,dijkstra_mia,iters,reason"
    text = write_csv([[1, 2, "sum", 1.5, 2.0, 1.8, 4, "FixedPoint"]], TRIAL_HEADER)
    rows = read_csv(text)
    assert text.splitlines()[0] == ",".join(TRIAL_HEADER)
    assert rows[0]["mode"] == "sum" and float(rows[0]["objective"]) == 1.5
