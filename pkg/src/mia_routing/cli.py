"""Command-line front end.

Exit codes: 0 success, 1 usage or input error, 2 infeasible instance.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io as mio
from .baselines import NoRouteError, dijkstra_route, mia_on_route, multihop_time
from .experiments import (ArrivalConfig, MonteCarloConfig, arrival_csv, parse_grid,
                          run_arrival_sweep, run_montecarlo)
from .formulation import ConstraintSet, FormulationError, Objective
from .network import InvalidParameterError, Traffic, diamond_network
from .optimizer import InfeasibleInstanceError, OptimizeConfig, optimize
from .validator import require_valid

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _splits(text):
    try:
        vals = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad split list {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("splits must be positive integers")
    return vals


def _grid(text):
    try:
        return parse_grid(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text)


def _load_instance(path, default_traffic=None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}")
    net = mio.parse_network(text)
    traffic = mio.parse_traffic(text) or default_traffic
    return net, traffic


def _emit_trace(rep, verbose):
    if verbose and rep.trace:
        sys.stderr.write(rep.trace_jsonl() + "\n")


def cmd_solve(args):
    net, traffic = _load_instance(args.network, Traffic.single_file(20.0, args.packets))
    objective = Objective(args.objective, args.time_budget)
    cons = ConstraintSet(args.bandwidth, args.energy, args.epsilon)
    rep = optimize(net, traffic, OptimizeConfig(objective=objective, constraints=cons))
    _emit_trace(rep, args.verbose)
    require_valid(net, traffic, rep.schedule)
    _write(mio.emit_schedule(rep.schedule), args.out)
    if args.trace:
        _write(rep.trace_jsonl(), args.trace)
    return EXIT_OK


def cmd_diamond(args):
    net = diamond_network()
    traffic = Traffic.single_file(20.0, args.packets)
    rep = optimize(net, traffic)
    _emit_trace(rep, args.verbose)
    require_valid(net, traffic, rep.schedule)
    s = rep.schedule
    lines = [f"objective {s.objective_value:.4f}"]
    for (i, c), t in zip(s.order.events, s.event_times):
        lines.append(f"node {i} decodes packet {c} at t={t:.4f}")
    _write("\n".join(lines), None)
    if args.out:
        _write(mio.emit_schedule(s), args.out)
    return EXIT_OK


def cmd_montecarlo(args):
    cfg = MonteCarloConfig(trials=args.trials, nodes=args.nodes, splits=args.splits,
                           mode=args.mode, seed=args.seed, workers=args.workers)
    res = run_montecarlo(cfg)
    _write(res.to_csv(), args.out)
    if args.cdf_out:
        _write(res.cdf_csv(), args.cdf_out)
    return EXIT_OK


def cmd_arrivals(args):
    net, _ = _load_instance(args.network)
    cfg = ArrivalConfig(network=net, files=args.files, splits=args.splits, grid=args.grid)
    _write(arrival_csv(run_arrival_sweep(cfg)), args.out)
    return EXIT_OK


def cmd_baseline(args):
    net, traffic = _load_instance(args.network, Traffic.single_file(20.0, 1))
    route = dijkstra_route(net)
    size = sum(f.size_bits for f in traffic.files)
    on_route = mia_on_route(net, route, traffic)
    require_valid(net.subnetwork(route.nodes), traffic, on_route.schedule)
    out = {"route": list(route.nodes), "cost_per_bit": route.cost,
           "multihop_time": multihop_time(route, size, net.bandwidth(1)),
           "mia_on_route_time": on_route.objective}
    _write(json.dumps(out, indent=2), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mia-routing", description="Cooperative relay routing with information accumulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="optimize one network document")
    s.add_argument("--network", required=True)
    s.add_argument("--objective", choices=["total-time", "avg-time", "energy"], default="total-time")
    s.add_argument("--bandwidth", choices=["per-node", "sum"], default="per-node")
    s.add_argument("--energy", choices=["none", "per-node", "sum"], default="none")
    s.add_argument("--time-budget", type=float, default=None, help="deadline for the energy objective")
    s.add_argument("--epsilon", type=float, default=0.0, help="decoding overhead")
    s.add_argument("--packets", type=int, default=1, help="split when the document has no files")
    s.add_argument("--out", default="-")
    s.add_argument("--trace", default=None, help="write the search trace as JSON lines")
    s.add_argument("-v", "--verbose", action="store_true")
    s.set_defaults(func=cmd_solve)

    d = sub.add_parser("diamond", help="the four-node diamond example")
    d.add_argument("--packets", type=int, default=2)
    d.add_argument("--out", default=None)
    d.add_argument("-v", "--verbose", action="store_true")
    d.set_defaults(func=cmd_diamond)

    m = sub.add_parser("montecarlo", help="random-network study")
    m.add_argument("--trials", type=int, default=200)
    m.add_argument("--nodes", type=int, default=10)
    m.add_argument("--splits", type=_splits, default=(1, 2, 3))
    m.add_argument("--mode", choices=["per-node", "sum"], default="per-node")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--workers", type=int, default=1)
    m.add_argument("--out", default="-")
    m.add_argument("--cdf-out", default=None)
    m.set_defaults(func=cmd_montecarlo)

    a = sub.add_parser("arrivals", help="inter-arrival sweep with the average-time objective")
    a.add_argument("--network", required=True)
    a.add_argument("--files", type=int, default=3)
    a.add_argument("--splits", type=_splits, default=(1,))
    a.add_argument("--grid", type=_grid, default=parse_grid("0:1:15"))
    a.add_argument("--out", default="-")
    a.set_defaults(func=cmd_arrivals)

    b = sub.add_parser("baseline", help="shortest-route baselines")
    b.add_argument("--network", required=True)
    b.add_argument("--out", default="-")
    b.set_defaults(func=cmd_baseline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleInstanceError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NoRouteError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (UsageError, mio.ParseError, FormulationError, InvalidParameterError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
