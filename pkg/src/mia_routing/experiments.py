"""Monte-Carlo and arrival-sweep studies.

Trials are independent: trial ``k`` uses network seed ``base_seed + k`` (fed
to numpy's PCG64 through ``default_rng``), so the output depends only on the
configuration and never on the worker count.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .baselines import dijkstra_route, mia_on_route, multihop_time
from .formulation import AVERAGE_TIME, BandwidthMode, ConstraintSet
from .io import TRIAL_HEADER, write_csv
from .network import Network, NetworkParams, Traffic, generate_random_network
from .optimizer import OptimizeConfig, optimize
from .validator import require_valid

FILE_SIZE = 20.0
TOTAL_BANDWIDTH = 10.0


@dataclass(frozen=True)
class MonteCarloConfig:
    trials: int = 200
    nodes: int = 10
    splits: tuple = (1, 2, 3)
    mode: str = "per-node"
    seed: int = 0
    file_size: float = FILE_SIZE
    total_bandwidth: float = TOTAL_BANDWIDTH
    workers: int = 1
    optimizer: OptimizeConfig = field(default_factory=OptimizeConfig)
    keep_reports: bool = False  # attach optimizer reports to each record

    def __post_init__(self):
        object.__setattr__(self, "splits", tuple(int(n) for n in self.splits))
        object.__setattr__(self, "mode", BandwidthMode(self.mode).value)
        if self.trials < 1 or self.nodes < 2 or not self.splits or min(self.splits) < 1:
            raise ValueError("trials >= 1, nodes >= 2 and positive splits are required")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def network_params(self) -> NetworkParams:
        wt = self.total_bandwidth if self.mode == BandwidthMode.SUM.value else None
        return NetworkParams(total_bandwidth=wt)

    def optimize_config(self) -> OptimizeConfig:
        return replace(self.optimizer, constraints=replace(self.optimizer.constraints,
                                                           bandwidth_mode=self.mode))


@dataclass
class TrialRecord:
    seed: int
    n_packets: int
    mode: str
    objective: float
    dijkstra_nomia: float
    dijkstra_mia: float
    iters: int
    reason: str
    report: object = field(default=None, repr=False, compare=False)
    route_report: object = field(default=None, repr=False, compare=False)

    def row(self) -> list:
        return [getattr(self, h) for h in TRIAL_HEADER]


@dataclass
class MonteCarloResult:
    config: MonteCarloConfig
    records: list

    def values(self, column: str, n_packets: Optional[int] = None) -> np.ndarray:
        return np.array([getattr(r, column) for r in self.records
                         if n_packets is None or r.n_packets == n_packets], dtype=float)

    def cdfs(self) -> dict:
        """Empirical CDF per series: ``mia_N<n>``, ``dijkstra_mia_N<n>`` and ``dijkstra_nomia``."""
        out = {}
        for n in self.config.splits:
            out[f"mia_N{n}"] = ecdf(self.values("objective", n))
            out[f"dijkstra_mia_N{n}"] = ecdf(self.values("dijkstra_mia", n))
        out["dijkstra_nomia"] = ecdf(self.values("dijkstra_nomia", self.config.splits[0]))
        return out

    def to_csv(self) -> str:
        return write_csv((r.row() for r in self.records), TRIAL_HEADER)

    def cdf_csv(self) -> str:
        rows = [(name, v, f) for name, pairs in self.cdfs().items() for v, f in pairs]
        return write_csv(rows, ("series", "value", "fraction"))


def ecdf(values) -> list[tuple[float, float]]:
    """Sorted ``(value, fraction <= value)`` pairs, one per distinct value."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        return []
    uniq, idx = np.unique(v, return_index=True)
    counts = np.append(idx[1:], v.size)
    return [(float(x), float(c) / v.size) for x, c in zip(uniq, counts)]


def ecdf_at(pairs, x) -> float:
    """Evaluate a step CDF given as ``ecdf`` pairs."""
    frac = 0.0
    for v, f in pairs:
        if v > x:
            break
        frac = f
    return frac


def run_trial(config: MonteCarloConfig, trial: int) -> list[TrialRecord]:
    seed = config.seed + trial
    net = generate_random_network(config.nodes, seed, config.network_params())
    ocfg = config.optimize_config()
    route = dijkstra_route(net)
    sum_mode = config.mode == BandwidthMode.SUM.value
    nomia = multihop_time(route, config.file_size,
                          config.total_bandwidth if sum_mode else net.bandwidth(1))
    sub = net.subnetwork(route.nodes)
    out = []
    for n in config.splits:
        traffic = Traffic.single_file(config.file_size, n)
        rep = optimize(net, traffic, ocfg)
        require_valid(net, traffic, rep.schedule)
        on_route = mia_on_route(net, route, traffic, ocfg)
        require_valid(sub, traffic, on_route.schedule)
        rec = TrialRecord(seed, n, config.mode, rep.objective, nomia, on_route.objective,
                          rep.iterations, rep.reason.value)
        if config.keep_reports:
            rec.report, rec.route_report = rep, on_route
        out.append(rec)
    return out


def _trial_job(args):
    return run_trial(*args)


def run_montecarlo(config: MonteCarloConfig = MonteCarloConfig()) -> MonteCarloResult:
    jobs = [(config, k) for k in range(config.trials)]
    if config.workers == 1:
        chunks = [_trial_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            chunks = list(pool.map(_trial_job, jobs))  # map keeps trial order
    return MonteCarloResult(config, [r for chunk in chunks for r in chunk])


# --- arrivals ------------------------------------------------------------------

@dataclass(frozen=True)
class ArrivalConfig:
    network: Network
    files: int = 3
    splits: tuple = (1,)
    grid: tuple = tuple(float(x) for x in range(16))
    file_size: float = FILE_SIZE
    optimizer: OptimizeConfig = field(default_factory=lambda: OptimizeConfig(objective=AVERAGE_TIME))
    keep_reports: bool = False

    def __post_init__(self):
        splits = (self.splits,) if isinstance(self.splits, int) else tuple(self.splits)
        object.__setattr__(self, "splits", tuple(int(n) for n in splits))
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        if self.files < 1 or not self.splits or min(self.splits) < 1:
            raise ValueError("files >= 1 and positive splits are required")
        if any(x < 0 for x in self.grid):
            raise ValueError("inter-arrival times must be >= 0")


ARRIVAL_HEADER = ("inter_arrival", "n_packets", "average_time", "single_file_time")


@dataclass
class ArrivalPoint:
    inter_arrival: float
    n_packets: int
    average_time: float
    single_file_time: float
    report: object = field(default=None, repr=False, compare=False)


def single_file_time(network: Network, n_packets: int, file_size: float = FILE_SIZE,
                     config: OptimizeConfig = OptimizeConfig(objective=AVERAGE_TIME)) -> float:
    traffic = Traffic.single_file(file_size, n_packets)
    rep = optimize(network, traffic, config)
    require_valid(network, traffic, rep.schedule)
    return rep.objective


def run_arrival_sweep(config: ArrivalConfig) -> list[ArrivalPoint]:
    out = []
    for n in config.splits:
        t1 = single_file_time(config.network, n, config.file_size, config.optimizer)
        for ia in config.grid:
            traffic = Traffic.periodic(config.files, config.file_size, ia, n)
            rep = optimize(config.network, traffic, config.optimizer)
            require_valid(config.network, traffic, rep.schedule)
            out.append(ArrivalPoint(ia, n, rep.objective, t1,
                                    rep if config.keep_reports else None))
    return out


def arrival_csv(points: Sequence[ArrivalPoint]) -> str:
    return write_csv(([getattr(p, h) for h in ARRIVAL_HEADER] for p in points), ARRIVAL_HEADER)


def parse_grid(text: str) -> tuple[float, ...]:
    """``"a:step:b"`` (inclusive of ``b`` up to rounding) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid {text!r} is not a:step:b")
        a, step, b = (float(p) for p in parts)
        if step <= 0 or b < a:
            raise ValueError(f"grid {text!r} needs step > 0 and b >= a")
        n = int(np.floor((b - a) / step + 1e-9)) + 1
        return tuple(round(a + k * step, 12) for k in range(n))
    return tuple(float(p) for p in text.split(",") if p.strip())
