"""Network model: nodes, channel spectral efficiencies and traffic.

Nodes and packets carry 1-based labels throughout the public API. Node 1 is
the source and node ``L`` the destination. Channel matrices are 0-based numpy
arrays, so ``network.c(i, j)`` is the accessor to use with labels.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


class InvalidParameterError(ValueError):
    pass


class DegenerateGeometryError(ValueError):
    pass


SOURCE_POSITION = (0.2, 0.2)
DESTINATION_POSITION = (0.8, 0.8)


def spectral_efficiency(h, P, N0):
    """Shannon spectral efficiency ``log2(1 + h P / N0)`` in bits/sec/Hz.

    Bandwidth cancels out, so the value only depends on gain, transmit PSD and
    noise PSD. ``h`` may be an array.
    """
    if not P > 0:
        raise InvalidParameterError(f"psd must be positive, got {P}")
    if not N0 > 0:
        raise InvalidParameterError(f"noise psd must be positive, got {N0}")
    h = np.asarray(h, dtype=float)
    if np.any(h < 0):
        raise InvalidParameterError("channel gain must be non-negative")
    out = np.log2(1.0 + h * P / N0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class NodeParams:
    id: int
    psd: float = 1.0
    bandwidth: float = 1.0
    position: Optional[tuple[float, float]] = None
    energy_budget: Optional[float] = None

    def __post_init__(self):
        if not self.psd > 0:
            raise InvalidParameterError(f"node {self.id}: psd must be > 0")
        if self.bandwidth < 0:
            raise InvalidParameterError(f"node {self.id}: bandwidth must be >= 0")
        if self.energy_budget is not None and self.energy_budget < 0:
            raise InvalidParameterError(f"node {self.id}: energy_budget must be >= 0")
        if self.position is not None:
            object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Network:
    nodes: tuple[NodeParams, ...]
    channel: np.ndarray
    noise_psd_half: float = 1.0
    total_bandwidth: Optional[float] = None
    total_energy: Optional[float] = None
    gains: Optional[np.ndarray] = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        L = len(self.nodes)
        if L < 2:
            raise InvalidParameterError("a network needs at least a source and a destination")
        for k, node in enumerate(self.nodes, start=1):
            if node.id != k:
                raise InvalidParameterError(f"node ids must be 1..L in order; found {node.id} at slot {k}")
        C = _frozen(self.channel)
        if C.shape != (L, L):
            raise InvalidParameterError(f"channel must be {L}x{L}, got {C.shape}")
        if np.any(C < 0) or not np.all(np.isfinite(C)):
            raise InvalidParameterError("spectral efficiencies must be finite and non-negative")
        if np.any(np.diag(C) != 0):
            raise InvalidParameterError("channel diagonal must be zero")
        object.__setattr__(self, "channel", C)
        if self.gains is not None:
            G = _frozen(self.gains)
            if G.shape != (L, L):
                raise InvalidParameterError(f"gains must be {L}x{L}, got {G.shape}")
            object.__setattr__(self, "gains", G)
        if not self.noise_psd_half > 0:
            raise InvalidParameterError("noise_psd_half must be > 0")
        for name in ("total_bandwidth", "total_energy"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise InvalidParameterError(f"{name} must be >= 0")

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def destination(self) -> int:
        return len(self.nodes)

    def c(self, i: int, j: int) -> float:
        """Spectral efficiency of link ``i -> j`` using 1-based labels."""
        return float(self.channel[i - 1, j - 1])

    def psd(self, i: int) -> float:
        return self.nodes[i - 1].psd

    def bandwidth(self, i: int) -> float:
        return self.nodes[i - 1].bandwidth

    def subnetwork(self, labels: Sequence[int]) -> "Network":
        """Restrict to ``labels`` (source first, destination last), relabelled 1..k."""
        labels = list(labels)
        if labels[0] != 1 or labels[-1] != self.destination:
            raise InvalidParameterError("subnetwork must keep the source first and destination last")
        idx = [k - 1 for k in labels]
        nodes = [
            NodeParams(id=n, psd=self.nodes[k].psd, bandwidth=self.nodes[k].bandwidth,
                       position=self.nodes[k].position, energy_budget=self.nodes[k].energy_budget)
            for n, k in enumerate(idx, start=1)
        ]
        gains = None if self.gains is None else self.gains[np.ix_(idx, idx)]
        return Network(nodes=tuple(nodes), channel=self.channel[np.ix_(idx, idx)],
                       noise_psd_half=self.noise_psd_half, total_bandwidth=self.total_bandwidth,
                       total_energy=self.total_energy, gains=gains)

    def replace(self, **changes) -> "Network":
        kw = dict(nodes=self.nodes, channel=self.channel, noise_psd_half=self.noise_psd_half,
                  total_bandwidth=self.total_bandwidth, total_energy=self.total_energy,
                  gains=self.gains)
        kw.update(changes)
        return Network(**kw)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        same_gains = (self.gains is None and other.gains is None) or (
            self.gains is not None and other.gains is not None
            and np.array_equal(self.gains, other.gains))
        return (self.nodes == other.nodes and np.array_equal(self.channel, other.channel)
                and self.noise_psd_half == other.noise_psd_half
                and self.total_bandwidth == other.total_bandwidth
                and self.total_energy == other.total_energy and same_gains)

    __hash__ = None


def gains_from_positions(positions, exponent=2.0) -> np.ndarray:
    pts = np.asarray(positions, dtype=float)
    d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(axis=-1))
    off = ~np.eye(len(pts), dtype=bool)
    if np.any(d[off] == 0):
        raise DegenerateGeometryError("two nodes share a position")
    g = np.zeros_like(d)
    g[off] = d[off] ** (-exponent)
    return g


def channel_matrix_from_positions(nodes: Sequence[NodeParams], noise_psd_half: float,
                                  exponent: float = 2.0) -> np.ndarray:
    """Spectral-efficiency matrix for nodes placed in the plane with ``h = d**-exponent``.

    Row ``i`` uses the transmit PSD of node ``i``. The diagonal is zero.
    """
    if any(n.position is None for n in nodes):
        raise InvalidParameterError("every node needs a position")
    if len(nodes) == 1:
        return np.zeros((1, 1))
    g = gains_from_positions([n.position for n in nodes], exponent)
    N0 = 2.0 * noise_psd_half
    psd = np.array([n.psd for n in nodes])[:, None]
    if not N0 > 0:
        raise InvalidParameterError("noise_psd_half must be > 0")
    C = np.log2(1.0 + g * psd / N0)
    np.fill_diagonal(C, 0.0)
    return C


@dataclass(frozen=True)
class NetworkParams:
    """Knobs for random unit-square instances. Defaults follow the standard study setup."""
    psd: float = 1.0
    bandwidth: float = 1.0
    noise_psd_half: float = 1.0
    total_bandwidth: Optional[float] = None
    path_loss_exponent: float = 2.0


def network_from_positions(positions, params: NetworkParams = NetworkParams()) -> Network:
    nodes = tuple(NodeParams(id=k, psd=params.psd, bandwidth=params.bandwidth, position=tuple(p))
                  for k, p in enumerate(positions, start=1))
    gains = gains_from_positions(positions, params.path_loss_exponent)
    C = channel_matrix_from_positions(nodes, params.noise_psd_half, params.path_loss_exponent)
    return Network(nodes=nodes, channel=C, noise_psd_half=params.noise_psd_half,
                   total_bandwidth=params.total_bandwidth, gains=gains)


def generate_random_network(n_nodes: int, seed: int,
                            params: NetworkParams = NetworkParams()) -> Network:
    """Source at (0.2, 0.2), destination at (0.8, 0.8), relays uniform in the unit square.

    Relay coordinates come from ``numpy.random.default_rng(seed)`` (PCG64 seeded
    through ``SeedSequence``), so the result is a pure function of the arguments.
    """
    if n_nodes < 2:
        raise InvalidParameterError("n_nodes must be >= 2")
    rng = np.random.default_rng(seed)
    relays = rng.uniform(0.0, 1.0, size=(n_nodes - 2, 2))
    positions = [SOURCE_POSITION, *map(tuple, relays), DESTINATION_POSITION]
    return network_from_positions(positions, params)


def diamond_network() -> Network:
    """Four-node diamond: 1->2 at 2, 1->3 at 1, 2->4 at 1, 3->4 at 2 bits/sec/Hz.

    Routes 1-2-4 and 1-3-4 cost the same per bit; all other links are absent.
    """
    C = np.zeros((4, 4))
    C[0, 1], C[0, 2], C[1, 3], C[2, 3] = 2.0, 1.0, 1.0, 2.0
    nodes = tuple(NodeParams(id=k, psd=1.0, bandwidth=1.0) for k in range(1, 5))
    return Network(nodes=nodes, channel=C, noise_psd_half=1.0)


# --- traffic ---------------------------------------------------------------

@dataclass(frozen=True)
class FileSpec:
    size_bits: float
    arrival_time: float = 0.0
    packet_count: int = 1

    def __post_init__(self):
        if not self.size_bits > 0:
            raise InvalidParameterError("file size must be > 0")
        if self.arrival_time < 0:
            raise InvalidParameterError("arrival time must be >= 0")
        if int(self.packet_count) != self.packet_count or self.packet_count < 1:
            raise InvalidParameterError("packet_count must be a positive integer")


@dataclass(frozen=True)
class Packet:
    id: int
    file: int
    size: float
    arrival: float


@dataclass(frozen=True)
class Traffic:
    files: tuple[FileSpec, ...]
    packets: tuple[Packet, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        files = tuple(self.files)
        if not files:
            raise InvalidParameterError("traffic needs at least one file")
        for a, b in zip(files, files[1:]):
            if b.arrival_time < a.arrival_time:
                raise InvalidParameterError("file arrival times must be non-decreasing")
        object.__setattr__(self, "files", files)
        packets = []
        for ell, f in enumerate(files, start=1):
            # equal real-valued split; the last packet absorbs rounding so sizes sum exactly
            n = f.packet_count
            base = f.size_bits / n
            head = [base] * (n - 1)
            sizes = head + [f.size_bits - sum(head)]
            for size in sizes:
                packets.append(Packet(id=len(packets) + 1, file=ell, size=size, arrival=f.arrival_time))
        object.__setattr__(self, "packets", tuple(packets))

    @classmethod
    def single_file(cls, size_bits: float, n_packets: int = 1, arrival_time: float = 0.0) -> "Traffic":
        return cls(files=(FileSpec(size_bits, arrival_time, n_packets),))

    @classmethod
    def periodic(cls, n_files: int, size_bits: float, inter_arrival: float,
                 n_packets: int = 1) -> "Traffic":
        return cls(files=tuple(FileSpec(size_bits, k * inter_arrival, n_packets)
                               for k in range(n_files)))

    @property
    def n_packets(self) -> int:
        return len(self.packets)

    @property
    def n_files(self) -> int:
        return len(self.files)

    def arrivals(self) -> tuple[float, ...]:
        return tuple(p.arrival for p in self.packets)

    def packets_of(self, ell: int) -> list[Packet]:
        return [p for p in self.packets if p.file == ell]

    def scaled(self, alpha: float) -> "Traffic":
        return Traffic(files=tuple(FileSpec(f.size_bits * alpha, f.arrival_time, f.packet_count)
                                   for f in self.files))
