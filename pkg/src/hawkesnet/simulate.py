"""Discrete-time simulator and benchmark dataset generator.

The simulator sweeps bins in order; at each bin it evaluates the model
intensity from the history so far and draws independent Poisson counts
``X[n, v, t] ~ Poisson(lam_v(n, t) * dt)`` for every (node, type) cell.
This is exactly the generative model the likelihood scores, so fitted and
generating parameters are directly comparable. Emitted timestamps sit at
bin centers ``(t + 0.5) * dt``.

With an exponential kernel the excitation state is the O(1) recursive
summary; other kernels keep a ring buffer of recent bin counts and apply
the kernel weights as a window. A guard aborts with
:class:`SimulationExplosionError` when any cell's expected count exceeds a
threshold, which is how supercritical parameterizations surface.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidInputError,
    SimulationExplosionError,
    UnderGenerationWarning,
)
from .events import EventRecord
from .kernels import (
    DecayKernel,
    ExponentialKernel,
    GaussianKernel,
    UniformKernel,
    evaluate,
    kernel_from_config,
    kernel_to_config,
)
from .likelihood import CausalGraph, ThpParams
from .topology import TopologyGraph, build_topology

__all__ = [
    "SimConfig",
    "BenchmarkData",
    "random_topology",
    "random_causal_graph",
    "draw_params",
    "simulate",
    "generate_benchmark",
]


@dataclass(frozen=True)
class SimConfig:
    """Benchmark generation settings.

    ``mu_range`` and ``alpha_range`` are uniform draw bounds; every
    (edge, hop) gets its own alpha draw. ``target_event_count`` stops the
    sweep once reached; ``max_bins`` caps the horizon (hitting the cap emits
    :class:`UnderGenerationWarning`).
    """

    node_count: int = 40
    avg_topology_degree: float = 1.5
    type_count: int = 20
    causal_avg_indegree: float = 1.5
    target_event_count: int = 20000
    mu_range: tuple = (5e-5, 1e-4)
    alpha_range: tuple = (0.03, 0.05)
    kernel: DecayKernel = ExponentialKernel(1.0)
    max_hops: int = 2
    bin_width: float = 1.0
    seed: int = 0
    explosion_guard: float = 1e6
    max_bins: int = 10_000_000

    def __post_init__(self):
        if self.node_count < 1 or self.type_count < 1:
            raise InvalidInputError("node_count and type_count must be >= 1")
        if self.avg_topology_degree < 0 or self.causal_avg_indegree < 0:
            raise InvalidInputError("average degrees must be >= 0")
        if self.target_event_count < 0:
            raise InvalidInputError("target_event_count must be >= 0")
        for name in ("mu_range", "alpha_range"):
            lo, hi = getattr(self, name)
            if not (0 <= lo <= hi):
                raise InvalidInputError(f"{name} must satisfy 0 <= lo <= hi")
            object.__setattr__(self, name, (float(lo), float(hi)))
        if self.max_hops < 0:
            raise InvalidInputError("max_hops must be >= 0")
        if not (self.bin_width > 0):
            raise InvalidInputError("bin_width must be positive")
        if self.seed < 0:
            raise InvalidInputError("seed must be >= 0")
        if not (self.explosion_guard > 0):
            raise InvalidInputError("explosion_guard must be positive")
        if self.max_bins < 1:
            raise InvalidInputError("max_bins must be >= 1")

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "avg_topology_degree": self.avg_topology_degree,
            "type_count": self.type_count,
            "causal_avg_indegree": self.causal_avg_indegree,
            "target_event_count": self.target_event_count,
            "mu_range": list(self.mu_range),
            "alpha_range": list(self.alpha_range),
            "kernel": kernel_to_config(self.kernel),
            "max_hops": self.max_hops,
            "bin_width": self.bin_width,
            "seed": self.seed,
            "explosion_guard": self.explosion_guard,
            "max_bins": self.max_bins,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidInputError(f"unknown simulate config keys {sorted(unknown)}")
        kwargs = dict(data)
        if "kernel" in kwargs and isinstance(kwargs["kernel"], dict):
            kwargs["kernel"] = kernel_from_config(kwargs["kernel"])
        if "mu_range" in kwargs:
            kwargs["mu_range"] = tuple(kwargs["mu_range"])
        if "alpha_range" in kwargs:
            kwargs["alpha_range"] = tuple(kwargs["alpha_range"])
        return cls(**kwargs)


@dataclass(frozen=True)
class BenchmarkData:
    """A generated dataset together with everything that produced it."""

    config: SimConfig
    topology: TopologyGraph
    causal_graph: CausalGraph
    params: ThpParams
    records: tuple
    horizon_bins: int

    @property
    def event_count(self) -> int:
        return len(self.records)


def _rng_of(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_topology(
    node_count: int,
    avg_degree: float,
    seed,
    max_hops: int = 0,
) -> TopologyGraph:
    """Erdos-Renyi undirected topology with expected degree ``avg_degree``."""
    if node_count < 1:
        raise InvalidInputError("node_count must be >= 1")
    if avg_degree < 0:
        raise InvalidInputError("avg_degree must be >= 0")
    rng = _rng_of(seed)
    edges = []
    if node_count > 1:
        prob = min(1.0, avg_degree / (node_count - 1))
        rows, cols = np.triu_indices(node_count, k=1)
        keep = rng.random(rows.shape[0]) < prob
        edges = list(zip(rows[keep].tolist(), cols[keep].tolist()))
    return build_topology(node_count, edges, max_hops=max_hops)


def random_causal_graph(type_count: int, avg_indegree: float, seed) -> CausalGraph:
    """Random DAG over types: uniform order, forward edges kept i.i.d.

    The keep probability is ``avg_indegree / ((type_count - 1) / 2)``
    (clipped to 1), the average number of candidate parents under a uniform
    order, so the expected in-degree matches ``avg_indegree``. No
    self-loops; always acyclic.
    """
    if type_count < 1:
        raise InvalidInputError("type_count must be >= 1")
    if avg_indegree < 0:
        raise InvalidInputError("avg_indegree must be >= 0")
    rng = _rng_of(seed)
    order = rng.permutation(type_count)
    edges = set()
    if type_count > 1:
        prob = min(1.0, avg_indegree / ((type_count - 1) / 2.0))
        for i in range(type_count):
            for j in range(i + 1, type_count):
                if rng.random() < prob:
                    edges.add((int(order[i]), int(order[j])))
    return CausalGraph(type_count, frozenset(edges))


def draw_params(
    graph: CausalGraph,
    max_hops: int,
    mu_range: tuple,
    alpha_range: tuple,
    seed,
) -> ThpParams:
    """Uniform parameter draws: one mu per type, one alpha per (edge, hop)."""
    rng = _rng_of(seed)
    mu = rng.uniform(mu_range[0], mu_range[1], size=graph.type_count)
    alpha = {
        edge: rng.uniform(alpha_range[0], alpha_range[1], size=max_hops + 1)
        for edge in sorted(graph.edges)
    }
    return ThpParams(mu=mu, alpha=alpha, max_hops=max_hops)


def _window_weights(kernel: DecayKernel, dt: float) -> np.ndarray:
    """Kernel values at lags ``dt, 2dt, ...`` out to where they vanish."""
    if isinstance(kernel, ExponentialKernel):
        horizon = max(1, math.ceil(37.0 / (kernel.decay * dt)))
    elif isinstance(kernel, GaussianKernel):
        horizon = max(1, math.ceil((kernel.mean + 8.5 * kernel.std) / dt))
    elif isinstance(kernel, UniformKernel):
        horizon = max(1, math.ceil((kernel.start + kernel.scale) / dt))
    else:
        raise InvalidInputError(f"unknown kernel {kernel!r}")
    lags = dt * np.arange(1, horizon + 1)
    weights = np.asarray(evaluate(kernel, lags), dtype=float)
    nonzero = np.flatnonzero(weights)
    if nonzero.size:
        weights = weights[: nonzero[-1] + 1]
    else:
        weights = weights[:1]
    return weights


def _sweep(
    causal_graph: CausalGraph,
    topology: TopologyGraph,
    params: ThpParams,
    kernel: DecayKernel,
    bin_width: float,
    rng: np.random.Generator,
    *,
    max_bins: int,
    stop_at_count: int | None,
    explosion_guard: float,
) -> tuple[list[EventRecord], int]:
    """Run the per-bin Poisson sweep; shared by both public entry points."""
    n_nodes = topology.node_count
    n_types = causal_graph.type_count
    dt = bin_width
    powers = topology.hop_matrices(params.max_hops)
    tensor = params.alpha_tensor()  # (src, dst, k)
    # operator[dst*N+m, src*N+n] = sum_k alpha[src,dst,k] * P^k[n,m]
    operator = (
        np.einsum("sdk,knm->dmsn", tensor, powers).reshape(
            n_types * n_nodes, n_types * n_nodes
        )
        * dt
    )
    mu_dt = np.repeat(params.mu, n_nodes) * dt
    size = n_types * n_nodes

    exponential = isinstance(kernel, ExponentialKernel)
    if exponential:
        decay_step = math.exp(-kernel.decay * dt)
        state = np.zeros(size)
    else:
        weights = _window_weights(kernel, dt)
        window = weights.shape[0]
        buffer = np.zeros((window, size))

    records: list[EventRecord] = []
    total = 0
    bins_run = 0
    for t in range(max_bins):
        if exponential:
            lam_dt = mu_dt + operator @ state
        else:
            depth = min(window, t)
            if depth:
                rows = (t - 1 - np.arange(depth)) % window
                summary = weights[:depth] @ buffer[rows]
                lam_dt = mu_dt + operator @ summary
            else:
                lam_dt = mu_dt.copy()
        peak = lam_dt.max() if size else 0.0
        if peak > explosion_guard:
            raise SimulationExplosionError(t, float(peak), explosion_guard)
        draws = rng.poisson(lam_dt)
        bins_run = t + 1
        if draws.any():
            stamp = (t + 0.5) * dt
            flat = np.flatnonzero(draws)
            # emit in (node, type) order within the bin
            flat = flat[np.lexsort((flat // n_nodes, flat % n_nodes))]
            for f in flat.tolist():
                count = int(draws[f])
                rec = EventRecord(
                    node=int(f % n_nodes),
                    event_type=int(f // n_nodes),
                    timestamp=stamp,
                )
                records.extend([rec] * count)
                total += count
        if exponential:
            state = decay_step * (state + draws)
        else:
            buffer[t % window] = draws
        if stop_at_count is not None and total >= stop_at_count:
            break
    return records, bins_run


def simulate(
    causal_graph: CausalGraph,
    topology: TopologyGraph,
    params: ThpParams,
    kernel: DecayKernel,
    bin_width: float,
    horizon_bins: int,
    seed,
    *,
    explosion_guard: float = 1e6,
) -> list[EventRecord]:
    """Simulate a fixed number of bins; returns bin-center event records."""
    params.validate_for(causal_graph)
    if horizon_bins < 0:
        raise InvalidInputError("horizon_bins must be >= 0")
    if not (bin_width > 0):
        raise InvalidInputError("bin_width must be positive")
    if not (explosion_guard > 0):
        raise InvalidInputError("explosion_guard must be positive")
    records, _ = _sweep(
        causal_graph,
        topology,
        params,
        kernel,
        bin_width,
        _rng_of(seed),
        max_bins=horizon_bins,
        stop_at_count=None,
        explosion_guard=explosion_guard,
    )
    return records


def generate_benchmark(config: SimConfig) -> BenchmarkData:
    """Draw topology, causal DAG, and parameters, then simulate to target.

    The sweep extends the horizon until ``target_event_count`` is reached or
    ``max_bins`` is hit (the latter warns with the shortfall).
    """
    root = np.random.SeedSequence(config.seed)
    topo_seed, graph_seed, par_seed, sweep_seed = root.spawn(4)
    topology = random_topology(
        config.node_count,
        config.avg_topology_degree,
        np.random.default_rng(topo_seed),
        max_hops=config.max_hops,
    )
    causal_graph = random_causal_graph(
        config.type_count, config.causal_avg_indegree, np.random.default_rng(graph_seed)
    )
    params = draw_params(
        causal_graph,
        config.max_hops,
        config.mu_range,
        config.alpha_range,
        np.random.default_rng(par_seed),
    )
    records, bins_run = _sweep(
        causal_graph,
        topology,
        params,
        config.kernel,
        config.bin_width,
        np.random.default_rng(sweep_seed),
        max_bins=config.max_bins,
        stop_at_count=config.target_event_count,
        explosion_guard=config.explosion_guard,
    )
    if len(records) < config.target_event_count:
        warnings.warn(
            f"hit max_bins={config.max_bins} with {len(records)} events, "
            f"target was {config.target_event_count}",
            UnderGenerationWarning,
        )
    return BenchmarkData(
        config=config,
        topology=topology,
        causal_graph=causal_graph,
        params=params,
        records=tuple(records),
        horizon_bins=bins_run,
    )
