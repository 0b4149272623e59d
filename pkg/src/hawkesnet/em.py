"""EM fitting of the rate parameters for a fixed causal graph.

Each event at an occupied cell is softly attributed to its possible origins:
the background rate of its own type, or an (edge, hop) excitation channel.
The E-step computes those responsibilities; the M-step turns the weighted
counts into closed-form updates:

    mu_v    <- sum_cells q_bg * X / (node_count * bin_count * dt)
    alpha_e <- sum_cells q_e  * X / (totals_e * dt)

Because the responsibilities of all source events of a given (cause type,
hop) channel enter only through their sum, the per-source attribution is
never materialized; the aggregated weight is ``alpha * feature / lam``.

Event types are coupled only through shared features, never through shared
parameters, so each type is fitted independently; a joint trajectory is the
per-iteration sum. Per-iteration log-likelihood is nondecreasing (standard
EM guarantee for this Poisson mixture).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateModelError, InvalidInputError
from .events import DiscreteDataset
from .features import FeatureCache
from .likelihood import CausalGraph, ThpParams, _check_dims

__all__ = [
    "EmConfig",
    "TypeFit",
    "FitResult",
    "Responsibilities",
    "type_seed",
    "e_step",
    "m_step",
    "fit_type",
    "fit",
]

# initialization draws: mu ~ U(0.5, 1.5) * empirical rate, alpha ~ U(0, 0.1)
_MU_INIT_RANGE = (0.5, 1.5)
_ALPHA_INIT_RANGE = (0.0, 0.1)


@dataclass(frozen=True)
class EmConfig:
    """Stopping and restart policy for the EM loop."""

    max_iterations: int = 100
    rel_tolerance: float = 1e-6
    restarts: int = 1

    def __post_init__(self):
        if self.max_iterations < 1:
            raise InvalidInputError("max_iterations must be >= 1")
        if not (self.rel_tolerance >= 0):
            raise InvalidInputError("rel_tolerance must be >= 0")
        if self.restarts < 1:
            raise InvalidInputError("restarts must be >= 1")


@dataclass(frozen=True)
class TypeFit:
    """Fitted parameters and likelihood share of a single event type."""

    event_type: int
    parents: tuple
    mu: float
    alpha: np.ndarray = field(repr=False)  # (len(parents), max_hops + 1)
    log_lik: float
    trajectory: tuple
    iterations: int
    converged: bool


@dataclass(frozen=True)
class FitResult:
    """Joint fit over all types."""

    params: ThpParams
    log_lik: float
    trajectory: tuple
    iterations: int
    converged: bool
    type_fits: tuple


@dataclass(frozen=True)
class Responsibilities:
    """E-step soft attributions at every occupied cell.

    ``background[v][i]`` is the probability the i-th occupied cell's events
    of type ``v`` came from the background; ``excitation[v][i, j, k]`` the
    aggregated weight of parent ``parents[v][j]`` at hop ``k``. For every
    cell the background weight plus the excitation weights sum to 1.
    """

    graph: CausalGraph
    background: tuple
    excitation: tuple
    parents: tuple


def type_seed(seed: int, event_type: int, parents) -> np.random.SeedSequence:
    """Deterministic per-(type, parent-set) seed.

    A fit is a pure function of (data, type, parents, seed): the same parent
    set always draws the same initialization, so cached scores and fresh
    refits agree bit for bit.
    """
    parents = tuple(int(p) for p in parents)
    return np.random.SeedSequence(
        entropy=(int(seed), int(event_type), len(parents)) + parents
    )


def e_step(
    params: ThpParams,
    graph: CausalGraph,
    cache: FeatureCache,
    dataset: DiscreteDataset,
) -> Responsibilities:
    """Compute responsibilities under the current parameters.

    Raises :class:`DegenerateModelError` if any occupied cell has zero
    intensity.
    """
    _check_dims(params, graph, cache)
    background = []
    excitation = []
    parent_lists = []
    for v in range(graph.type_count):
        parents = graph.parents(v)
        feats, counts = cache.features_for(v, parents)
        alpha = np.stack(
            [params.alpha[(c, v)] for c in parents], axis=0
        ) if parents else np.zeros((0, cache.max_hops + 1))
        lam = params.mu[v] + np.einsum("ipk,pk->i", feats, alpha)
        if np.any(lam[counts > 0] <= 0.0):
            raise DegenerateModelError(
                f"zero intensity at an occupied cell of type {v}"
            )
        safe = np.where(lam > 0, lam, 1.0)
        background.append(np.where(lam > 0, params.mu[v] / safe, 0.0))
        excitation.append(alpha[None, :, :] * feats / safe[:, None, None])
        parent_lists.append(parents)
    return Responsibilities(
        graph=graph,
        background=tuple(background),
        excitation=tuple(excitation),
        parents=tuple(parent_lists),
    )


def m_step(
    resp: Responsibilities,
    cache: FeatureCache,
    dataset: DiscreteDataset,
) -> ThpParams:
    """Closed-form parameter update from responsibilities."""
    graph = resp.graph
    dt = cache.bin_width
    cells_total = cache.node_count * cache.bin_count
    mu = np.zeros(graph.type_count)
    alpha: dict = {}
    for v in range(graph.type_count):
        counts = cache.type_counts[v]
        mu[v] = (resp.background[v] * counts).sum() / (cells_total * dt)
        parents = resp.parents[v]
        if not parents:
            continue
        weighted = np.einsum("ipk,i->pk", resp.excitation[v], counts)
        denom = cache.totals_for(parents) * dt  # (P, K+1)
        updated = np.where(denom > 0, weighted / np.where(denom > 0, denom, 1.0), 0.0)
        for j, c in enumerate(parents):
            alpha[(c, v)] = updated[j]
    return ThpParams(mu=mu, alpha=alpha, max_hops=cache.max_hops)


def fit_type(
    event_type: int,
    parents,
    cache: FeatureCache,
    dataset: DiscreteDataset,
    config: EmConfig = EmConfig(),
    seed=0,
) -> TypeFit:
    """Fit ``mu`` and the incoming ``alpha`` of one event type.

    ``seed`` may be an int or a :class:`numpy.random.SeedSequence`. With
    multiple restarts the best final log-likelihood wins.
    """
    parents = tuple(sorted(int(p) for p in parents))
    feats, counts = cache.features_for(event_type, parents)
    n_cells = counts.shape[0]
    n_dims = feats.shape[1] * feats.shape[2]
    flat = feats.reshape(n_cells, n_dims)
    tot = cache.totals_for(parents).reshape(-1)
    dt = cache.bin_width
    cells_total = cache.node_count * cache.bin_count

    if n_cells == 0:
        # no events of this type: rates collapse to zero, contribution 0
        return TypeFit(
            event_type=event_type,
            parents=parents,
            mu=0.0,
            alpha=np.zeros((len(parents), cache.max_hops + 1)),
            log_lik=0.0,
            trajectory=(0.0,),
            iterations=0,
            converged=True,
        )

    if isinstance(seed, np.random.SeedSequence):
        root = seed
    else:
        root = np.random.SeedSequence(int(seed))
    empirical_rate = counts.sum() / (cells_total * dt)
    alpha_active = tot > 0

    best: tuple | None = None
    for child in root.spawn(config.restarts):
        rng = np.random.default_rng(child)
        mu = rng.uniform(*_MU_INIT_RANGE) * empirical_rate
        alpha = rng.uniform(*_ALPHA_INIT_RANGE, size=n_dims)
        alpha[~alpha_active] = 0.0

        trajectory = []
        converged = False
        prev = None
        for _ in range(config.max_iterations):
            lam = mu + flat @ alpha
            if np.any(lam <= 0.0):
                raise DegenerateModelError(
                    f"zero intensity at an occupied cell of type {event_type}"
                )
            current = counts @ np.log(lam) - dt * (mu * cells_total + alpha @ tot)
            trajectory.append(float(current))
            if prev is not None and abs(current - prev) <= config.rel_tolerance * (
                abs(prev) + 1.0
            ):
                converged = True
                break
            prev = current
            ratio = counts / lam
            mu = mu * ratio.sum() / (cells_total * dt)
            alpha = np.where(
                alpha_active, alpha * (flat.T @ ratio) / np.where(alpha_active, tot * dt, 1.0), 0.0
            )
        else:
            # ran out of iterations after an update: score the final point
            lam = mu + flat @ alpha
            current = counts @ np.log(lam) - dt * (mu * cells_total + alpha @ tot)
            trajectory.append(float(current))
        candidate = (float(current), mu, alpha, trajectory, converged)
        if best is None or candidate[0] > best[0]:
            best = candidate

    final_ll, mu, alpha, trajectory, converged = best
    return TypeFit(
        event_type=event_type,
        parents=parents,
        mu=float(mu),
        alpha=alpha.reshape(len(parents), cache.max_hops + 1),
        log_lik=final_ll,
        trajectory=tuple(trajectory),
        iterations=len(trajectory),
        converged=converged,
    )


def assemble_params(type_fits, max_hops: int) -> ThpParams:
    """Combine per-type fits into one :class:`ThpParams`."""
    fits = sorted(type_fits, key=lambda f: f.event_type)
    mu = np.array([f.mu for f in fits])
    alpha = {}
    for f in fits:
        for j, c in enumerate(f.parents):
            alpha[(c, f.event_type)] = f.alpha[j]
    return ThpParams(mu=mu, alpha=alpha, max_hops=max_hops)


def fit(
    graph: CausalGraph,
    cache: FeatureCache,
    dataset: DiscreteDataset,
    config: EmConfig = EmConfig(),
    seed: int = 0,
) -> FitResult:
    """Fit all types of a fixed graph; trajectory is the per-iteration sum.

    Shorter per-type trajectories are padded with their final value, so the
    summed trajectory keeps the nondecreasing property.
    """
    if graph.type_count != cache.type_count:
        raise InvalidInputError(
            f"graph covers {graph.type_count} types, cache {cache.type_count}"
        )
    fits = [
        fit_type(
            v,
            graph.parents(v),
            cache,
            dataset,
            config,
            type_seed(seed, v, graph.parents(v)),
        )
        for v in range(graph.type_count)
    ]
    length = max(f.iterations if f.iterations > 0 else 1 for f in fits)
    joint = np.zeros(length)
    for f in fits:
        traj = np.asarray(f.trajectory if f.trajectory else (0.0,))
        joint[: traj.shape[0]] += traj
        joint[traj.shape[0] :] += traj[-1]
    return FitResult(
        params=assemble_params(fits, cache.max_hops),
        log_lik=float(sum(f.log_lik for f in fits)),
        trajectory=tuple(float(x) for x in joint),
        iterations=length,
        converged=all(f.converged for f in fits),
        type_fits=tuple(fits),
    )
