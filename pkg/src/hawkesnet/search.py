"""Greedy structure search over causal graphs with per-type score caching.

The penalized score decomposes over event types (each type's likelihood
share depends only on its own parent set, and the penalty is linear in the
edge count), so a move's score needs refits only for the types whose parent
sets changed: one type for an edge addition or deletion, two for a reversal.
Fits are memoized by (type, parent set); with deterministic per-(type,
parent-set) EM seeds a cache hit is bit-identical to a fresh refit.

The search starts from the empty graph and repeatedly applies the best
strictly improving single move (add / delete / reverse); ties go to the
first move in canonical (source, target, kind) order. It stops when no move
strictly improves the score.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .em import EmConfig, TypeFit, assemble_params, fit_type, type_seed
from .errors import InvalidInputError
from .events import DiscreteDataset
from .features import FeatureCache
from .likelihood import CausalGraph, ThpParams, bic_penalty

__all__ = [
    "Move",
    "SearchState",
    "SearchResult",
    "vicinity_moves",
    "vicinity",
    "apply_move",
    "score_candidate",
    "hill_climb",
]

_KIND_ORDER = {"add": 0, "delete": 1, "reverse": 2}


@dataclass(frozen=True)
class Move:
    """A single edit: add or delete ``edge``, or replace it by its reverse."""

    kind: str
    edge: tuple

    def __post_init__(self):
        if self.kind not in _KIND_ORDER:
            raise InvalidInputError(f"unknown move kind {self.kind!r}")

    def changed_types(self) -> tuple[int, ...]:
        src, dst = self.edge
        if self.kind == "reverse":
            return (dst, src) if dst != src else (dst,)
        return (dst,)

    def describe(self) -> str:
        src, dst = self.edge
        return f"{self.kind} {src}->{dst}"


def apply_move(graph: CausalGraph, move: Move) -> CausalGraph:
    src, dst = move.edge
    if move.kind == "add":
        if (src, dst) in graph.edges:
            raise InvalidInputError(f"cannot add existing edge {move.edge}")
        return graph.with_edge((src, dst))
    if move.kind == "delete":
        if (src, dst) not in graph.edges:
            raise InvalidInputError(f"cannot delete absent edge {move.edge}")
        return graph.without_edge((src, dst))
    if (src, dst) not in graph.edges or src == dst or (dst, src) in graph.edges:
        raise InvalidInputError(f"cannot reverse edge {move.edge}")
    return graph.with_reversed((src, dst))


def vicinity_moves(graph: CausalGraph, allow_cycles: bool = True) -> list[Move]:
    """All legal single moves, in canonical (source, target, kind) order.

    With ``allow_cycles=False`` moves whose result contains a directed cycle
    (self-loops included) are dropped.
    """
    moves: list[Move] = []
    n = graph.type_count
    for src in range(n):
        for dst in range(n):
            edge = (src, dst)
            if edge not in graph.edges:
                moves.append(Move("add", edge))
            else:
                moves.append(Move("delete", edge))
                if src != dst and (dst, src) not in graph.edges:
                    moves.append(Move("reverse", edge))
    if not allow_cycles:
        moves = [m for m in moves if not apply_move(graph, m).has_cycle()]
    return moves


def vicinity(graph: CausalGraph, allow_cycles: bool = True) -> list[CausalGraph]:
    """Neighbor graphs reachable by one move, in canonical move order."""
    return [apply_move(graph, m) for m in vicinity_moves(graph, allow_cycles)]


@dataclass
class SearchState:
    """Current graph, its per-type fits, and the fit memo shared by rounds."""

    graph: CausalGraph
    score: float
    fits: dict
    memo: dict
    em_config: EmConfig
    seed: int
    max_hops: int

    def fit_for(
        self, event_type: int, parents, cache: FeatureCache, dataset: DiscreteDataset
    ) -> TypeFit:
        key = (event_type, tuple(parents))
        hit = self.memo.get(key)
        if hit is None:
            hit = fit_type(
                event_type,
                parents,
                cache,
                dataset,
                self.em_config,
                type_seed(self.seed, event_type, parents),
            )
            self.memo[key] = hit
        return hit


def score_candidate(
    candidate: CausalGraph,
    state: SearchState,
    cache: FeatureCache,
    dataset: DiscreteDataset,
) -> float:
    """Penalized score of a candidate graph, reusing memoized type fits."""
    total = 0.0
    for v in range(candidate.type_count):
        total += state.fit_for(v, candidate.parents(v), cache, dataset).log_lik
    return total - bic_penalty(candidate, state.max_hops, cache.total_events)


@dataclass(frozen=True)
class SearchResult:
    graph: CausalGraph
    params: ThpParams
    score: float
    log_lik: float
    rounds: int
    trajectory: tuple
    fit_evaluations: int
    type_fits: tuple = field(repr=False)


def hill_climb(
    cache: FeatureCache,
    dataset: DiscreteDataset,
    *,
    em_config: EmConfig = EmConfig(),
    seed: int = 0,
    allow_cycles: bool = True,
    threads: int = 1,
    progress=None,
    trace_path: str | None = None,
) -> SearchResult:
    """Greedy single-move ascent from the empty graph.

    ``progress`` is an optional callable taking one line of text per round;
    ``trace_path`` appends one JSON object per round. ``threads`` > 1 scores
    a round's un-memoized refits concurrently; results are identical to the
    sequential run because every fit is a pure function of its key.
    """
    if threads < 1:
        raise InvalidInputError("threads must be >= 1")
    n_types = cache.type_count
    state = SearchState(
        graph=CausalGraph(n_types),
        score=0.0,
        fits={},
        memo={},
        em_config=em_config,
        seed=seed,
        max_hops=cache.max_hops,
    )
    for v in range(n_types):
        state.fits[v] = state.fit_for(v, (), cache, dataset)
    state.score = score_candidate(state.graph, state, cache, dataset)

    trace = open(trace_path, "w", encoding="utf-8") if trace_path else None
    trajectory = [state.score]
    rounds = 0
    try:
        while True:
            moves = vicinity_moves(state.graph, allow_cycles)
            if threads > 1:
                needed = []
                seen = set()
                for move in moves:
                    for v in move.changed_types():
                        key = (v, apply_move(state.graph, move).parents(v))
                        if key not in state.memo and key not in seen:
                            seen.add(key)
                            needed.append(key)
                if needed:
                    with ThreadPoolExecutor(max_workers=threads) as pool:
                        fits = pool.map(
                            lambda key: fit_type(
                                key[0],
                                key[1],
                                cache,
                                dataset,
                                em_config,
                                type_seed(seed, key[0], key[1]),
                            ),
                            needed,
                        )
                        for key, fitted in zip(needed, fits):
                            state.memo[key] = fitted

            best_move = None
            best_graph = None
            best_score = state.score
            for move in moves:
                candidate = apply_move(state.graph, move)
                score = score_candidate(candidate, state, cache, dataset)
                if score > best_score:  # strict: ties keep the earlier move
                    best_move, best_graph, best_score = move, candidate, score
            if best_move is None:
                break
            rounds += 1
            state.graph = best_graph
            state.score = best_score
            for v in best_move.changed_types():
                state.fits[v] = state.fit_for(
                    v, best_graph.parents(v), cache, dataset
                )
            trajectory.append(best_score)
            line = (
                f"round={rounds} move={best_move.describe()} "
                f"edges={best_graph.edge_count} score={best_score:.6f}"
            )
            if progress is not None:
                progress(line)
            if trace is not None:
                trace.write(
                    json.dumps(
                        {
                            "round": rounds,
                            "move": best_move.kind,
                            "edge": list(best_move.edge),
                            "edges": best_graph.edge_count,
                            "score": best_score,
                        },
                        sort_keys=True,
                    )
                    + "\n"
                )
    finally:
        if trace is not None:
            trace.close()

    fits = tuple(state.fits[v] for v in range(n_types))
    return SearchResult(
        graph=state.graph,
        params=assemble_params(fits, cache.max_hops),
        score=state.score,
        log_lik=float(sum(f.log_lik for f in fits)),
        rounds=rounds,
        trajectory=tuple(trajectory),
        fit_evaluations=len(state.memo),
        type_fits=fits,
    )
