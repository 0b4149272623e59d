"""Event records and their discretization into sparse per-bin counts.

Continuous-time event records ``(node, event_type, timestamp)`` are binned on
a regular grid of width ``bin_width`` by flooring ``timestamp / bin_width``.
Counts are stored sparsely as parallel arrays sorted by (type, bin, node);
every downstream computation (features, likelihood, EM) touches only the
occupied cells plus closed-form totals, so empty bins cost nothing.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "EventRecord",
    "DiscreteDataset",
    "discretize",
    "load_events_csv",
    "save_events_csv",
]

EVENTS_HEADER = ("node", "event_type", "timestamp")


@dataclass(frozen=True)
class EventRecord:
    """One event: which node fired, which type, and when."""

    node: int
    event_type: int
    timestamp: float


@dataclass(frozen=True)
class DiscreteDataset:
    """Sparse per-bin event counts on a fixed (node, type, bin) grid.

    ``nodes``, ``types``, ``bins`` and ``counts`` are parallel arrays, one row
    per occupied cell, sorted lexicographically by (type, bin, node). Cells
    not listed hold zero events.
    """

    node_count: int
    type_count: int
    bin_count: int
    bin_width: float
    nodes: np.ndarray = field(repr=False)
    types: np.ndarray = field(repr=False)
    bins: np.ndarray = field(repr=False)
    counts: np.ndarray = field(repr=False)

    @property
    def total_events(self) -> int:
        return int(self.counts.sum())

    @property
    def horizon_end(self) -> float:
        return self.bin_count * self.bin_width

    def type_rows(self, event_type: int) -> slice:
        """Row range of ``event_type`` in the sorted cell arrays."""
        lo = int(np.searchsorted(self.types, event_type, side="left"))
        hi = int(np.searchsorted(self.types, event_type, side="right"))
        return slice(lo, hi)

    def events_per_type(self) -> np.ndarray:
        """Total event count of each type, shape ``(type_count,)``."""
        totals = np.zeros(self.type_count, dtype=np.int64)
        np.add.at(totals, self.types, self.counts)
        return totals

    def count_at(self, node: int, event_type: int, time_bin: int) -> int:
        """Events in one cell; 0 when the cell is unoccupied."""
        rows = self.type_rows(event_type)
        key = self.bins[rows] * self.node_count + self.nodes[rows]
        idx = np.searchsorted(key, time_bin * self.node_count + node)
        if idx < key.shape[0] and key[idx] == time_bin * self.node_count + node:
            return int(self.counts[rows][idx])
        return 0


def discretize(
    records,
    bin_width: float,
    horizon_end: float,
    *,
    node_count: int | None = None,
    type_count: int | None = None,
) -> DiscreteDataset:
    """Bin event records onto the regular grid.

    Parameters
    ----------
    records:
        Iterable of :class:`EventRecord`. Order is irrelevant; permuting the
        input produces an identical dataset.
    bin_width:
        Grid resolution, must be positive.
    horizon_end:
        End of the observation window. Timestamps must satisfy
        ``0 <= t < horizon_end``; a timestamp equal to ``horizon_end`` is
        rejected. The final partial bin, if any, is treated as full width.
    node_count, type_count:
        Grid dimensions. Inferred as ``max id + 1`` when omitted.

    Raises
    ------
    InvalidInputError
        On non-positive ``bin_width``/``horizon_end``, out-of-window
        timestamps, or node/type ids outside the declared dimensions.
    """
    if not (bin_width > 0):
        raise InvalidInputError(f"bin_width must be positive, got {bin_width}")
    if not (horizon_end > 0):
        raise InvalidInputError(f"horizon_end must be positive, got {horizon_end}")
    records = list(records)
    bin_count = int(np.ceil(horizon_end / bin_width - 1e-9))

    if records:
        nodes = np.array([r.node for r in records], dtype=np.int64)
        types = np.array([r.event_type for r in records], dtype=np.int64)
        stamps = np.array([r.timestamp for r in records], dtype=float)
    else:
        nodes = np.empty(0, dtype=np.int64)
        types = np.empty(0, dtype=np.int64)
        stamps = np.empty(0, dtype=float)

    if node_count is None:
        node_count = int(nodes.max()) + 1 if nodes.size else 1
    if type_count is None:
        type_count = int(types.max()) + 1 if types.size else 1
    if node_count < 1 or type_count < 1:
        raise InvalidInputError("node_count and type_count must be >= 1")

    if stamps.size:
        bad = (stamps < 0) | (stamps >= horizon_end)
        if np.any(bad):
            t = float(stamps[bad][0])
            raise InvalidInputError(
                f"timestamp {t} outside observation window [0, {horizon_end})"
            )
        if nodes.min() < 0 or nodes.max() >= node_count:
            raise InvalidInputError(f"node id outside 0..{node_count - 1}")
        if types.min() < 0 or types.max() >= type_count:
            raise InvalidInputError(f"event type outside 0..{type_count - 1}")

    time_bins = np.minimum(
        np.floor(stamps / bin_width).astype(np.int64), bin_count - 1
    )

    # collapse duplicate cells into counts, sorted by (type, bin, node)
    order = np.lexsort((nodes, time_bins, types))
    nodes, types, time_bins = nodes[order], types[order], time_bins[order]
    if nodes.size:
        key_changed = np.empty(nodes.shape[0], dtype=bool)
        key_changed[0] = True
        key_changed[1:] = (
            (types[1:] != types[:-1])
            | (time_bins[1:] != time_bins[:-1])
            | (nodes[1:] != nodes[:-1])
        )
        starts = np.flatnonzero(key_changed)
        counts = np.diff(np.append(starts, nodes.shape[0])).astype(np.int64)
        nodes, types, time_bins = nodes[starts], types[starts], time_bins[starts]
    else:
        counts = np.empty(0, dtype=np.int64)

    return DiscreteDataset(
        node_count=node_count,
        type_count=type_count,
        bin_count=bin_count,
        bin_width=float(bin_width),
        nodes=nodes,
        types=types,
        bins=time_bins,
        counts=counts,
    )


def load_events_csv(path: str) -> list[EventRecord]:
    """Read an event CSV with header ``node,event_type,timestamp``."""
    records: list[EventRecord] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = None
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if header is None:
                if tuple(cell.strip() for cell in row) != EVENTS_HEADER:
                    raise InvalidInputError(
                        f"{path}: expected header {','.join(EVENTS_HEADER)!r}, got {row!r}"
                    )
                header = row
                continue
            if len(row) != 3:
                raise InvalidInputError(f"{path}: malformed event row {row!r}")
            try:
                records.append(
                    EventRecord(int(row[0]), int(row[1]), float(row[2]))
                )
            except ValueError as exc:
                raise InvalidInputError(f"{path}: malformed event row {row!r}") from exc
        if header is None and records == []:
            # a completely empty file is a valid empty dataset
            return records
    return records


def save_events_csv(path: str, records) -> None:
    """Write events as ``node,event_type,timestamp`` rows."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(EVENTS_HEADER)
        for rec in records:
            writer.writerow([rec.node, rec.event_type, repr(float(rec.timestamp))])
