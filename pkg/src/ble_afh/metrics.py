"""Aggregate per-event outcomes into run-level metrics."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .spectrum import NUM_DATA_CHANNELS


@dataclass
class RunReport:
    total_events: int
    duration_s: float
    link_pdr: float
    ack_ratio: float
    retransmission_overhead: float
    map_updates: int
    updates_per_minute: float
    update_overhead: float
    median_active_channels: float
    mean_active_channels: float
    min_active_channels: int
    resets: int = 0
    active_channels_series: list[tuple[float, int]] = field(default_factory=list)
    per_channel_summary: dict[int, tuple[int, int]] = field(default_factory=dict)


def aggregate(
    outcomes: Sequence,
    map_history: Iterable[tuple[int, frozenset]] | None = None,
    resets: int = 0,
) -> RunReport:
    """Summarize a run.

    ``link_pdr`` is the share of distinct payloads acknowledged on their first
    attempt; retransmissions are left out of both numerator and denominator.
    ``ack_ratio`` counts every exchange, retransmissions included.
    """
    if not outcomes:
        raise ValueError("cannot aggregate an empty outcome list")
    n = len(outcomes)
    first = [o for o in outcomes if not o.was_retransmission]
    first_acked = sum(o.acked for o in first)
    retx = n - len(first)
    updates = sum(o.map_update_sent for o in outcomes)
    interval = outcomes[1].time_s - outcomes[0].time_s if n > 1 else 0.0
    duration = outcomes[-1].time_s + interval if n > 1 else 0.0

    tx = [0] * NUM_DATA_CHANNELS
    ack = [0] * NUM_DATA_CHANNELS
    for o in outcomes:
        tx[o.channel] += 1
        ack[o.channel] += o.acked

    if map_history is not None:
        start = outcomes[0].event
        series = [
            (outcomes[e - start].time_s if e - start < n else e * interval, len(m))
            for e, m in map_history
        ]
    else:
        series = []
        for o in outcomes:
            if not series or series[-1][1] != o.active_channels:
                series.append((o.time_s, o.active_channels))

    active = [o.active_channels for o in outcomes]
    return RunReport(
        total_events=n,
        duration_s=duration,
        link_pdr=first_acked / len(first) if first else 0.0,
        ack_ratio=sum(o.acked for o in outcomes) / n,
        retransmission_overhead=retx / n,
        map_updates=updates,
        updates_per_minute=updates / (duration / 60.0) if duration > 0 else 0.0,
        update_overhead=updates / n,
        median_active_channels=float(statistics.median(active)),
        mean_active_channels=statistics.fmean(active),
        min_active_channels=min(active),
        resets=resets,
        active_channels_series=series,
        per_channel_summary={c: (tx[c], ack[c]) for c in range(NUM_DATA_CHANNELS) if tx[c]},
    )


def first_attempt_pdr(outcomes: Sequence) -> float:
    first = [o for o in outcomes if not o.was_retransmission]
    return sum(o.acked for o in first) / len(first) if first else 0.0


def updates_between(outcomes: Sequence, start_s: float, end_s: float) -> int:
    return sum(o.map_update_sent for o in outcomes if start_s <= o.time_s < end_s)
