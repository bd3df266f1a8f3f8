"""Adaptive frequency hopping strategies.

A strategy sees one ``(channel, acked)`` observation per connection event
and, after each event, may propose a new channel map. The engine owns the
in-force map and the update procedure; a strategy only owns its own view of
which channels it wants active.

Three strategies are provided:

* :class:`NoAfh` never excludes anything.
* :class:`PdrExclusion` excludes channels whose windowed PDR falls below
  95 % and restores the full map once fewer than ``c_min`` remain.
* :class:`Eafh` excludes on short-term PDR and re-includes channels once
  their uncertainty score ``U = U_stale + alpha * U_near`` reaches
  ``t_incl``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .spectrum import NUM_DATA_CHANNELS

ALL_CHANNELS = frozenset(range(NUM_DATA_CHANNELS))


class SlidingWindow:
    """Bounded FIFO of delivery outcomes with a running ack count."""

    __slots__ = ("_buf", "acked")

    def __init__(self, capacity: int):
        if capacity < 1:
            raise ValueError("window capacity must be >= 1")
        self._buf: deque[bool] = deque(maxlen=capacity)
        self.acked = 0

    @property
    def capacity(self) -> int:
        return self._buf.maxlen

    def push(self, acked: bool) -> None:
        buf = self._buf
        if len(buf) == buf.maxlen:
            self.acked -= buf[0]
        buf.append(acked)
        self.acked += acked

    def clear(self) -> None:
        self._buf.clear()
        self.acked = 0

    def __len__(self) -> int:
        return len(self._buf)

    def __iter__(self):
        return iter(self._buf)

    @property
    def losses(self) -> int:
        return len(self._buf) - self.acked

    def pdr(self) -> float:
        n = len(self._buf)
        return self.acked / n if n else 1.0


@dataclass
class ChannelRecord:
    short: SlidingWindow
    long: SlidingWindow
    snapshot_pdr_short: float = 1.0
    excluded_since: int | None = None


class ChannelStats:
    """Per-channel short/long PDR windows and exclusion bookkeeping."""

    def __init__(self, w_short: int = 15, w_long: int = 30, l_max: int = 8):
        self.l_max = l_max
        self.records = [
            ChannelRecord(SlidingWindow(w_short), SlidingWindow(w_long))
            for _ in range(NUM_DATA_CHANNELS)
        ]

    def __getitem__(self, c: int) -> ChannelRecord:
        return self.records[c]

    def observe(self, c: int, acked: bool) -> None:
        rec = self.records[c]
        rec.short.push(acked)
        rec.long.push(acked)

    def pdr_short(self, c: int) -> float:
        return self.records[c].short.pdr()

    def pdr_long(self, c: int) -> float:
        return self.records[c].long.pdr()

    def losses(self, c: int) -> int:
        return min(self.records[c].long.losses, self.l_max)

    def is_excluded(self, c: int) -> bool:
        return self.records[c].excluded_since is not None

    def exclude(self, c: int, event: int) -> None:
        rec = self.records[c]
        rec.snapshot_pdr_short = rec.short.pdr()
        rec.short.clear()
        rec.excluded_since = event

    def include(self, c: int) -> None:
        rec = self.records[c]
        rec.excluded_since = None
        rec.short.clear()

    def neighbor_pdr(self, n: int) -> float:
        rec = self.records[n]
        if rec.excluded_since is None:
            return rec.short.pdr()
        return rec.snapshot_pdr_short


@dataclass(frozen=True)
class EafhParams:
    t_exclu: float = 0.90
    t_incl: float = 1.0
    alpha: float = 2.0
    d_seconds: float = 2.0
    w_short: int = 15
    w_long: int = 30
    l_max: int = 8
    c_min: int = 8

    def __post_init__(self):
        if not 0 < self.t_exclu <= 1:
            raise ValueError(f"t_exclu must be in (0, 1], got {self.t_exclu}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be >= 0, got {self.alpha}")
        if self.d_seconds <= 0:
            raise ValueError(f"d_seconds must be > 0, got {self.d_seconds}")
        if self.w_short < 1 or self.w_long < 1:
            raise ValueError("window sizes must be >= 1")
        if self.l_max < 0:
            raise ValueError("l_max must be >= 0")
        if not 2 <= self.c_min <= NUM_DATA_CHANNELS:
            raise ValueError(f"c_min must be in [2, 37], got {self.c_min}")

    def d_events(self, interval_s: float) -> int:
        """Default exclusion duration expressed in connection events."""
        return max(1, round(self.d_seconds / interval_s))


@dataclass(frozen=True)
class PdrExclusionParams:
    threshold: float = 0.95
    window: int = 30
    c_min: int = 8

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not 2 <= self.c_min <= NUM_DATA_CHANNELS:
            raise ValueError(f"c_min must be in [2, 37], got {self.c_min}")


def u_stale(stats: ChannelStats, c: int, now_event: int, d_events: int) -> float:
    """Elapsed exclusion time over the loss-scaled backoff duration."""
    since = stats[c].excluded_since
    if since is None:
        raise ValueError(f"channel {c} is not excluded")
    return (now_event - since) / (d_events * 2 ** stats.losses(c))


def u_near(stats: ChannelStats, c: int) -> float:
    """Neighbor-correlation penalty in [-1, 0]."""
    neighbors = [n for n in (c - 1, c + 1) if 0 <= n < NUM_DATA_CHANNELS]
    mean = sum(stats.neighbor_pdr(n) for n in neighbors) / len(neighbors)
    return -(1.0 - mean)


def select_backfill(pdr_long: dict[int, float], count: int) -> list[int]:
    """The ``count`` channels with highest long-term PDR, lowest index on ties."""
    return sorted(pdr_long, key=lambda c: (-pdr_long[c], c))[:max(count, 0)]


def uncertainty(stats: ChannelStats, c: int, now_event: int, d_events: int, alpha: float) -> float:
    return u_stale(stats, c, now_event, d_events) + alpha * u_near(stats, c)


class AfhStrategy:
    """Base class; subclasses override :meth:`step`."""

    name = "base"

    def __init__(self):
        self.active: set[int] = set(ALL_CHANNELS)

    def observe(self, c: int, acked: bool) -> None:
        pass

    def step(self, current_map: frozenset[int], now_event: int, update_pending: bool) -> frozenset[int] | None:
        return None

    def _propose(self, current_map: frozenset[int], update_pending: bool) -> frozenset[int] | None:
        if update_pending:
            return None
        desired = frozenset(self.active)
        return desired if desired != current_map else None


class NoAfh(AfhStrategy):
    name = "no_afh"


def no_afh_step(*_args, **_kwargs) -> None:
    return None


@dataclass
class ExclusionInterval:
    channel: int
    start_event: int
    end_event: int | None = None
    censored: bool = False

    @property
    def duration(self) -> int:
        return self.end_event - self.start_event


class PdrExclusion(AfhStrategy):
    name = "pdr_exclusion"

    def __init__(self, params: PdrExclusionParams | None = None):
        super().__init__()
        self.params = params or PdrExclusionParams()
        self.windows = [SlidingWindow(self.params.window) for _ in range(NUM_DATA_CHANNELS)]
        self.resets = 0
        self._last: int | None = None

    def observe(self, c: int, acked: bool) -> None:
        self.windows[c].push(acked)
        self._last = c

    def step(self, current_map, now_event, update_pending):
        p = self.params
        # Only the observed channel's window can have changed since the last step.
        c = self._last
        self._last = None
        if c is not None and c in self.active:
            w = self.windows[c]
            if len(w) and w.pdr() < p.threshold:
                self.active.discard(c)
        if len(self.active) < p.c_min:
            for c in ALL_CHANNELS - self.active:
                self.windows[c].clear()
            self.active = set(ALL_CHANNELS)
            self.resets += 1
        return self._propose(current_map, update_pending)


def pdr_exclusion_step(strategy: PdrExclusion, current_map, now_event, update_pending=False):
    return strategy.step(current_map, now_event, update_pending)


class Eafh(AfhStrategy):
    """Exclusion on short-term PDR, uncertainty-driven re-inclusion."""

    name = "eafh"

    def __init__(self, params: EafhParams | None = None, interval_s: float = 0.02):
        super().__init__()
        self.params = params or EafhParams()
        self.d_events = self.params.d_events(interval_s)
        self.stats = ChannelStats(self.params.w_short, self.params.w_long, self.params.l_max)
        self.excluded: set[int] = set()
        self.exclusions: list[ExclusionInterval] = []
        self._open: dict[int, ExclusionInterval] = {}
        self.backfills = 0
        self.min_active = NUM_DATA_CHANNELS
        self._last: int | None = None
        # Excluded channel -> first event at which U(c) can reach t_incl.
        self._due: dict[int, int] = {}

    def _touch(self, c: int) -> None:
        # U(x) depends on x's long window and its neighbors' PDR values.
        due = self._due
        for x in (c - 1, c, c + 1):
            if x in due:
                due[x] = 0

    def observe(self, c: int, acked: bool) -> None:
        self.stats.observe(c, acked)
        self._last = c
        self._touch(c)

    def _exclude(self, c: int, now_event: int) -> None:
        self.stats.exclude(c, now_event)
        self.active.discard(c)
        self.excluded.add(c)
        self._due[c] = 0
        self._touch(c)
        iv = ExclusionInterval(c, now_event)
        self.exclusions.append(iv)
        self._open[c] = iv

    def _include(self, c: int, now_event: int) -> None:
        self.stats.include(c)
        self.excluded.discard(c)
        self.active.add(c)
        del self._due[c]
        self._touch(c)
        self._open.pop(c).end_event = now_event

    def step(self, current_map, now_event, update_pending):
        p = self.params
        stats = self.stats

        # 1. Exclusion. Short windows change only on observation or reset, and
        # a reset window is empty, so only the last observed channel can cross.
        c = self._last
        self._last = None
        if c is not None and c in self.active:
            short = stats[c].short
            if len(short) and short.pdr() < p.t_exclu:
                self._exclude(c, now_event)

        # 2. Exploration. Scores are computed for every excluded channel before
        # any of them is re-included. Between changes to a channel or its
        # neighbors, U grows by exactly 1/scale per event, so a channel is
        # re-scored only from one event before it could cross t_incl.
        if self.excluded:
            due = self._due
            ready = []
            for c in sorted(self.excluded):
                if now_event < due[c]:
                    continue
                scale = self.d_events * 2 ** stats.losses(c)
                u = (now_event - stats[c].excluded_since) / scale + p.alpha * u_near(stats, c)
                if u >= p.t_incl:
                    ready.append(c)
                else:
                    gap = (p.t_incl - u) * scale
                    due[c] = now_event + (max(1, math.floor(gap) - 1) if gap < 2**53 else 2**53)
            for c in ready:
                self._include(c, now_event)

        # 3. Keep at least c_min channels, preferring high long-term PDR.
        missing = p.c_min - len(self.active)
        if missing > 0:
            for c in select_backfill({c: stats.pdr_long(c) for c in self.excluded}, missing):
                self._include(c, now_event)
            self.backfills += 1
        self.min_active = min(self.min_active, len(self.active))

        # 4. Propose the map unless an update is already underway.
        return self._propose(current_map, update_pending)

    def close(self, end_event: int) -> None:
        """Close open exclusion intervals at the end of a run."""
        for iv in self._open.values():
            iv.end_event = end_event
            iv.censored = True
        self._open.clear()


def eafh_step(strategy: Eafh, current_map, now_event, update_pending=False):
    return strategy.step(current_map, now_event, update_pending)


STRATEGIES = {"no_afh": NoAfh, "pdr_exclusion": PdrExclusion, "eafh": Eafh}
