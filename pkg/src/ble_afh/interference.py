"""Declarative 2.4 GHz interference sources and the per-channel loss field.

The field is the only source of packet-loss probability in the simulator.
Sources combine independently: a packet survives only if it survives every
active source.
"""

from __future__ import annotations

import bisect
import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .spectrum import NUM_DATA_CHANNELS, WifiChannel, adjacent_channels, overlapped_ble_channels

SCENARIO_KINDS = ("one_off", "continuous", "slow_dynamics", "fast_dynamics", "ble_coexistence")
DEFAULT_P_MAIN = 0.9
DEFAULT_P_UNIFORM = 0.02
DEFAULT_CHANNEL_POOL = (1, 6, 11)
HOTSPOT_PERIOD_S = 30.0
ONE_OFF_JAM_S = 60.0

_ZERO = (0.0,) * NUM_DATA_CHANNELS


class ConfigError(ValueError):
    """Invalid scenario or interference configuration."""


def _check_probability(name: str, p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ConfigError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class Segment:
    start_s: float
    end_s: float
    wifi: WifiChannel | None  # None = hotspot off


@dataclass(frozen=True)
class WifiJammer:
    schedule: tuple[Segment, ...]
    p_main: float = DEFAULT_P_MAIN
    p_adj: float | None = None
    kind: str = field(default="wifi_jammer", init=False)

    def __post_init__(self):
        _check_probability("p_main", self.p_main)
        if self.p_adj is None:
            object.__setattr__(self, "p_adj", self.p_main / 3)
        _check_probability("p_adj", self.p_adj)
        if self.p_adj > self.p_main:
            raise ConfigError("p_adj must not exceed p_main")
        prev_end = -math.inf
        for seg in self.schedule:
            if seg.end_s <= seg.start_s:
                raise ConfigError(f"empty or reversed schedule interval {seg}")
            if seg.start_s < prev_end:
                raise ConfigError("schedule intervals must be time-ordered and non-overlapping")
            prev_end = seg.end_s
        vectors = []
        for seg in self.schedule:
            if seg.wifi is None:
                vectors.append(_ZERO)
                continue
            main = overlapped_ble_channels(seg.wifi)
            adj = adjacent_channels(main)
            vectors.append(tuple(
                self.p_main if c in main else self.p_adj if c in adj else 0.0
                for c in range(NUM_DATA_CHANNELS)
            ))
        object.__setattr__(self, "_starts", [seg.start_s for seg in self.schedule])
        object.__setattr__(self, "_vectors", tuple(vectors))

    def active_wifi(self, t: float) -> WifiChannel | None:
        i = bisect.bisect_right(self._starts, t) - 1
        if i < 0 or t >= self.schedule[i].end_s:
            return None
        return self.schedule[i].wifi

    def probabilities(self, t: float) -> Sequence[float]:
        i = bisect.bisect_right(self._starts, t) - 1
        if i < 0 or t >= self.schedule[i].end_s:
            return _ZERO
        return self._vectors[i]


@dataclass(frozen=True)
class BleCoexistence:
    p_uniform: float = DEFAULT_P_UNIFORM
    kind: str = field(default="ble_coexistence", init=False)

    def __post_init__(self):
        _check_probability("p_uniform", self.p_uniform)
        object.__setattr__(self, "_vector", (float(self.p_uniform),) * NUM_DATA_CHANNELS)

    def probabilities(self, t: float) -> Sequence[float]:
        return self._vector


@dataclass(frozen=True)
class TraceSource:
    """Recorded per-channel loss outcomes.

    Each row ``(time_s, channel, lost)`` fixes the state of ``channel`` from
    ``time_s`` until that channel's next row. A lost channel drops every
    packet (probability 1), a clean one none.
    """

    rows: tuple[tuple[float, int, int], ...]
    kind: str = field(default="trace", init=False)

    def __post_init__(self):
        times: list[list[float]] = [[] for _ in range(NUM_DATA_CHANNELS)]
        states: list[list[float]] = [[] for _ in range(NUM_DATA_CHANNELS)]
        prev = -math.inf
        for t, c, lost in self.rows:
            if t < prev:
                raise ConfigError("trace rows must be sorted by time")
            if not 0 <= c < NUM_DATA_CHANNELS:
                raise ConfigError(f"trace channel out of range: {c}")
            if lost not in (0, 1):
                raise ConfigError(f"trace 'lost' must be 0 or 1, got {lost}")
            prev = t
            times[c].append(t)
            states[c].append(float(lost))
        object.__setattr__(self, "_times", times)
        object.__setattr__(self, "_states", states)

    @classmethod
    def from_csv(cls, path: str | Path) -> "TraceSource":
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != ["time_s", "channel", "lost"]:
                raise ConfigError(f"trace header must be time_s,channel,lost; got {reader.fieldnames}")
            rows = tuple(
                (float(r["time_s"]), int(r["channel"]), int(r["lost"])) for r in reader
            )
        return cls(rows)

    def probability(self, c: int, t: float) -> float:
        i = bisect.bisect_right(self._times[c], t) - 1
        return self._states[c][i] if i >= 0 else 0.0

    def probabilities(self, t: float) -> Sequence[float]:
        return tuple(self.probability(c, t) for c in range(NUM_DATA_CHANNELS))


InterferenceSource = WifiJammer | BleCoexistence | TraceSource


@dataclass(frozen=True)
class InterferenceField:
    sources: tuple[InterferenceSource, ...] = ()

    def loss_probability(self, c: int, t: float) -> float:
        if t < 0:
            raise ValueError(f"time must be non-negative, got {t}")
        survive = 1.0
        for src in self.sources:
            if isinstance(src, TraceSource):
                p = src.probability(c, t)
            else:
                p = src.probabilities(t)[c]
            survive *= 1.0 - p
        return 1.0 - survive

    def loss_vector(self, t: float) -> list[float]:
        return [self.loss_probability(c, t) for c in range(NUM_DATA_CHANNELS)]

    def jammed_channels(self) -> frozenset[int]:
        """Channels ever hit by a Wifi jammer (overlap plus guard channels)."""
        hit = set()
        for src in self.sources:
            if isinstance(src, WifiJammer):
                for vec in src._vectors:
                    hit.update(c for c, p in enumerate(vec) if p > 0)
        return frozenset(hit)

    def schedule_rows(self) -> list[tuple[str, float, float, str]]:
        """Flat description of all sources, for reports and replay checks."""
        rows = []
        for i, src in enumerate(self.sources):
            if isinstance(src, WifiJammer):
                for seg in src.schedule:
                    wifi = "off" if seg.wifi is None else str(seg.wifi.number)
                    rows.append((f"{i}:wifi_jammer", seg.start_s, seg.end_s, wifi))
            elif isinstance(src, BleCoexistence):
                rows.append((f"{i}:ble_coexistence", 0.0, math.inf, f"p={src.p_uniform}"))
            else:
                rows.append((f"{i}:trace", 0.0, math.inf, f"rows={len(src.rows)}"))
        return rows


def loss_probability(field: InterferenceField, c: int, t: float) -> float:
    return field.loss_probability(c, t)


def _hotspot_sequence(n: int, pool: Sequence[int], rng: random.Random) -> list[int]:
    if len(pool) < 2:
        raise ConfigError("channel pool needs at least two Wifi channels")
    seq: list[int] = []
    for _ in range(n):
        choices = [w for w in pool if not seq or w != seq[-1]]
        seq.append(rng.choice(choices))
    return seq


def make_scenario(
    kind: str,
    *,
    duration_s: float,
    seed: int = 0,
    wifi_channel: int = 1,
    p_main: float = DEFAULT_P_MAIN,
    p_adj: float | None = None,
    p_uniform: float = DEFAULT_P_UNIFORM,
    channel_pool: Iterable[int] = DEFAULT_CHANNEL_POOL,
    half_width_mhz: float = 11.0,
    background: float = 0.0,
) -> InterferenceField:
    """Build the interference field for one of the standard scenarios.

    ``background`` adds a uniform loss floor on every channel on top of the
    scenario's own sources.
    """
    if kind not in SCENARIO_KINDS:
        raise ConfigError(f"unknown scenario kind {kind!r}; expected one of {SCENARIO_KINDS}")
    if duration_s <= 0:
        raise ConfigError("duration_s must be positive")
    pool = tuple(channel_pool)

    def wifi(n: int) -> WifiChannel:
        return WifiChannel(n, half_width_mhz)

    sources: list[InterferenceSource] = []
    if kind == "one_off":
        schedule = (Segment(0.0, ONE_OFF_JAM_S, wifi(wifi_channel)), Segment(ONE_OFF_JAM_S, math.inf, None))
        sources.append(WifiJammer(schedule, p_main, p_adj))
    elif kind == "continuous":
        sources.append(WifiJammer((Segment(0.0, duration_s, wifi(wifi_channel)),), p_main, p_adj))
    elif kind == "fast_dynamics":
        n = math.ceil(duration_s / HOTSPOT_PERIOD_S)
        seq = _hotspot_sequence(n, pool, random.Random(seed))
        schedule = tuple(
            Segment(i * HOTSPOT_PERIOD_S, min((i + 1) * HOTSPOT_PERIOD_S, duration_s), wifi(w))
            for i, w in enumerate(seq)
        )
        sources.append(WifiJammer(schedule, p_main, p_adj))
    elif kind == "slow_dynamics":
        n = math.ceil(duration_s / (2 * HOTSPOT_PERIOD_S))
        seq = _hotspot_sequence(n, pool, random.Random(seed))
        segments = []
        for i, w in enumerate(seq):
            on = 2 * i * HOTSPOT_PERIOD_S
            segments.append(Segment(on, on + HOTSPOT_PERIOD_S, wifi(w)))
            segments.append(Segment(on + HOTSPOT_PERIOD_S, on + 2 * HOTSPOT_PERIOD_S, None))
        sources.append(WifiJammer(tuple(segments), p_main, p_adj))
    else:
        sources.append(BleCoexistence(p_uniform))
    if background > 0:
        sources.append(BleCoexistence(background))
    return InterferenceField(tuple(sources))
