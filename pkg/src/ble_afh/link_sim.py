"""Discrete-event engine for a single BLE connection.

Each connection event carries one keep-alive exchange: the central sends,
the peripheral answers. Loss on both legs is drawn from the interference
field. Unacknowledged data is retransmitted at the next event. After each
event the AFH strategy is consulted; a new channel map takes effect six
events after it is issued.

Loss draws are keyed by ``(seed, event, channel)`` so that strategies run
with the same seed face the same channel realization.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .config import ScenarioConfig
from .interference import InterferenceField
from .spectrum import NUM_DATA_CHANNELS
from .strategies import ALL_CHANNELS, AfhStrategy

MAP_UPDATE_DELAY = 6
ChannelMap = frozenset


class InvariantError(RuntimeError):
    """The engine or a strategy broke a link-layer invariant."""


@lru_cache(maxsize=1024)
def _sorted(used: frozenset[int]) -> tuple[int, ...]:
    return tuple(sorted(used))


@lru_cache(maxsize=8192)
def _round_order(used: tuple[int, ...], round_index: int, hop_seed: int) -> tuple[int, ...]:
    order = list(used)
    random.Random(f"{hop_seed}:{round_index}").shuffle(order)
    return tuple(order)


def select_channel(used: frozenset[int], event_counter: int, hop_seed: int) -> int:
    """Pick the channel for ``event_counter``.

    Events are grouped into rounds of ``len(used)``; each round visits every
    used channel once in a seeded pseudo-random order.
    """
    n = len(used)
    if n == 0:
        raise ValueError("channel map is empty")
    if n == 1:
        return next(iter(used))
    return _round_order(_sorted(used), event_counter // n, hop_seed)[event_counter % n]


class LossDraws:
    """Uniform variates indexed by (event, channel, direction)."""

    BLOCK = 1024

    def __init__(self, seed: int):
        self.seed = seed
        self._block_index = -1
        self._block: np.ndarray | None = None

    def pair(self, event: int, channel: int) -> tuple[float, float]:
        b, i = divmod(event, self.BLOCK)
        if b != self._block_index:
            rng = np.random.default_rng([self.seed, b, 0x10557])
            self._block = rng.random((self.BLOCK, NUM_DATA_CHANNELS, 2))
            self._block_index = b
        down, up = self._block[i, channel].tolist()
        return down, up


@dataclass(frozen=True, slots=True)
class EventOutcome:
    event: int
    time_s: float
    channel: int
    acked: bool
    was_retransmission: bool
    map_update_sent: bool
    active_channels: int


@dataclass(frozen=True)
class MapUpdate:
    issued_at: int
    apply_at: int
    new_map: frozenset[int]


@dataclass
class ConnectionState:
    interval_s: float = 0.02
    hop_seed: int = 0
    c_min: int = 8
    rng: LossDraws = field(default_factory=lambda: LossDraws(0))
    event_counter: int = 0
    channel_map: frozenset[int] = ALL_CHANNELS
    pending_update: MapUpdate | None = None
    tx_sn: int = 0
    peer_nesn: int = 0
    pending_retransmission: bool = False
    payloads_delivered: int = 0
    payloads_acked: int = 0
    map_history: list[tuple[int, frozenset[int]]] = field(default_factory=list)
    updates: list[MapUpdate] = field(default_factory=list)

    def __post_init__(self):
        if not self.map_history:
            self.map_history.append((self.event_counter, self.channel_map))


def run_event(state: ConnectionState, field: InterferenceField, strategy: AfhStrategy) -> EventOutcome:
    event = state.event_counter
    pending = state.pending_update
    if pending is not None and event == pending.apply_at:
        state.channel_map = pending.new_map
        state.pending_update = None
        state.map_history.append((event, pending.new_map))

    channel = select_channel(state.channel_map, event, state.hop_seed)
    t = event * state.interval_s
    p = field.loss_probability(channel, t)
    u_down, u_up = state.rng.pair(event, channel)

    was_retx = state.pending_retransmission
    acked = False
    if u_down >= p:
        # Peripheral got SN; a new payload flips its NESN, a duplicate does not.
        if state.tx_sn == state.peer_nesn:
            state.peer_nesn ^= 1
            state.payloads_delivered += 1
        if u_up >= p:
            # Central sees NESN != SN: acknowledged.
            acked = state.peer_nesn != state.tx_sn
    if acked:
        state.tx_sn ^= 1
        state.payloads_acked += 1
    state.pending_retransmission = not acked

    strategy.observe(channel, acked)
    proposal = strategy.step(state.channel_map, event, state.pending_update is not None)
    sent = False
    if proposal is not None and state.pending_update is None:
        if len(proposal) < state.c_min:
            raise InvariantError(f"strategy proposed {len(proposal)} channels, below c_min={state.c_min}")
        update = MapUpdate(event, event + MAP_UPDATE_DELAY, frozenset(proposal))
        state.pending_update = update
        state.updates.append(update)
        sent = True

    state.event_counter += 1
    return EventOutcome(event, t, channel, acked, was_retx, sent, len(state.channel_map))


@dataclass
class SimulationRun:
    config: ScenarioConfig
    field: InterferenceField
    strategy: AfhStrategy
    state: ConnectionState
    outcomes: list[EventOutcome]


def simulate(config: ScenarioConfig) -> SimulationRun:
    """Run one repetition of ``config`` (seed taken as given)."""
    field = config.make_field()
    strategy = config.make_strategy()
    state = ConnectionState(
        interval_s=config.interval_s,
        hop_seed=config.seed,
        c_min=config.c_min,
        rng=LossDraws(config.seed),
    )
    outcomes = [run_event(state, field, strategy) for _ in range(config.num_events)]
    if hasattr(strategy, "close"):
        strategy.close(state.event_counter)
    return SimulationRun(config, field, strategy, state, outcomes)


def run_scenario(config: ScenarioConfig) -> list[EventOutcome]:
    return simulate(config).outcomes


def verify_run(run: SimulationRun) -> list[str]:
    """Check engine invariants on a finished run; returns violation messages."""
    problems = []
    state = run.state
    history = state.map_history
    idx = 0
    in_force = history[0][1]
    for o in run.outcomes:
        while idx + 1 < len(history) and history[idx + 1][0] <= o.event:
            idx += 1
            in_force = history[idx][1]
        if o.channel not in in_force:
            problems.append(f"event {o.event}: channel {o.channel} not in the in-force map")
        if o.active_channels != len(in_force):
            problems.append(f"event {o.event}: active count {o.active_channels} != {len(in_force)}")
    applied = {e: m for e, m in history[1:]}
    prev_apply = -1
    for u in state.updates:
        if u.apply_at != u.issued_at + MAP_UPDATE_DELAY:
            problems.append(f"update issued at {u.issued_at} scheduled for {u.apply_at}")
        if u.issued_at < prev_apply:
            problems.append(f"update issued at {u.issued_at} while another was pending until {prev_apply}")
        if u.apply_at < state.event_counter and applied.get(u.apply_at) != u.new_map:
            problems.append(f"update issued at {u.issued_at} not applied at event {u.apply_at}")
        prev_apply = u.apply_at
    for e, m in history:
        if len(m) < state.c_min:
            problems.append(f"map in force from event {e} has {len(m)} < c_min channels")
    min_active = getattr(run.strategy, "min_active", None)
    if min_active is not None and min_active < state.c_min:
        problems.append(f"strategy left only {min_active} channels after backfill")
    return problems
