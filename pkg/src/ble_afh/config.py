"""Scenario configuration: schema, defaults, validation and (de)serialization.

A config is a flat YAML (or JSON) mapping. Keys are case-insensitive, so
``T_exclu`` and ``t_exclu`` name the same parameter.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import yaml

from .interference import (
    DEFAULT_CHANNEL_POOL,
    SCENARIO_KINDS,
    ConfigError,
    InterferenceField,
    TraceSource,
    make_scenario,
)
from .strategies import STRATEGIES, Eafh, EafhParams, NoAfh, PdrExclusion, PdrExclusionParams

EXTRA_SCENARIOS = ("none", "trace")


@dataclass(frozen=True)
class ScenarioConfig:
    strategy: str
    scenario: str
    duration_s: float
    seed: int = 0
    interval_s: float = 0.02
    repetitions: int = 1
    # interference
    wifi_channel: int = 1
    p_main: float = 0.9
    p_adj: float | None = None
    p_uniform: float = 0.02
    channel_pool: tuple[int, ...] = DEFAULT_CHANNEL_POOL
    half_width_mhz: float = 11.0
    background: float = 0.0
    trace_path: str | None = None
    # eAFH
    t_exclu: float = 0.90
    t_incl: float = 1.0
    alpha: float = 2.0
    d_seconds: float = 2.0
    window_short: int = 15
    window_long: int = 30
    l_max: int = 8
    inclusion: bool = True
    # PDR-Exclusion
    pdr_threshold: float = 0.95
    pdr_window: int = 30
    # shared
    c_min: int = 8
    # output
    out_dir: str = "results"
    write_events: bool = False

    def __post_init__(self):
        _validate(self)

    def with_overrides(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    @property
    def num_events(self) -> int:
        # Guard against float noise such as 1 / 0.02 = 50.000000000000004.
        q = self.duration_s / self.interval_s
        n = round(q)
        return n if abs(q - n) < 1e-9 else int(q) + 1

    def eafh_params(self) -> EafhParams:
        return EafhParams(
            t_exclu=self.t_exclu,
            t_incl=self.t_incl if self.inclusion else float("inf"),
            alpha=self.alpha,
            d_seconds=self.d_seconds,
            w_short=self.window_short,
            w_long=self.window_long,
            l_max=self.l_max,
            c_min=self.c_min,
        )

    def pdr_exclusion_params(self) -> PdrExclusionParams:
        return PdrExclusionParams(self.pdr_threshold, self.pdr_window, self.c_min)

    def make_strategy(self):
        if self.strategy == "eafh":
            return Eafh(self.eafh_params(), self.interval_s)
        if self.strategy == "pdr_exclusion":
            return PdrExclusion(self.pdr_exclusion_params())
        return NoAfh()

    def make_field(self) -> InterferenceField:
        if self.scenario == "none":
            return InterferenceField()
        if self.scenario == "trace":
            return InterferenceField((TraceSource.from_csv(self.trace_path),))
        return make_scenario(
            self.scenario,
            duration_s=self.duration_s,
            seed=self.seed,
            wifi_channel=self.wifi_channel,
            p_main=self.p_main,
            p_adj=self.p_adj,
            p_uniform=self.p_uniform,
            channel_pool=self.channel_pool,
            half_width_mhz=self.half_width_mhz,
            background=self.background,
        )

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["channel_pool"] = list(self.channel_pool)
        return d


FIELD_NAMES = {f.name for f in dataclasses.fields(ScenarioConfig)}
REQUIRED = ("strategy", "scenario", "duration_s")


def _range(key: str, ok: bool, what: str) -> None:
    if not ok:
        raise ConfigError(f"{key}: {what}")


def _validate(cfg: ScenarioConfig) -> None:
    _range("strategy", cfg.strategy in STRATEGIES, f"unknown strategy {cfg.strategy!r}")
    _range("scenario", cfg.scenario in SCENARIO_KINDS + EXTRA_SCENARIOS, f"unknown scenario {cfg.scenario!r}")
    _range("duration_s", cfg.duration_s > 0, "must be > 0")
    _range("interval_s", cfg.interval_s > 0, "must be > 0")
    _range("repetitions", cfg.repetitions >= 1, "must be >= 1")
    _range("wifi_channel", 1 <= cfg.wifi_channel <= 13, "must be in [1, 13]")
    for key in ("p_main", "p_uniform", "background"):
        _range(key, 0 <= getattr(cfg, key) <= 1, "must be in [0, 1]")
    if cfg.p_adj is not None:
        _range("p_adj", 0 <= cfg.p_adj <= cfg.p_main, "must be in [0, p_main]")
    _range("channel_pool", len(set(cfg.channel_pool)) >= 2 and all(1 <= w <= 13 for w in cfg.channel_pool),
           "needs at least two distinct Wifi channels in [1, 13]")
    _range("half_width_mhz", cfg.half_width_mhz >= 0, "must be >= 0")
    _range("trace_path", cfg.scenario != "trace" or bool(cfg.trace_path), "required for scenario 'trace'")
    _range("t_exclu", 0 < cfg.t_exclu <= 1, "must be in (0, 1]")
    _range("t_incl", cfg.t_incl > 0, "must be > 0")
    _range("alpha", cfg.alpha >= 0, "must be >= 0")
    _range("d_seconds", cfg.d_seconds > 0, "must be > 0")
    _range("window_short", cfg.window_short >= 1, "must be >= 1")
    _range("window_long", cfg.window_long >= 1, "must be >= 1")
    _range("l_max", cfg.l_max >= 0, "must be >= 0")
    _range("pdr_threshold", 0 < cfg.pdr_threshold <= 1, "must be in (0, 1]")
    _range("pdr_window", cfg.pdr_window >= 1, "must be >= 1")
    _range("c_min", 2 <= cfg.c_min <= 37, "must be in [2, 37]")


_INT_KEYS = {"seed", "repetitions", "wifi_channel", "window_short", "window_long", "l_max", "pdr_window", "c_min"}
_BOOL_KEYS = {"inclusion", "write_events"}
_STR_KEYS = {"strategy", "scenario", "trace_path", "out_dir"}


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        if key in ("p_adj", "trace_path"):
            return None
        raise ConfigError(f"{key}: must not be null")
    try:
        if key in _BOOL_KEYS:
            if not isinstance(value, bool):
                raise TypeError
            return value
        if key in _STR_KEYS:
            if not isinstance(value, str):
                raise TypeError
            return value
        if key == "channel_pool":
            return tuple(int(w) for w in value)
        if isinstance(value, bool):
            raise TypeError
        if key in _INT_KEYS:
            if isinstance(value, float) and not value.is_integer():
                raise TypeError
            return int(value)
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: invalid value {value!r}") from None


def config_from_mapping(data: dict[str, Any]) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a mapping")
    values: dict[str, Any] = {}
    for raw_key, value in data.items():
        key = str(raw_key).lower()
        if key not in FIELD_NAMES:
            raise ConfigError(f"{raw_key}: unknown key")
        values[key] = _coerce(key, value)
    for key in REQUIRED:
        if key not in values:
            raise ConfigError(f"{key}: required key missing")
    return ScenarioConfig(**values)


def parse_config(text: str) -> ScenarioConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from None
    return config_from_mapping(data)


def load_config(path: str | Path) -> ScenarioConfig:
    return parse_config(Path(path).read_text())


def serialize_config(cfg: ScenarioConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=False)
