"""Command-line driver: run scenarios, repeat them, write CSV reports.

    ble-afh run --config scenario.yaml [--strategy eafh] [--seed 1] [--reps 5] [--out DIR]
    ble-afh compare --config scenario.yaml --strategies no_afh,pdr_exclusion,eafh

Files written per strategy (column order is fixed):

    summary.csv     one row per repetition plus one ``mean`` row
    aggregate.csv   metric, mean, min, max across repetitions
    timeseries.csv  repetition, time_s, active_channels, cumulative_pdr (1 s steps)
    schedule.csv    repetition, source, start_s, end_s, state
    events.csv      per-event outcomes (only with write_events / --events)
"""

from __future__ import annotations

import argparse
import csv
import logging
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .config import ScenarioConfig, load_config, serialize_config
from .interference import ConfigError
from .link_sim import simulate
from .metrics import RunReport, aggregate
from .strategies import STRATEGIES

log = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "strategy", "scenario", "repetition", "seed", "events", "link_pdr", "ack_ratio",
    "retransmission_overhead", "map_updates", "updates_per_minute", "update_overhead",
    "median_active_channels", "mean_active_channels", "min_active_channels", "resets",
]
AGGREGATE_METRICS = SUMMARY_COLUMNS[5:]
TIMESERIES_COLUMNS = ["repetition", "time_s", "active_channels", "cumulative_pdr"]
EVENT_COLUMNS = ["repetition", "event", "time_s", "channel", "acked", "was_retransmission",
                 "map_update_sent", "active_channels"]
SCHEDULE_COLUMNS = ["repetition", "source", "start_s", "end_s", "state"]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


@dataclass
class RepetitionResult:
    repetition: int
    seed: int
    report: RunReport
    timeseries: list[tuple]
    schedule: list[tuple]
    events: list[tuple] | None


def run_repetition(config: ScenarioConfig, repetition: int) -> RepetitionResult:
    cfg = config.with_overrides(seed=config.seed + repetition)
    run = simulate(cfg)
    report = aggregate(run.outcomes, run.state.map_history, getattr(run.strategy, "resets", 0))

    per_second = max(1, round(1.0 / cfg.interval_s))
    series = []
    first = acked = 0
    last = len(run.outcomes) - 1
    for i, o in enumerate(run.outcomes):
        if not o.was_retransmission:
            first += 1
            acked += o.acked
        if (i + 1) % per_second == 0 or i == last:
            series.append((repetition, o.time_s + cfg.interval_s, o.active_channels,
                           acked / first if first else 0.0))
    schedule = [(repetition, *row) for row in run.field.schedule_rows()]
    events = None
    if cfg.write_events:
        events = [(repetition, o.event, o.time_s, o.channel, o.acked, o.was_retransmission,
                   o.map_update_sent, o.active_channels) for o in run.outcomes]
    return RepetitionResult(repetition, cfg.seed, report, series, schedule, events)


def _write_csv(path: Path, columns: list[str], rows) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _summary_row(config: ScenarioConfig, res: RepetitionResult) -> list:
    r = res.report
    return [config.strategy, config.scenario, res.repetition, res.seed, r.total_events,
            r.link_pdr, r.ack_ratio, r.retransmission_overhead, r.map_updates,
            r.updates_per_minute, r.update_overhead, r.median_active_channels,
            r.mean_active_channels, r.min_active_channels, r.resets]


def run_and_report(config: ScenarioConfig, out_dir: str | Path | None = None, jobs: int = 1) -> list[RepetitionResult]:
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    reps = range(config.repetitions)
    if jobs > 1 and config.repetitions > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_repetition, [config] * len(reps), reps))
    else:
        results = [run_repetition(config, i) for i in reps]

    rows = [_summary_row(config, res) for res in results]
    columns = list(zip(*rows))
    mean_row = [config.strategy, config.scenario, "mean", config.seed, statistics.fmean(columns[4])]
    mean_row += [statistics.fmean(columns[i]) for i in range(5, len(SUMMARY_COLUMNS))]
    _write_csv(out / "summary.csv", SUMMARY_COLUMNS, rows + [mean_row])
    agg = []
    for name in AGGREGATE_METRICS:
        vals = [float(v) for v in columns[SUMMARY_COLUMNS.index(name)]]
        agg.append((name, statistics.fmean(vals), min(vals), max(vals)))
    _write_csv(out / "aggregate.csv", ["metric", "mean", "min", "max"], agg)
    _write_csv(out / "timeseries.csv", TIMESERIES_COLUMNS, (r for res in results for r in res.timeseries))
    _write_csv(out / "schedule.csv", SCHEDULE_COLUMNS, (r for res in results for r in res.schedule))
    if config.write_events:
        _write_csv(out / "events.csv", EVENT_COLUMNS, (r for res in results for r in res.events))
    (out / "config.yaml").write_text(serialize_config(config))
    log.info("wrote %d repetition(s) of %s to %s", len(results), config.strategy, out)
    return results


def compare(config: ScenarioConfig, strategies: list[str], out_dir: str | Path | None = None, jobs: int = 1):
    out = Path(out_dir if out_dir is not None else config.out_dir)
    all_results = {}
    for name in strategies:
        all_results[name] = run_and_report(config.with_overrides(strategy=name), out / name, jobs)
    rows = []
    for name, results in all_results.items():
        reports = [r.report for r in results]
        rows.append((name, statistics.fmean(r.link_pdr for r in reports),
                     statistics.fmean(r.update_overhead for r in reports),
                     statistics.fmean(r.median_active_channels for r in reports),
                     statistics.fmean(r.resets for r in reports)))
    _write_csv(out / "comparison.csv",
               ["strategy", "link_pdr", "update_overhead", "median_active_channels", "resets"], rows)
    return all_results


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ble-afh", description="BLE adaptive frequency hopping simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one strategy")
    run_p.add_argument("--config", required=True)
    run_p.add_argument("--strategy", choices=sorted(STRATEGIES))
    run_p.add_argument("--seed", type=int)
    run_p.add_argument("--reps", type=int)
    run_p.add_argument("--out")
    run_p.add_argument("--events", action="store_true", help="also write events.csv")
    run_p.add_argument("--jobs", type=int, default=1)

    cmp_p = sub.add_parser("compare", help="run several strategies on shared seeds")
    cmp_p.add_argument("--config", required=True)
    cmp_p.add_argument("--strategies", default="no_afh,pdr_exclusion,eafh")
    cmp_p.add_argument("--seed", type=int)
    cmp_p.add_argument("--reps", type=int)
    cmp_p.add_argument("--out")
    cmp_p.add_argument("--events", action="store_true")
    cmp_p.add_argument("--jobs", type=int, default=1)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = load_config(args.config)
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.reps is not None:
            overrides["repetitions"] = args.reps
        if args.events:
            overrides["write_events"] = True
        if args.command == "run":
            if args.strategy:
                overrides["strategy"] = args.strategy
            config = config.with_overrides(**overrides)
            run_and_report(config, args.out, args.jobs)
        else:
            names = [s.strip() for s in args.strategies.split(",") if s.strip()]
            unknown = [s for s in names if s not in STRATEGIES]
            if unknown or not names:
                raise ConfigError(f"strategies: unknown {unknown or 'empty list'}")
            config = config.with_overrides(**overrides)
            compare(config, names, args.out, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
