"""Experiment orchestration: seeded run grids, aggregation and reports.

A configuration describes one instance and a grid of (mode, interval) cells;
every cell is executed ``repetitions`` times with per-run seeds derived
deterministically from the master seed and the cell identity, so re-running a
config reproduces every number. Gated cells are compared against the classic
cell at the same interval with an (unpaired, unequal-variance) Welch t-test at
95% confidence; both raw per-run rows and aggregates are emitted as CSV so any
other test can be applied externally.
"""

from __future__ import annotations

import csv
import hashlib
import multiprocessing
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .diversity import DiversityParams
from .islands import MigrationPolicy, run_dea
from .stats import difficulty, sample_mean, sample_stddev, welch_t_test
from .tsplib import known_optimum, parse_file

__all__ = [
    "ConfigError",
    "ModeSpec",
    "ExperimentConfig",
    "RunReport",
    "parse_config",
    "load_config",
    "run_seed_entropy",
    "run_experiment",
    "reports_from_raw_rows",
    "emit_reports",
    "read_raw_csv",
    "gate_curve",
]

RAW_HEADER = ["instance", "mode", "alpha", "beta", "interval", "run_index",
              "best_length"]
SUMMARY_HEADER = ["instance", "mode", "alpha", "beta", "interval", "mean",
                  "stddev", "optimum", "DF", "t_stat", "p_value", "significant"]


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ModeSpec:
    """One algorithm variant: classic, or gated with its gate parameters."""

    name: str
    alpha: float | None = None
    beta: float | None = None

    def __post_init__(self):
        if self.name not in ("classic", "gated"):
            raise ConfigError(f"unknown mode {self.name!r}")
        if self.name == "gated" and (self.alpha is None or self.beta is None):
            raise ConfigError("gated mode needs alpha and beta")

    def label(self) -> str:
        if self.name == "classic":
            return "classic"
        return f"gated:{self.alpha!r}:{self.beta!r}"

    def diversity_params(self) -> DiversityParams:
        if self.name == "classic":
            return DiversityParams()
        return DiversityParams(alpha=self.alpha, beta=self.beta)


@dataclass
class ExperimentConfig:
    instance_path: Path
    intervals: list[int]
    modes: list[ModeSpec]
    repetitions: int = 30
    islands: int = 16
    subpop: int = 100
    migration_size: int = 1
    rounds: int = 2000
    velocity_threshold: float = 5000.0
    p_mu0: float = 0.02
    p_ma0: float = 0.05
    seed: int = 0
    out_dir: Path = Path("results")
    optimum: int | None = None

    def __post_init__(self):
        if not self.intervals:
            raise ConfigError("at least one interval is required")
        if self.repetitions < 2:
            raise ConfigError("repetitions must be >= 2 for the t-test")
        if not self.modes:
            raise ConfigError("at least one mode is required")


_DEFAULTS = {
    "modes": "classic,gated",
    "alphas": "1.0",
    "betas": "1.0",
    "repetitions": "30",
    "islands": "16",
    "subpop": "100",
    "migration_size": "1",
    "rounds": "2000",
    "velocity_threshold": "5000",
    "p_mu0": "0.02",
    "p_ma0": "0.05",
    "seed": "0",
    "out_dir": "results",
}

_KNOWN_KEYS = set(_DEFAULTS) | {"instance", "intervals", "optimum"}


def parse_config(text: str, base_dir: Path | None = None) -> ExperimentConfig:
    """Parse a flat ``key = value`` config (comments start with ``#``).

    Relative paths are resolved against ``base_dir``. Lists are
    comma-separated. Unknown or repeated keys are rejected.
    """
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {line_no}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {line_no}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        values[key] = value

    if "instance" not in values:
        raise ConfigError("missing required key 'instance'")
    if "intervals" not in values:
        raise ConfigError("missing required key 'intervals'")
    merged = {**_DEFAULTS, **values}

    def as_int(key):
        try:
            return int(merged[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected an integer, got {merged[key]!r}")

    def as_float(key):
        try:
            return float(merged[key])
        except ValueError:
            raise ConfigError(f"key {key!r}: expected a number, got {merged[key]!r}")

    def as_list(key, conv):
        try:
            return [conv(tok.strip()) for tok in merged[key].split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"key {key!r}: bad list {merged[key]!r}")

    base = base_dir if base_dir is not None else Path.cwd()
    instance_path = Path(merged["instance"])
    if not instance_path.is_absolute():
        instance_path = base / instance_path
    out_dir = Path(merged["out_dir"])
    if not out_dir.is_absolute():
        out_dir = base / out_dir

    mode_names = [tok.strip() for tok in merged["modes"].split(",") if tok.strip()]
    modes: list[ModeSpec] = []
    for name in mode_names:
        if name == "classic":
            modes.append(ModeSpec("classic"))
        elif name == "gated":
            for alpha in as_list("alphas", float):
                for beta in as_list("betas", float):
                    modes.append(ModeSpec("gated", alpha=alpha, beta=beta))
        else:
            raise ConfigError(f"key 'modes': unknown mode {name!r}")

    optimum = int(merged["optimum"]) if "optimum" in values else None
    return ExperimentConfig(
        instance_path=instance_path,
        intervals=as_list("intervals", int),
        modes=modes,
        repetitions=as_int("repetitions"),
        islands=as_int("islands"),
        subpop=as_int("subpop"),
        migration_size=as_int("migration_size"),
        rounds=as_int("rounds"),
        velocity_threshold=as_float("velocity_threshold"),
        p_mu0=as_float("p_mu0"),
        p_ma0=as_float("p_ma0"),
        seed=as_int("seed"),
        out_dir=out_dir,
        optimum=optimum,
    )


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), base_dir=path.parent)


def run_seed_entropy(master_seed: int, mode: ModeSpec, interval: int,
                     run_index: int) -> tuple[int, ...]:
    """Deterministic, distinct SeedSequence entropy for one run of one cell."""
    digest = hashlib.sha256(mode.label().encode()).digest()
    mode_key = int.from_bytes(digest[:8], "big")
    return (master_seed, mode_key, interval, run_index)


@dataclass
class RunReport:
    """Aggregate of one (mode, interval) cell over its repetitions."""

    instance: str
    mode: ModeSpec
    interval: int
    best_lengths: list[int]
    mean: float
    stddev: float
    optimum: int | None = None
    df: float | None = None
    t_stat: float | None = None       # vs the classic cell at the same interval
    p_value: float | None = None
    significant: bool | None = None
    test_kind: str = "welch"


def _policy_for(cfg: ExperimentConfig, mode: ModeSpec, interval: int) -> MigrationPolicy:
    return MigrationPolicy(interval=interval, rounds=cfg.rounds, mode=mode.name,
                           size=cfg.migration_size,
                           diversity=mode.diversity_params())


_WORKER_INSTANCE = None


def _worker_init(instance_path: str):
    global _WORKER_INSTANCE
    _WORKER_INSTANCE = parse_file(instance_path)
    _WORKER_INSTANCE.distance_matrix()


def _worker_run(task):
    cfg, mode, interval, run_index = task
    policy = _policy_for(cfg, mode, interval)
    result = run_dea(_WORKER_INSTANCE, policy, n_islands=cfg.islands,
                     island_size=cfg.subpop,
                     seed=run_seed_entropy(cfg.seed, mode, interval, run_index),
                     velocity_threshold=cfg.velocity_threshold,
                     p_mu0=cfg.p_mu0, p_ma0=cfg.p_ma0)
    return mode.label(), interval, run_index, result.best_length


def _aggregate(cfg: ExperimentConfig, instance_name: str,
               cells: dict[tuple[str, int], list[int]]) -> list[RunReport]:
    optimum = cfg.optimum if cfg.optimum is not None else known_optimum(instance_name)
    by_label = {m.label(): m for m in cfg.modes}
    reports = []
    for mode in cfg.modes:
        for interval in cfg.intervals:
            lengths = cells[(mode.label(), interval)]
            mean = sample_mean(lengths)
            report = RunReport(
                instance=instance_name, mode=mode, interval=interval,
                best_lengths=list(lengths), mean=mean,
                stddev=sample_stddev(lengths), optimum=optimum,
                df=difficulty(mean, optimum) if optimum is not None else None)
            if mode.name == "gated" and "classic" in by_label:
                baseline = cells[("classic", interval)]
                welch = welch_t_test(lengths, baseline, confidence=0.95)
                report.t_stat = welch.t_stat
                report.p_value = welch.p_value
                report.significant = welch.significant
            reports.append(report)
    return reports


def run_experiment(cfg: ExperimentConfig, jobs: int | None = None,
                   progress=None) -> list[RunReport]:
    """Execute every (mode, interval) cell ``repetitions`` times.

    Runs are independent and may execute across ``jobs`` worker processes
    (defaults to the CPU count); results are keyed by cell and run index, so
    the reports do not depend on scheduling order.
    """
    inst = parse_file(cfg.instance_path)
    tasks = [(cfg, mode, interval, rep)
             for mode in cfg.modes
             for interval in cfg.intervals
             for rep in range(cfg.repetitions)]
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = min(jobs, len(tasks))

    cells: dict[tuple[str, int], list[int]] = {
        (mode.label(), interval): [0] * cfg.repetitions
        for mode in cfg.modes for interval in cfg.intervals}

    def record(outcome):
        label, interval, run_index, best = outcome
        cells[(label, interval)][run_index] = best
        if progress is not None:
            progress(label, interval, run_index, best)

    if jobs <= 1:
        _worker_init(str(cfg.instance_path))
        for task in tasks:
            record(_worker_run(task))
    else:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(jobs, initializer=_worker_init,
                      initargs=(str(cfg.instance_path),)) as pool:
            for outcome in pool.imap_unordered(_worker_run, tasks):
                record(outcome)

    return _aggregate(cfg, inst.name, cells)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _mode_columns(mode: ModeSpec) -> tuple[str, str, str]:
    if mode.name == "classic":
        return "classic", "", ""
    return "gated", repr(mode.alpha), repr(mode.beta)


def emit_reports(reports: Sequence[RunReport], out_dir: str | Path,
                 formats: Iterable[str] = ("csv",)) -> list[Path]:
    """Write raw and aggregate CSV files (and optionally a markdown table).

    ``runs.csv`` holds one row per run; ``summary.csv`` one row per cell.
    Floats are serialized with ``repr`` so parsing them back reproduces the
    aggregates exactly.
    """
    if not reports:
        raise ValueError("no reports to emit")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    formats = set(formats)
    unknown = formats - {"csv", "markdown"}
    if unknown:
        raise ValueError(f"unknown report formats: {sorted(unknown)}")

    if "csv" in formats:
        raw_path = out_dir / "runs.csv"
        with raw_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(RAW_HEADER)
            for rep in reports:
                mode, alpha, beta = _mode_columns(rep.mode)
                for run_index, best in enumerate(rep.best_lengths):
                    writer.writerow([rep.instance, mode, alpha, beta,
                                     rep.interval, run_index, best])
        written.append(raw_path)

        summary_path = out_dir / "summary.csv"
        with summary_path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(SUMMARY_HEADER)
            for rep in reports:
                mode, alpha, beta = _mode_columns(rep.mode)
                writer.writerow([
                    rep.instance, mode, alpha, beta, rep.interval,
                    _fmt(rep.mean), _fmt(rep.stddev), _fmt(rep.optimum),
                    _fmt(rep.df), _fmt(rep.t_stat), _fmt(rep.p_value),
                    _fmt(rep.significant)])
        written.append(summary_path)

    if "markdown" in formats:
        md_path = out_dir / "report.md"
        md_path.write_text(render_markdown(reports), encoding="utf-8")
        written.append(md_path)
    return written


def render_markdown(reports: Sequence[RunReport]) -> str:
    """Aggregate table per (instance, mode); significant cells are starred."""
    lines = []
    seen_groups = []
    for rep in reports:
        group = (rep.instance, rep.mode.label())
        if group not in seen_groups:
            seen_groups.append(group)
    for instance, label in seen_groups:
        group = [r for r in reports
                 if r.instance == instance and r.mode.label() == label]
        mode = group[0].mode
        if mode.name == "classic":
            title = f"{instance} — classic"
        else:
            title = f"{instance} — gated (alpha={mode.alpha}, beta={mode.beta})"
        lines.append(f"## {title}")
        lines.append("")
        lines.append("| interval | mean | stddev | optimum | DF | p-value |")
        lines.append("|---------:|-----:|-------:|--------:|---:|--------:|")
        for r in group:
            star = "*" if r.significant else ""
            mean = f"{r.mean:.1f}{star}"
            opt = _fmt(r.optimum)
            df = f"{r.df:.6f}" if r.df is not None else ""
            pv = f"{r.p_value:.4f}" if r.p_value is not None else ""
            lines.append(f"| {r.interval} | {mean} | {r.stddev:.2f} "
                         f"| {opt} | {df} | {pv} |")
        lines.append("")
    lines.append("`*` significantly different from the classic cell at the "
                 "same interval (Welch t-test, 95% confidence).")
    lines.append("")
    return "\n".join(lines)


def read_raw_csv(path: str | Path) -> list[dict]:
    """Read a raw runs CSV back into row dicts (types restored)."""
    rows = []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RAW_HEADER:
            raise ConfigError(
                f"unexpected raw CSV header {reader.fieldnames}, "
                f"expected {RAW_HEADER}")
        for row in reader:
            rows.append({
                "instance": row["instance"],
                "mode": row["mode"],
                "alpha": float(row["alpha"]) if row["alpha"] else None,
                "beta": float(row["beta"]) if row["beta"] else None,
                "interval": int(row["interval"]),
                "run_index": int(row["run_index"]),
                "best_length": int(row["best_length"]),
            })
    return rows


def reports_from_raw_rows(rows: Sequence[dict],
                          optimum: int | None = None) -> list[RunReport]:
    """Rebuild aggregate reports (and t-tests) from raw per-run rows."""
    if not rows:
        raise ValueError("no raw rows")
    cells: dict[tuple, dict[int, int]] = {}
    for row in rows:
        key = (row["instance"], row["mode"], row["alpha"], row["beta"],
               row["interval"])
        cells.setdefault(key, {})[row["run_index"]] = row["best_length"]

    reports = []
    for key in cells:
        instance, mode_name, alpha, beta, interval = key
        by_index = cells[key]
        lengths = [by_index[i] for i in sorted(by_index)]
        mode = (ModeSpec("classic") if mode_name == "classic"
                else ModeSpec("gated", alpha=alpha, beta=beta))
        opt = optimum if optimum is not None else known_optimum(instance)
        mean = sample_mean(lengths)
        report = RunReport(
            instance=instance, mode=mode, interval=interval,
            best_lengths=lengths, mean=mean, stddev=sample_stddev(lengths),
            optimum=opt, df=difficulty(mean, opt) if opt is not None else None)
        if mode.name == "gated":
            baseline_key = (instance, "classic", None, None, interval)
            if baseline_key in cells:
                base_rows = cells[baseline_key]
                baseline = [base_rows[i] for i in sorted(base_rows)]
                welch = welch_t_test(lengths, baseline, confidence=0.95)
                report.t_stat = welch.t_stat
                report.p_value = welch.p_value
                report.significant = welch.significant
        reports.append(report)
    return reports


def gate_curve(alpha: float, beta: float, points: int = 1001) -> list[tuple[float, float]]:
    """(d, p) samples of the gate function on a uniform grid over [0, 1]."""
    from .diversity import success_probability
    if points < 2:
        raise ValueError("need at least 2 points")
    params = DiversityParams(alpha=alpha, beta=beta)
    step = 1.0 / (points - 1)
    grid = [min(i * step, 1.0) for i in range(points)]
    return [(d, success_probability(d, params)) for d in grid]
