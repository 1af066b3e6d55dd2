"""Command-line interface.

Subcommands:
  inspect FILE          parse a .tsp file and print a summary
  run CONFIG            execute a single run from a config (one cell)
  experiment CONFIG     execute the full (mode x interval) grid
  stats RAW.CSV         recompute aggregates and t-tests from raw run rows
  stats --curve A B     dump the gate function p(d) as two columns

Exit codes: 0 success, 1 configuration or parse error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .diversity import DiversityParams
from .experiment import (ConfigError, ModeSpec, emit_reports, gate_curve,
                         load_config, read_raw_csv, reports_from_raw_rows,
                         run_experiment, run_seed_entropy)
from .islands import MigrationPolicy, run_dea
from .tsplib import TsplibParseError, known_optimum, parse_file

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _cmd_inspect(args) -> int:
    inst = parse_file(args.file)
    print(f"name:      {inst.name}")
    print(f"dimension: {inst.dimension}")
    print(f"metric:    {inst.metric}")
    optimum = known_optimum(inst.name)
    print(f"optimum:   {optimum if optimum is not None else 'not registered'}")
    if inst.coords is not None:
        xs, ys = inst.coords[:, 0], inst.coords[:, 1]
        print(f"x range:   [{xs.min():g}, {xs.max():g}]")
        print(f"y range:   [{ys.min():g}, {ys.max():g}]")
    print(f"w(0,1):    {inst.edge_weight(0, 1)}")
    return EXIT_OK


def _pick_mode(cfg, args) -> ModeSpec:
    if args.mode is None:
        return cfg.modes[0]
    if args.mode == "classic":
        return ModeSpec("classic")
    alpha = args.alpha if args.alpha is not None else 1.0
    beta = args.beta if args.beta is not None else 1.0
    return ModeSpec("gated", alpha=alpha, beta=beta)


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    mode = _pick_mode(cfg, args)
    interval = args.interval if args.interval is not None else cfg.intervals[0]
    policy = MigrationPolicy(interval=interval, rounds=cfg.rounds,
                             mode=mode.name, size=cfg.migration_size,
                             diversity=mode.diversity_params())
    inst = parse_file(cfg.instance_path)
    seed = run_seed_entropy(cfg.seed, mode, interval, args.rep)
    print(f"instance {inst.name} (k={inst.dimension}), mode {mode.label()}, "
          f"interval {interval}, rounds {cfg.rounds}, run {args.rep}")
    result = run_dea(inst, policy, n_islands=cfg.islands, island_size=cfg.subpop,
                     seed=seed, velocity_threshold=cfg.velocity_threshold,
                     p_mu0=cfg.p_mu0, p_ma0=cfg.p_ma0)
    optimum = cfg.optimum if cfg.optimum is not None else known_optimum(inst.name)
    print(f"best length: {result.best_length}")
    if optimum is not None:
        gap = (result.best_length - optimum) / optimum
        print(f"optimum:     {optimum} (gap {gap:.4%})")
    if args.trace is not None:
        path = Path(args.trace)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["round", "best_length", "mean_diversity",
                             "accepted_islands"])
            for rnd in range(policy.rounds):
                writer.writerow([
                    rnd, int(result.best_trace[rnd]),
                    repr(float(result.diversity_trace[rnd].mean())),
                    int(result.accept_trace[rnd].sum())])
        print(f"trace written to {path}")
    return EXIT_OK


def _cmd_experiment(args) -> int:
    cfg = load_config(args.config)
    total = len(cfg.modes) * len(cfg.intervals) * cfg.repetitions
    done = [0]

    def progress(label, interval, run_index, best):
        done[0] += 1
        print(f"[{done[0]}/{total}] {label} interval={interval} "
              f"run={run_index}: best={best}", flush=True)

    reports = run_experiment(cfg, jobs=args.jobs,
                             progress=progress if not args.quiet else None)
    formats = ["csv", "markdown"] if args.markdown else ["csv"]
    written = emit_reports(reports, cfg.out_dir, formats=formats)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    if args.curve is not None:
        alpha, beta = args.curve
        DiversityParams(alpha=alpha, beta=beta)   # validate early
        for d, p in gate_curve(alpha, beta, points=args.points):
            print(f"{d!r} {p!r}")
        return EXIT_OK
    if args.raw_csv is None:
        raise ConfigError("stats needs a raw CSV path or --curve ALPHA BETA")
    rows = read_raw_csv(args.raw_csv)
    reports = reports_from_raw_rows(rows, optimum=args.optimum)
    formats = ["csv", "markdown"] if args.markdown else ["csv"]
    out_dir = args.out_dir if args.out_dir is not None else Path(args.raw_csv).parent
    written = emit_reports(reports, out_dir, formats=formats)
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="islandea",
        description="Island-model evolutionary TSP solver with "
                    "diversity-gated migration.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_inspect = sub.add_parser("inspect", help="parse a .tsp file and summarize it")
    p_inspect.add_argument("file")
    p_inspect.set_defaults(func=_cmd_inspect)

    p_run = sub.add_parser("run", help="execute a single run from a config")
    p_run.add_argument("config")
    p_run.add_argument("--mode", choices=["classic", "gated"], default=None,
                       help="override the config's first mode")
    p_run.add_argument("--alpha", type=float, default=None)
    p_run.add_argument("--beta", type=float, default=None)
    p_run.add_argument("--interval", type=int, default=None,
                       help="override the config's first interval")
    p_run.add_argument("--rep", type=int, default=0,
                       help="run index used for seed derivation")
    p_run.add_argument("--trace", default=None,
                       help="write a per-round trace CSV to this path")
    p_run.set_defaults(func=_cmd_run)

    p_exp = sub.add_parser("experiment", help="execute the full config grid")
    p_exp.add_argument("config")
    p_exp.add_argument("--jobs", type=int, default=None,
                       help="worker processes (default: CPU count)")
    p_exp.add_argument("--markdown", action="store_true",
                       help="also render a markdown report")
    p_exp.add_argument("--quiet", action="store_true")
    p_exp.set_defaults(func=_cmd_experiment)

    p_stats = sub.add_parser("stats",
                             help="recompute aggregates from raw rows, or "
                                  "dump the gate curve")
    p_stats.add_argument("raw_csv", nargs="?", default=None)
    p_stats.add_argument("--out-dir", default=None)
    p_stats.add_argument("--optimum", type=int, default=None,
                         help="override the registered optimum")
    p_stats.add_argument("--markdown", action="store_true")
    p_stats.add_argument("--curve", nargs=2, type=float, default=None,
                         metavar=("ALPHA", "BETA"),
                         help="print p(d) over d in [0, 1] as two columns")
    p_stats.add_argument("--points", type=int, default=1001)
    p_stats.set_defaults(func=_cmd_stats)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TsplibParseError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except KeyboardInterrupt:
        return EXIT_RUNTIME
    except Exception as exc:   # runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
