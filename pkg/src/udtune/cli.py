"""``tune`` command line: ``table``, ``search`` and ``ga`` subcommands.

Exit codes: 0 success, 2 usage or configuration error, 3 search infeasible
(every candidate diverged).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

from . import kernels
from .config import ExperimentConfig, env_workers, load_config
from .discrepancy import DEFAULT_BUDGET, select_columns
from .errors import ConfigError, InvalidArgumentError, NoFeasibleCandidateError
from .gabaseline import run_ga
from .lattice import build_full_table
from .odesim import simulate
from .udsearch import build_space, evaluate, make_objective, run_search

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 2, 3

log = logging.getLogger("udtune")


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _fmt(v):
    return f"{v:.6g}" if math.isfinite(v) else "inf"


def _out_dir(args, cfg: ExperimentConfig | None = None) -> Path:
    if args.out:
        return Path(args.out)
    if cfg is not None and cfg.output:
        return Path(cfg.output)
    return Path("out")


def _selected_table_csv(table, selection) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f"h_{table.generators[i]}" for i in selection.indices])
    w.writerows(table.levels[:, list(selection.indices)].tolist())
    return buf.getvalue()


def cmd_table(args) -> int:
    table = build_full_table(args.n)
    selection = select_columns(table, args.s, args.budget)
    out = _out_dir(args)
    _write(out / "ud_table.csv", table.to_csv())
    _write(out / "selection.json", selection.to_json())
    gens = [table.generators[i] for i in selection.indices]
    print(f"U_{table.n}({table.n}^{table.m}) written to {out / 'ud_table.csv'}")
    print(f"use table: columns {list(selection.indices)} (generators {gens}), "
          f"CD2 = {selection.cd2:.6g} [{selection.method}]")
    return EXIT_OK


def _print_row(names, row, report=None):
    print("best gains:")
    for name, g in zip(names, row.gains):
        print(f"  {name:>10s} = {g:.6g}")
    if row.report is not None:
        for name, v in row.report.per_channel:
            print(f"  {row.report.criterion}[{name}] = {_fmt(v)}")
    print(f"  aggregate = {_fmt(row.aggregate)}")
    for name, v in row.overshoot:
        print(f"  overshoot[{name}] = {v:.3f}%")


def _verification(cfg: ExperimentConfig, out: Path) -> int:
    plant = cfg.plant
    row, traj = evaluate(plant, cfg.fixed_gains, cfg.sim, cfg.criterion, cfg.weights, row=1)
    data = {"mode": "verification", "plant": cfg.plant_key, "criterion": cfg.criterion,
            "best": row.to_dict(plant.gain_names)}
    if traj is not None:
        data["final_time"] = float(traj.times[-1]) if len(traj) else 0.0
        data["final_errors"] = dict(zip(plant.channel_names, traj.errors[-1].tolist())) if len(traj) else {}
    _write(out / "report.json", json.dumps(data, indent=2) + "\n")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row", *plant.gain_names, "aggregate", "diverged"])
    w.writerow([1, *[repr(g) for g in row.gains], repr(row.aggregate) if math.isfinite(row.aggregate) else "inf",
                int(row.diverged)])
    _write(out / "report.csv", buf.getvalue())
    if traj is not None:
        _write(out / "best_trajectory.csv", traj.to_csv())
    _print_row(plant.gain_names, row)
    if row.diverged:
        print("verification run diverged", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_search(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    if cfg.fixed_gains is not None:
        return _verification(cfg, out)
    n = args.n or cfg.n
    budget = args.budget or cfg.budget
    workers = args.workers or env_workers(cfg.workers)
    space = build_space(cfg.ranges, n)
    report = run_search(cfg.plant, space, cfg.sim, cfg.criterion, cfg.weights, workers=workers, budget=budget)
    _write(out / "report.json", report.to_json())
    _write(out / "report.csv", report.to_csv())
    _write(out / "ud_table.csv", _selected_table_csv(report.table, report.selection))
    _write(out / "selection.json", report.selection.to_json())
    if cfg.plant.objective is None:
        traj = simulate(cfg.plant, report.best.gains, cfg.sim)
        _write(out / "best_trajectory.csv", traj.to_csv())
    print(f"{cfg.plant_key}: n={n}, s={space.s}, columns {list(report.selection.indices)} "
          f"(CD2 {report.selection.cd2:.6g}, {report.selection.method}), "
          f"{sum(r.diverged for r in report.rows)} diverged")
    _print_row(space.names, report.best)
    print(f"wall time (evaluation): {report.wall_time:.4f} s [{kernels.BACKEND} kernels, {workers} worker(s)]")
    return EXIT_OK


def _ga_once(cfg: ExperimentConfig, seed: int, workers: int, out: Path):
    from dataclasses import replace
    ga_cfg = replace(cfg.ga, seed=seed)
    objective = make_objective(cfg.plant, cfg.sim, cfg.criterion, cfg.weights)
    rep = run_ga(objective, cfg.ranges, ga_cfg, workers=workers)
    _write(out / "ga_report.json", rep.to_json())
    _write(out / "ga_curve.csv", rep.curve_csv())
    if cfg.plant.objective is None and math.isfinite(rep.best_aggregate):
        _write(out / "best_trajectory.csv", simulate(cfg.plant, rep.best_gains, cfg.sim).to_csv())
    return rep


def cmd_ga(args) -> int:
    cfg = load_config(args.config)
    out = _out_dir(args, cfg)
    workers = args.workers or env_workers(cfg.workers)
    base_seed = cfg.ga.seed if args.seed is None else args.seed
    if args.repeat < 1:
        raise ConfigError("--repeat must be >= 1")
    reports = []
    for r in range(args.repeat):
        seed = base_seed + r
        target = out if args.repeat == 1 else out / f"seed_{seed}"
        rep = _ga_once(cfg, seed, workers, target)
        reports.append(rep)
        print(f"seed {seed}: best aggregate {_fmt(rep.best_aggregate)} after {rep.evaluations} evaluations, "
              f"wall time {rep.wall_time:.4f} s")
    if args.repeat > 1:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["seed", *cfg.plant.gain_names, "best_aggregate", "evaluations"])
        for rep in reports:
            agg = repr(rep.best_aggregate) if math.isfinite(rep.best_aggregate) else "inf"
            w.writerow([rep.seed, *[repr(g) for g in rep.best_gains], agg, rep.evaluations])
        _write(out / "ga_summary.csv", buf.getvalue())
    if all(not math.isfinite(rep.best_aggregate) for rep in reports):
        print("every GA candidate diverged", file=sys.stderr)
        return EXIT_INFEASIBLE
    best = min(reports, key=lambda r: (r.best_aggregate, r.seed))
    print(f"overall best (seed {best.seed}):")
    for name, g in zip(cfg.plant.gain_names, best.best_gains):
        print(f"  {name:>10s} = {g:.6g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tune", description="Uniform-design controller gain tuning")
    p.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("table", help="build a GLP uniform design table and its use table")
    t.add_argument("--n", type=int, required=True, help="runs / levels per factor")
    t.add_argument("--s", type=int, required=True, help="number of factors (columns to select)")
    t.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max subsets scored exhaustively")
    t.add_argument("--out", help="output directory (default: out)")
    t.set_defaults(func=cmd_table)

    s = sub.add_parser("search", help="run the uniform-design search from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--n", type=int, help="override n from the config")
    s.add_argument("--budget", type=int)
    s.add_argument("--workers", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    g = sub.add_parser("ga", help="run the adaptive GA baseline from a config file")
    g.add_argument("--config", required=True)
    g.add_argument("--seed", type=int)
    g.add_argument("--repeat", type=int, default=1, help="runs with seeds seed..seed+repeat-1")
    g.add_argument("--workers", type=int)
    g.add_argument("--out")
    g.set_defaults(func=cmd_ga)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"tune: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoFeasibleCandidateError as exc:
        print(f"tune: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
