"""Command-line front end: ``drapsim run|sweep|scaling-law``.

Exit status: 0 on success, 1 on a usage or configuration error, 2 when any
run hit ``max_ticks`` before finishing.
"""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys

from .core import ConfigError
from .drap import DrapConfig
from .harness import (DEFAULT_BASE_RADIUS, ExperimentConfig, read_config_file,
                      run_experiment, sweep_nodes)
from .lymph import scaling_table
from .workload import WorkloadSpec

DEFAULTS = {
    "scheduler": "drap", "nodes": "100", "tasks": "1000", "trials": "10", "seed": "0",
    "radius": "auto", "base_radius": str(DEFAULT_BASE_RADIUS), "persistence": "0",
    "starvation": "50", "workload": "normal", "ordering": "shuffled", "sigma": "1.0",
    "time_per_cpu": "25", "cpu_min": "1", "cpu_max": "5", "fifo_partition": "fixed",
    "sweep": "50,100,150,200,250,300", "out": "out", "no_early_exit": "false",
    "max_ticks": "1000000", "jobs": "1",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _bool(s) -> bool:
    if isinstance(s, bool):
        return s
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off", ""):
        return False
    raise UsageError(f"not a boolean: {s!r}")


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated integers, got {s!r}") from None


def _add_experiment_flags(p):
    p.add_argument("--config", help="flat 'key = value' file; flags override it")
    p.add_argument("--scheduler", choices=["drap", "fifo"])
    p.add_argument("--nodes")
    p.add_argument("--tasks")
    p.add_argument("--trials")
    p.add_argument("--seed")
    p.add_argument("--radius", help="neighbour radius, or 'auto'")
    p.add_argument("--base-radius", dest="base_radius", help="radius at 100 nodes for 'auto'")
    p.add_argument("--persistence", help="ticks an idle cluster survives")
    p.add_argument("--starvation", help="ticks before an understaffed task is returned")
    p.add_argument("--workload", choices=["normal", "uniform"])
    p.add_argument("--ordering", choices=["shuffled", "adversarial-desc", "adversarial-asc"])
    p.add_argument("--sigma")
    p.add_argument("--time-per-cpu", dest="time_per_cpu")
    p.add_argument("--cpu-min", dest="cpu_min")
    p.add_argument("--cpu-max", dest="cpu_max")
    p.add_argument("--fifo-partition", dest="fifo_partition", choices=["fixed", "workload"])
    p.add_argument("--no-early-exit", dest="no_early_exit", action="store_const", const="true")
    p.add_argument("--max-ticks", dest="max_ticks")
    p.add_argument("--jobs", help="worker processes for independent trials")
    p.add_argument("--out")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="drapsim", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_experiment_flags(sub.add_parser("run", help="multi-trial experiment"))
    sw = sub.add_parser("sweep", help="node-count sweep with power-law fits")
    _add_experiment_flags(sw)
    sw.add_argument("--sweep", help='node counts, e.g. "50,100,150"')
    sl = sub.add_parser("scaling-law", help="optimal lymph-node size table")
    sl.add_argument("--alpha", type=float, default=2.0)
    sl.add_argument("--beta", type=float, default=1.0)
    sl.add_argument("--gamma", type=float, default=1.0)
    sl.add_argument("--n-values", dest="n_values", default="10,100,1000,10000,100000,1000000")
    sl.add_argument("--out", default="out")
    return parser


def merged_settings(args) -> dict:
    settings = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            from_file = read_config_file(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        settings.update(from_file)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    return settings


def config_from_settings(s: dict) -> ExperimentConfig:
    try:
        radius = s["radius"] if s["radius"] == "auto" else float(s["radius"])
        workload = WorkloadSpec(distribution=s["workload"],
                                ordering=s["ordering"].replace("-", "_"),
                                time_per_cpu=int(s["time_per_cpu"]), cpu_min=int(s["cpu_min"]),
                                cpu_max=int(s["cpu_max"]), sigma=float(s["sigma"]))
        drap = DrapConfig(cluster_persistence=int(s["persistence"]),
                          starvation_timeout=int(s["starvation"]),
                          early_exit_on_exact_fit=not _bool(s["no_early_exit"]))
        return ExperimentConfig(scheduler=s["scheduler"], nodes=int(s["nodes"]),
                                tasks=int(s["tasks"]), trials=int(s["trials"]),
                                base_seed=int(s["seed"]), neighbor_radius=radius,
                                base_radius=float(s["base_radius"]), workload=workload,
                                drap=drap, fifo_partition=s["fifo_partition"],
                                max_ticks=int(s["max_ticks"]), out_dir=s["out"],
                                jobs=int(s["jobs"]))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cmd_run(args) -> int:
    config = config_from_settings(merged_settings(args))
    res = run_experiment(config)
    agg = res.aggregate
    if agg:
        print(f"{config.scheduler}: T_complete {agg['t_complete']:.2f} "
              f"({agg['t_complete_ci_lo']:.2f}, {agg['t_complete_ci_hi']:.2f})  "
              f"T_wait {agg['t_wait']:.2f} ({agg['t_wait_ci_lo']:.2f}, {agg['t_wait_ci_hi']:.2f})  "
              f"mu {agg['mu_mean']:.3f}")
    else:
        s = res.summaries[0]
        print(f"{config.scheduler}: T_complete {s.t_complete}  T_wait {s.t_wait:.2f}  "
              f"mu {s.mu_mean:.3f}")
    print(f"wrote {config.out_dir}/summary.csv, {config.out_dir}/timeseries.csv")
    return 2 if res.incomplete else 0


def _cmd_sweep(args) -> int:
    settings = merged_settings(args)
    config = config_from_settings(settings)
    res = sweep_nodes(config, _int_list(settings["sweep"]))
    for metric, (e, c, r2) in res.fits.items():
        print(f"{metric}: {c:.4g} * nodes^{e:.4f}  (r^2 = {r2:.4f})")
    print(f"wrote {config.out_dir}/sweep.csv, {config.out_dir}/fit.csv")
    return 2 if any(r["incomplete"] for r in res.rows) else 0


def _cmd_scaling_law(args) -> int:
    try:
        Ns = [float(x) for x in args.n_values.split(",") if x.strip()]
        rows = scaling_table(args.alpha, args.beta, args.gamma, Ns)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, "scaling_law.csv")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["N", "optimal_n", "brute_force_n", "cost"])
        w.writerows(rows)
    print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "scaling-law": _cmd_scaling_law}
    try:
        return handler[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"drapsim: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"drapsim: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
