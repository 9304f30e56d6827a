"""Multi-trial experiments, node-count sweeps, power-law fits and CSV output."""
from __future__ import annotations

import csv
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence, Union

import numpy as np

from .core import ConfigError, init_world, run_to_completion
from .drap import DrapConfig, DrapPolicy
from .fifo import FifoPolicy
from .metrics import RunSummary, TickSample, confidence_interval
from .workload import WorkloadSpec, generate

log = logging.getLogger(__name__)

DEFAULT_BASE_RADIUS = 0.2

SUMMARY_COLUMNS = ["trial", "scheduler", "nodes", "tasks", "seed", "t_complete", "t_wait",
                   "mu_mean", "incomplete", "t_complete_ci_lo", "t_complete_ci_hi",
                   "t_wait_ci_lo", "t_wait_ci_hi", "mu_mean_ci_lo", "mu_mean_ci_hi"]
TIMESERIES_COLUMNS = ["tick", "busy_nodes", "utilization", "traversals", "queue_length"]
SWEEP_COLUMNS = ["nodes", "radius", "t_complete_mean", "t_complete_ci_lo", "t_complete_ci_hi",
                 "t_wait_mean", "t_wait_ci_lo", "t_wait_ci_hi"]
FIT_COLUMNS = ["metric", "exponent", "coefficient", "r_squared"]


@dataclass(frozen=True)
class ExperimentConfig:
    scheduler: str = "drap"
    nodes: int = 100
    tasks: int = 1000
    trials: int = 10
    base_seed: int = 0
    neighbor_radius: Union[float, str] = "auto"
    # radius at 100 nodes; "auto" scales it to keep neighbour counts constant
    base_radius: float = DEFAULT_BASE_RADIUS
    workload: WorkloadSpec = field(default_factory=WorkloadSpec)
    drap: DrapConfig = field(default_factory=DrapConfig)
    # "fixed": every FIFO cluster has workload.cpu_max nodes; "workload": i.i.d. sizes
    fifo_partition: str = "fixed"
    max_ticks: int = 10**6
    out_dir: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        if self.scheduler not in ("drap", "fifo"):
            raise ConfigError(f"unknown scheduler {self.scheduler!r}")
        if self.trials < 1 or self.nodes < 1 or self.tasks < 0:
            raise ConfigError("need trials >= 1, nodes >= 1, tasks >= 0")
        if self.fifo_partition not in ("fixed", "workload"):
            raise ConfigError(f"unknown fifo_partition {self.fifo_partition!r}")
        if self.neighbor_radius != "auto" and not isinstance(self.neighbor_radius, (int, float)):
            raise ConfigError("neighbor_radius must be a number or 'auto'")

    @property
    def radius(self) -> float:
        if self.neighbor_radius == "auto":
            return min(math.sqrt(2), self.base_radius * math.sqrt(100 / self.nodes))
        return float(self.neighbor_radius)


@dataclass
class ExperimentResult:
    summaries: list[RunSummary]
    timeseries: list[TickSample]
    aggregate: Optional[dict]

    @property
    def incomplete(self) -> bool:
        return any(s.incomplete for s in self.summaries)


@dataclass
class SweepResult:
    rows: list[dict]
    fits: dict


def trial_seeds(seed: int) -> tuple[int, int, int]:
    """Independent (workload, placement, partition) seeds for one trial."""
    state = np.random.SeedSequence(seed).generate_state(3)
    return tuple(int(s) for s in state)


def make_policy(config: ExperimentConfig, seed: int):
    if config.scheduler == "drap":
        return DrapPolicy(config.drap)
    sizes = config.workload.cpu_max if config.fifo_partition == "fixed" else config.workload
    return FifoPolicy(sizes, trial_seeds(seed)[2])


def run_trial(config: ExperimentConfig, seed: int) -> tuple[list[TickSample], RunSummary]:
    w_seed, p_seed, _ = trial_seeds(seed)
    spec = replace(config.workload, count=config.tasks, seed=w_seed)
    world = init_world(config.nodes, generate(spec), config.radius, p_seed)
    samples, summary = run_to_completion(world, make_policy(config, seed), config.max_ticks)
    return samples, replace(summary, seed=seed)


def _run_trial_args(args):
    return run_trial(*args)


def _run_many(jobs: Sequence[tuple[ExperimentConfig, int]], workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_trial_args, jobs))
    return [run_trial(c, s) for c, s in jobs]


def aggregate(summaries: Sequence[RunSummary]) -> Optional[dict]:
    if len(summaries) < 2:
        return None
    out = {}
    for metric in ("t_complete", "t_wait", "mu_mean"):
        mean, lo, hi = confidence_interval([getattr(s, metric) for s in summaries])
        out[metric], out[f"{metric}_ci_lo"], out[f"{metric}_ci_hi"] = mean, lo, hi
    return out


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run ``config.trials`` independent trials with seeds ``base_seed + i``.

    When ``out_dir`` is set, writes summary.csv, timeseries.csv (first trial)
    and config.txt there.
    """
    jobs = [(config, config.base_seed + i) for i in range(config.trials)]
    results = _run_many(jobs, config.jobs)
    res = ExperimentResult([s for _, s in results], results[0][0],
                           aggregate([s for _, s in results]))
    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        with open(os.path.join(config.out_dir, "summary.csv"), "w", newline="") as fh:
            write_summary_csv(fh, res)
        with open(os.path.join(config.out_dir, "timeseries.csv"), "w", newline="") as fh:
            write_timeseries_csv(fh, res.timeseries)
        with open(os.path.join(config.out_dir, "config.txt"), "w") as fh:
            write_config(fh, config)
    return res


def write_summary_csv(fh, result: ExperimentResult):
    w = csv.DictWriter(fh, SUMMARY_COLUMNS, restval="", lineterminator="\n")
    w.writeheader()
    for i, s in enumerate(result.summaries):
        w.writerow({"trial": i, "scheduler": s.scheduler, "nodes": s.nodes, "tasks": s.tasks,
                    "seed": s.seed, "t_complete": s.t_complete, "t_wait": s.t_wait,
                    "mu_mean": s.mu_mean, "incomplete": int(s.incomplete)})
    if result.aggregate is not None:
        s0 = result.summaries[0]
        w.writerow({"trial": "mean", "scheduler": s0.scheduler, "nodes": s0.nodes,
                    "tasks": s0.tasks, "incomplete": int(result.incomplete),
                    **result.aggregate})


def write_timeseries_csv(fh, samples: Sequence[TickSample]):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TIMESERIES_COLUMNS)
    for s in samples:
        w.writerow([s.tick, s.busy_nodes, s.utilization, s.traversals, s.queue_length])


def write_config(fh, config: ExperimentConfig):
    flat = {k: v for k, v in asdict(config).items() if k not in ("workload", "drap")}
    flat["radius_used"] = config.radius
    for k, v in asdict(config.workload).items():
        if k not in ("count", "seed"):
            flat[f"workload.{k}"] = v
    for k, v in asdict(config.drap).items():
        flat[f"drap.{k}"] = v
    for k, v in flat.items():
        fh.write(f"{k} = {v}\n")


def fit_power_law(points) -> tuple[float, float, float]:
    """Least-squares line through (log2 x, log2 y).

    Returns ``(exponent, coefficient, r_squared)`` for ``y = coefficient * x**exponent``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < 2:
        raise ValueError("need at least 2 points")
    if np.any(pts <= 0):
        raise ValueError("power-law fit needs positive x and y")
    lx, ly = np.log2(pts[:, 0]), np.log2(pts[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    # flat data: y has no variance to explain
    if ss_tot <= 1e-24 * max(1.0, float(np.sum(ly ** 2))):
        return float(slope), float(2.0 ** intercept), 1.0
    r2 = 1.0 - ss_res / ss_tot
    return float(slope), float(2.0 ** intercept), r2


def sweep_nodes(config: ExperimentConfig, node_counts: Sequence[int]) -> SweepResult:
    """Run the full experiment at each node count and fit timing power laws."""
    if not node_counts or any(n < 1 for n in node_counts):
        raise ConfigError("node_counts must be non-empty and >= 1")
    configs = [replace(config, nodes=int(n), out_dir=None) for n in node_counts]
    jobs = [(c, c.base_seed + i) for c in configs for i in range(c.trials)]
    results = _run_many(jobs, config.jobs)
    rows = []
    for k, c in enumerate(configs):
        summ = [s for _, s in results[k * c.trials:(k + 1) * c.trials]]
        row = {"nodes": c.nodes, "radius": c.radius}
        for metric in ("t_complete", "t_wait"):
            vals = [getattr(s, metric) for s in summ]
            if len(vals) >= 2:
                mean, lo, hi = confidence_interval(vals)
            else:
                mean, lo, hi = float(vals[0]), "", ""
            row.update({f"{metric}_mean": mean, f"{metric}_ci_lo": lo, f"{metric}_ci_hi": hi})
        row["incomplete"] = any(s.incomplete for s in summ)
        rows.append(row)

    fits = {}
    if len(rows) < 2:
        log.warning("power-law fit skipped: need at least 2 node counts, got %d", len(rows))
    else:
        for metric in ("t_complete", "t_wait"):
            pts = [(r["nodes"], r[f"{metric}_mean"]) for r in rows]
            if any(y <= 0 for _, y in pts):
                log.warning("power-law fit for %s skipped: non-positive means", metric)
                continue
            fits[metric] = fit_power_law(pts)

    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        with open(os.path.join(config.out_dir, "sweep.csv"), "w", newline="") as fh:
            w = csv.DictWriter(fh, SWEEP_COLUMNS, extrasaction="ignore", lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        with open(os.path.join(config.out_dir, "fit.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(FIT_COLUMNS)
            for metric, (e, c, r2) in fits.items():
                w.writerow([metric, e, c, r2])
        with open(os.path.join(config.out_dir, "config.txt"), "w") as fh:
            write_config(fh, config)
    return SweepResult(rows, fits)


def read_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file; blank lines and ``#`` comments are skipped."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out
