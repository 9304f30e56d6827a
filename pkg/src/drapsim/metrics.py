"""Run measurements: timing, cluster utilization, traversal cost, intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats


class IncompleteRunError(ValueError):
    pass


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class TickSample:
    tick: int
    busy_nodes: int
    utilization: float
    traversals: int
    # queue length at the start of the tick
    queue_length: int


@dataclass(frozen=True)
class RunSummary:
    t_complete: int
    t_wait: float
    mu_mean: float
    seed: Optional[int]
    scheduler: str
    nodes: int
    tasks: int
    incomplete: bool = False


def mu_cluster(cpu_req: int, cpu_cluster: int) -> float:
    """Fraction of a cluster's nodes a task can use; 1 when the cluster is not oversized."""
    if cpu_req < 1 or cpu_cluster < 1:
        raise ValueError("cpu_req and cpu_cluster must be >= 1")
    if cpu_cluster <= cpu_req:
        return 1.0
    return cpu_req / cpu_cluster


def t_wait(tasks) -> float:
    waits = []
    for t in tasks:
        if t.start_time is None:
            raise IncompleteRunError(f"task {t.id} never started")
        waits.append(t.start_time - t.arrival_time)
    if not waits:
        raise InsufficientDataError("no tasks")
    return float(np.mean(waits))


def confidence_interval(samples: Sequence[float], level: float = 0.95) -> tuple[float, float, float]:
    """Student-t interval ``(mean, lo, hi)`` for the mean of ``samples``."""
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InsufficientDataError("need at least 2 samples")
    mean = float(x.mean())
    half = float(stats.t.ppf(0.5 + level / 2, x.size - 1) * x.std(ddof=1) / math.sqrt(x.size))
    return mean, mean - half, mean + half


def traversal_worst_case(n_clusters: int, m_tasks: int) -> int:
    if n_clusters < 0 or m_tasks < 0:
        raise ValueError("counts must be >= 0")
    return n_clusters * m_tasks


def middle_utilization(samples: Sequence[TickSample]) -> float:
    """Mean utilization over the middle half of a run's ticks."""
    n = len(samples)
    if n == 0:
        return 0.0
    lo, hi = n // 4, max(n // 4 + 1, (3 * n) // 4)
    return float(np.mean([s.utilization for s in samples[lo:hi]]))


def traversal_fraction(samples: Sequence[TickSample], n_scanners: int, skip_first=True) -> float:
    """Mean per-tick ratio of queue entries examined to the O(nm) worst case.

    Ticks that start with an empty queue have a zero worst case and are
    left out.
    """
    rows = samples[1:] if skip_first else samples
    ratios = [s.traversals / traversal_worst_case(n_scanners, s.queue_length)
              for s in rows if s.queue_length > 0]
    return float(np.mean(ratios)) if ratios else 0.0
