"""Reproducible task lists for the scheduling experiments."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Task

DISTRIBUTIONS = ("normal", "uniform")
ORDERINGS = ("shuffled", "adversarial_desc", "adversarial_asc")


@dataclass(frozen=True)
class WorkloadSpec:
    count: int = 1000
    distribution: str = "normal"
    ordering: str = "shuffled"
    time_per_cpu: int = 25
    cpu_min: int = 1
    cpu_max: int = 5
    seed: int = 0
    sigma: float = 1.0

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if self.cpu_min < 1 or self.cpu_min > self.cpu_max:
            raise ValueError("need 1 <= cpu_min <= cpu_max")
        if self.time_per_cpu < 1:
            raise ValueError("time_per_cpu must be >= 1")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"unknown distribution {self.distribution!r}")
        if self.ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")


def draw_cpu_reqs(spec: WorkloadSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Draw ``size`` integer CPU requirements from the workload distribution."""
    if spec.distribution == "normal":
        mean = (spec.cpu_min + spec.cpu_max) / 2
        raw = np.rint(rng.normal(mean, spec.sigma, size))
        return np.clip(raw, spec.cpu_min, spec.cpu_max).astype(np.int64)
    return rng.integers(spec.cpu_min, spec.cpu_max + 1, size=size)


def order_indices(reqs, ordering: str, rng: np.random.Generator = None) -> np.ndarray:
    """Queue order for tasks with the given cpu_reqs. Sorts are stable."""
    reqs = np.asarray(reqs)
    if ordering == "shuffled":
        return rng.permutation(len(reqs))
    if ordering == "adversarial_desc":
        return np.argsort(-reqs, kind="stable")
    if ordering == "adversarial_asc":
        return np.argsort(reqs, kind="stable")
    raise ValueError(f"unknown ordering {ordering!r}")


def generate(spec: WorkloadSpec) -> list[Task]:
    """Build the ordered task list described by ``spec``.

    Task ids follow draw order; the ordering is applied afterwards, so an
    adversarial list holds the same tasks as the shuffled one for a given
    seed.
    """
    rng = np.random.default_rng(spec.seed)
    reqs = draw_cpu_reqs(spec, rng, spec.count)
    tasks = []
    for i in order_indices(reqs, spec.ordering, rng):
        req = int(reqs[i])
        t = spec.time_per_cpu * req
        tasks.append(Task(id=int(i), cpu_req=req, time_total=t, time_rem=t))
    return tasks
