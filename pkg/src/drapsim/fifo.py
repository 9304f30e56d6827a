"""FIFO baseline: static clusters take tasks strictly in queue order."""
from __future__ import annotations

from typing import Union

import numpy as np

from .core import Policy, World
from .workload import WorkloadSpec, draw_cpu_reqs

SizeSpec = Union[int, WorkloadSpec]


def _size_drawer(size_distribution: SizeSpec, rng: np.random.Generator):
    if isinstance(size_distribution, WorkloadSpec):
        return lambda: int(draw_cpu_reqs(size_distribution, rng, 1)[0])
    size = int(size_distribution)
    if size < 1:
        raise ValueError("cluster size must be >= 1")
    return lambda: size


def init_fixed_clusters(world: World, size_distribution: SizeSpec = 5, seed: int = 0):
    """Partition every agent into static, spatially compact clusters.

    ``size_distribution`` is either a fixed cluster size or a
    :class:`WorkloadSpec` whose cpu_req distribution supplies i.i.d. sizes.
    Each cluster grows from a random unassigned agent to its nearest
    unassigned agents; the last cluster takes whatever is left.
    """
    if world.clusters:
        raise ValueError("world already has clusters")
    rng = np.random.default_rng(seed)
    draw = _size_drawer(size_distribution, rng)
    unassigned = list(range(len(world.agents)))
    while unassigned:
        size = draw()
        seed_agent = unassigned[int(rng.integers(len(unassigned)))]
        rest = sorted((u for u in unassigned if u != seed_agent),
                      key=lambda u: (world.distance(seed_agent, u), u))
        members = [seed_agent] + rest[:size - 1]
        world.new_cluster(seed_agent, members, static=True)
        taken = set(members)
        unassigned = [u for u in unassigned if u not in taken]


def fifo_assign(world: World) -> list[tuple[int, int]]:
    """Hand head-of-queue tasks to idle clusters, lowest cluster id first."""
    idle = sorted(cid for cid, c in world.clusters.items() if c.task_id is None)
    made = []
    for cid in idle:
        if not len(world.queue):
            break
        world.traversal_count_this_tick += 1
        task = world.claim(0, world.clusters[cid].leader_id, cid)
        made.append((task.id, cid))
    return made


class FifoPolicy(Policy):
    """Static-partition FIFO. Tasks run for their nominal time whatever the cluster size."""

    name = "fifo"

    def __init__(self, size_distribution: SizeSpec = 5, seed: int = 0):
        self.size_distribution = size_distribution
        self.seed = seed

    def prepare(self, world):
        if not world.clusters:
            init_fixed_clusters(world, self.size_distribution, self.seed)

    def begin_tick(self, world):
        fifo_assign(world)

    def progresses(self, world, assignment, size):
        return True

    def on_task_complete(self, world, assignment):
        cluster = world.clusters[assignment.cluster_id]
        cluster.task_id = None
        cluster.idle_since = assignment.task.completion_time
        world.sync_cluster(cluster)
