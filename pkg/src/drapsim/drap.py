"""Decentralized best-fit allocation with dynamically formed clusters.

Every agent is in one of four modes:

1. free, no task: scan the queue for the task whose cpu_req is closest to 1
2. free, holding a task: recruit free neighbours until the task is staffed
3. clustered, no task: the leader scans for the task closest to the
   cluster size, then sheds or recruits members to match it exactly
4. clustered, with a task: the leader keeps recruiting while short-handed;
   everyone else just works

A task only progresses once its holder's cluster size equals its cpu_req.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (BUSY_CLUSTER, FREE, HOLDING, IDLE_CLUSTER, Assignment, Policy,
                   TaskQueue, World)


@dataclass(frozen=True)
class DrapConfig:
    cluster_persistence: int = 0
    starvation_timeout: int = 50
    early_exit_on_exact_fit: bool = True

    def __post_init__(self):
        if self.cluster_persistence < 0:
            raise ValueError("cluster_persistence must be >= 0")
        if self.starvation_timeout < 1:
            raise ValueError("starvation_timeout must be >= 1")


def best_fit(reqs: np.ndarray, target: int, early_exit: bool = True) -> tuple[Optional[int], int]:
    """Queue position minimizing ``|cpu_req - target|`` and the entries examined.

    Ties go to the earliest position. With ``early_exit`` the scan stops at
    the first exact fit.
    """
    m = len(reqs)
    if m == 0:
        return None, 0
    scores = np.abs(reqs - target)
    if early_exit:
        exact = np.flatnonzero(scores == 0)
        if exact.size:
            return int(exact[0]), int(exact[0]) + 1
    return int(np.argmin(scores)), m


def mode1_select(queue: TaskQueue, early_exit: bool = True) -> tuple[Optional[int], int]:
    """Task id a free agent would take, and how many entries it looked at."""
    return mode3_select(queue, 1, early_exit)


def mode3_select(queue: TaskQueue, cpu_cluster: int,
                 early_exit: bool = True) -> tuple[Optional[int], int]:
    pos, examined = best_fit(queue.reqs, cpu_cluster, early_exit)
    return (None if pos is None else queue[pos].id), examined


def recruit(world: World, holder_id: int, deficit: int) -> set[int]:
    """Pull up to ``deficit`` free neighbours, nearest first, into the holder's cluster."""
    if deficit < 1:
        return set()
    got = []
    for nb in world.neighbors_of(holder_id):
        if world.agents[nb].mode == FREE:
            got.append(nb)
            if len(got) == deficit:
                break
    if not got:
        return set()
    holder = world.agents[holder_id]
    if holder.cluster_id is None:
        cluster = world.new_cluster(holder_id, got)
    else:
        cluster = world.clusters[holder.cluster_id]
        cluster.member_ids.extend(got)
        world.sync_cluster(cluster)
    return set(got)


def _shed_order(world: World, cluster) -> list[int]:
    others = [m for m in cluster.member_ids if m != cluster.leader_id]
    return sorted(others, key=lambda m: (world.distance(cluster.leader_id, m), m), reverse=True)


def resize_to_fit(world: World, cluster_id: int, cpu_req: int) -> bool:
    """Shed or recruit members until the cluster size equals ``cpu_req``.

    A cluster trimmed down to its leader alone is dissolved and the leader
    keeps the task as a clusterless holder.
    """
    cluster = world.clusters[cluster_id]
    if cluster.size > cpu_req:
        for m in _shed_order(world, cluster)[:cluster.size - cpu_req]:
            cluster.member_ids.remove(m)
            world.release(m)
        if cluster.size == 1:
            leader, task_id = cluster.leader_id, cluster.task_id
            del world.clusters[cluster_id]
            if task_id is None:
                world.release(leader)
            else:
                world.assignments[task_id].cluster_id = None
                world.hold(leader, world.task_of(task_id))
            return True
        world.sync_cluster(cluster)
    elif cluster.size < cpu_req:
        recruit(world, cluster.leader_id, cpu_req - cluster.size)
    return cluster.size == cpu_req


def on_task_complete(world: World, assignment: Assignment, persistence: int = 0):
    """Free the agents that finished a task, or park their cluster in mode 3."""
    if assignment.cluster_id is None:
        world.release(assignment.leader_id)
        return
    if persistence == 0:
        world.dissolve(assignment.cluster_id)
        return
    cluster = world.clusters[assignment.cluster_id]
    cluster.task_id = None
    cluster.idle_since = assignment.task.completion_time
    world.sync_cluster(cluster)


class DrapPolicy(Policy):
    name = "drap"

    def __init__(self, config: DrapConfig = DrapConfig()):
        self.config = config

    def act(self, world: World, agent_id: int):
        agent = world.agents[agent_id]
        if agent.mode == FREE:
            self._free(world, agent_id)
        elif agent.mode == HOLDING:
            self._staff(world, world.assignments[agent.task_id])
        else:
            cluster = world.clusters[agent.cluster_id]
            if cluster.leader_id != agent_id:
                return
            if agent.mode == IDLE_CLUSTER:
                self._idle_leader(world, cluster)
            elif agent.mode == BUSY_CLUSTER:
                self._staff(world, world.assignments[cluster.task_id])

    def _scan(self, world, target):
        pos, examined = best_fit(world.queue.reqs, target, self.config.early_exit_on_exact_fit)
        world.traversal_count_this_tick += examined
        return pos

    def _free(self, world, agent_id):
        pos = self._scan(world, 1)
        if pos is None:
            return
        task = world.claim(pos, agent_id)
        if task.cpu_req > 1:
            recruit(world, agent_id, task.cpu_req - 1)

    def _idle_leader(self, world, cluster):
        if world.clock - cluster.idle_since >= self.config.cluster_persistence:
            world.dissolve(cluster.id)
            return
        pos = self._scan(world, cluster.size)
        if pos is None:
            return
        task = world.claim(pos, cluster.leader_id, cluster.id)
        resize_to_fit(world, cluster.id, task.cpu_req)

    def _staff(self, world, assignment):
        task = assignment.task
        size = len(world.members_of(assignment))
        if size == task.cpu_req:
            return
        if world.clock - assignment.claimed_at >= self.config.starvation_timeout:
            self._starve(world, assignment)
        elif assignment.cluster_id is None:
            recruit(world, assignment.leader_id, task.cpu_req - size)
        else:
            resize_to_fit(world, assignment.cluster_id, task.cpu_req)

    def _starve(self, world, assignment):
        world.unclaim(assignment.task.id)
        if assignment.cluster_id is None:
            world.release(assignment.leader_id)
        else:
            world.dissolve(assignment.cluster_id)

    def on_task_complete(self, world, assignment):
        on_task_complete(world, assignment, self.config.cluster_persistence)
