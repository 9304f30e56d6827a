"""World state and the randomized lock-step tick engine.

A :class:`World` holds every piece of mutable simulation state. Schedulers
are plugged in as :class:`Policy` objects; the engine only shuffles the
agents, calls the policy's per-agent handler, advances fully staffed tasks
and books completions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .metrics import RunSummary, TickSample, mu_cluster, t_wait

FREE, HOLDING, IDLE_CLUSTER, BUSY_CLUSTER = 1, 2, 3, 4
MODES = (FREE, HOLDING, IDLE_CLUSTER, BUSY_CLUSTER)


class ConfigError(ValueError):
    pass


class InvariantError(AssertionError):
    pass


@dataclass
class Task:
    id: int
    cpu_req: int
    time_total: int
    time_rem: int
    arrival_time: int = 0
    start_time: Optional[int] = None
    completion_time: Optional[int] = None
    # first tick on which the task actually progressed
    run_start: Optional[int] = None


@dataclass
class Agent:
    id: int
    position: tuple[float, float]
    mode: int = FREE
    cluster_id: Optional[int] = None
    task_id: Optional[int] = None
    time_rem: int = 0
    cpu_cluster: int = 1

    @property
    def info_vector(self) -> tuple[int, int]:
        return (self.time_rem, self.cpu_cluster)


@dataclass
class Cluster:
    id: int
    leader_id: int
    member_ids: list[int]
    task_id: Optional[int] = None
    idle_since: Optional[int] = None
    static: bool = False

    @property
    def size(self) -> int:
        return len(self.member_ids)


@dataclass
class Assignment:
    """A task that has left the queue and is held by an agent or a cluster."""

    task: Task
    leader_id: int
    cluster_id: Optional[int]
    claimed_at: int


@dataclass(frozen=True)
class TickReport:
    busy_nodes: int
    traversals: int
    completions: int


class TaskQueue:
    """Ordered queue of unallocated tasks with a vectorized view of cpu_req."""

    def __init__(self, tasks=()):
        self._tasks: list[Task] = list(tasks)
        self.reqs = np.array([t.cpu_req for t in self._tasks], dtype=np.int64)

    def __len__(self):
        return len(self._tasks)

    def __iter__(self) -> Iterator[Task]:
        return iter(self._tasks)

    def __getitem__(self, i) -> Task:
        return self._tasks[i]

    def pop(self, pos: int = 0) -> Task:
        task = self._tasks.pop(pos)
        self.reqs = np.delete(self.reqs, pos)
        return task

    def push_front(self, task: Task):
        self._tasks.insert(0, task)
        self.reqs = np.insert(self.reqs, 0, task.cpu_req)

    def ids(self) -> list[int]:
        return [t.id for t in self._tasks]


class Policy:
    """Scheduler hooks called by :func:`tick`. Subclasses override what they need."""

    name = "policy"

    def prepare(self, world: "World"):
        pass

    def begin_tick(self, world: "World"):
        pass

    def act(self, world: "World", agent_id: int):
        pass

    def progresses(self, world: "World", assignment: Assignment, size: int) -> bool:
        return size == assignment.task.cpu_req

    def on_task_complete(self, world: "World", assignment: Assignment):
        pass


@dataclass
class World:
    agents: list[Agent]
    queue: TaskQueue
    rng: np.random.Generator
    neighbor_radius: float
    positions: np.ndarray
    neighbor_lists: list[list[int]]
    total_tasks: int
    clusters: dict[int, Cluster] = field(default_factory=dict)
    assignments: dict[int, Assignment] = field(default_factory=dict)
    completed: list[Task] = field(default_factory=list)
    clock: int = 0
    traversal_count_this_tick: int = 0
    mu_samples: list[float] = field(default_factory=list)
    prepared: bool = False
    _next_cluster_id: int = 0

    @property
    def finished(self) -> bool:
        return len(self.queue) == 0 and not self.assignments

    def neighbors_of(self, agent_id: int) -> list[int]:
        if not 0 <= agent_id < len(self.agents):
            raise LookupError(f"unknown agent {agent_id}")
        return self.neighbor_lists[agent_id]

    def distance(self, a: int, b: int) -> float:
        return float(np.hypot(*(self.positions[a] - self.positions[b])))

    def task_of(self, task_id: int) -> Task:
        return self.assignments[task_id].task

    def members_of(self, assignment: Assignment) -> list[int]:
        if assignment.cluster_id is None:
            return [assignment.leader_id]
        return self.clusters[assignment.cluster_id].member_ids

    # -- state transitions shared by the policies --------------------------

    def release(self, agent_id: int):
        a = self.agents[agent_id]
        a.mode, a.cluster_id, a.task_id = FREE, None, None
        a.time_rem, a.cpu_cluster = 0, 1

    def hold(self, agent_id: int, task: Task):
        """Make a clusterless agent the sole holder of ``task``."""
        a = self.agents[agent_id]
        a.mode, a.cluster_id, a.task_id = HOLDING, None, task.id
        a.time_rem, a.cpu_cluster = task.time_rem, 1

    def new_cluster(self, leader_id: int, members=(), static=False) -> Cluster:
        cid = self._next_cluster_id
        self._next_cluster_id += 1
        ids = [leader_id] + [m for m in members if m != leader_id]
        cluster = Cluster(id=cid, leader_id=leader_id, member_ids=ids, static=static)
        lead = self.agents[leader_id]
        if lead.task_id is not None:
            cluster.task_id = lead.task_id
            self.assignments[lead.task_id].cluster_id = cid
        self.clusters[cid] = cluster
        self.sync_cluster(cluster)
        return cluster

    def sync_cluster(self, cluster: Cluster):
        """Refresh every member's mode and info vector from the cluster record."""
        task = self.task_of(cluster.task_id) if cluster.task_id is not None else None
        for m in cluster.member_ids:
            a = self.agents[m]
            a.cluster_id = cluster.id
            a.cpu_cluster = cluster.size
            if task is None:
                a.mode, a.task_id, a.time_rem = IDLE_CLUSTER, None, 0
            else:
                a.mode, a.task_id, a.time_rem = BUSY_CLUSTER, task.id, task.time_rem

    def dissolve(self, cluster_id: int):
        cluster = self.clusters.pop(cluster_id)
        for m in cluster.member_ids:
            self.release(m)

    def claim(self, pos: int, leader_id: int, cluster_id: Optional[int] = None) -> Task:
        """Pop the queue entry at ``pos`` and hand it to an agent or cluster."""
        task = self.queue.pop(pos)
        task.start_time = self.clock
        self.assignments[task.id] = Assignment(task, leader_id, cluster_id, self.clock)
        if cluster_id is None:
            self.hold(leader_id, task)
        else:
            cluster = self.clusters[cluster_id]
            cluster.task_id, cluster.idle_since = task.id, None
            self.sync_cluster(cluster)
        return task

    def unclaim(self, task_id: int) -> Assignment:
        """Put a held task back at the front of the queue."""
        assignment = self.assignments.pop(task_id)
        task = assignment.task
        task.start_time = None
        self.queue.push_front(task)
        return assignment


def _neighbor_lists(positions: np.ndarray, radius: float) -> list[list[int]]:
    n = len(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    out = []
    for i in range(n):
        near = np.flatnonzero(dist[i] <= radius)
        near = near[near != i]
        # lexsort: last key is primary
        order = np.lexsort((near, dist[i, near]))
        out.append([int(j) for j in near[order]])
    return out


def init_world(agent_count: int, tasks, neighbor_radius: float, seed: int,
               positions=None) -> World:
    """Create a world with all agents free and every task queued at t = 0.

    ``positions`` overrides the uniform random placement (an ``(n, 2)``
    array-like); the RNG is still seeded from ``seed``.
    """
    if agent_count < 1:
        raise ConfigError("agent_count must be >= 1")
    if not 0 < neighbor_radius <= math.sqrt(2):
        raise ConfigError("neighbor_radius must lie in (0, sqrt(2)]")
    rng = np.random.default_rng(seed)
    if positions is None:
        pos = rng.random((agent_count, 2))
    else:
        pos = np.asarray(positions, dtype=float).reshape(agent_count, 2)
    agents = [Agent(id=i, position=(float(x), float(y))) for i, (x, y) in enumerate(pos)]
    tasks = list(tasks)
    for t in tasks:
        t.arrival_time = 0
    return World(agents=agents, queue=TaskQueue(tasks), rng=rng,
                 neighbor_radius=float(neighbor_radius), positions=pos,
                 neighbor_lists=_neighbor_lists(pos, neighbor_radius),
                 total_tasks=len(tasks))


def tick(world: World, policy: Policy) -> TickReport:
    if world.finished:
        return TickReport(0, 0, 0)
    if not world.prepared:
        policy.prepare(world)
        world.prepared = True
    world.traversal_count_this_tick = 0
    policy.begin_tick(world)
    for aid in world.rng.permutation(len(world.agents)):
        policy.act(world, int(aid))

    busy = 0
    done = []
    for assignment in world.assignments.values():
        members = world.members_of(assignment)
        if not policy.progresses(world, assignment, len(members)):
            continue
        task = assignment.task
        if task.run_start is None:
            task.run_start = world.clock
            world.mu_samples.append(mu_cluster(task.cpu_req, len(members)))
        task.time_rem -= 1
        busy += min(task.cpu_req, len(members))
        for m in members:
            world.agents[m].time_rem = task.time_rem
        if task.time_rem == 0:
            done.append(assignment)

    for assignment in done:
        task = assignment.task
        del world.assignments[task.id]
        task.completion_time = world.clock + 1
        world.completed.append(task)
        policy.on_task_complete(world, assignment)

    world.clock += 1
    return TickReport(busy, world.traversal_count_this_tick, len(done))


def run_to_completion(world: World, policy: Policy, max_ticks: int = 10**6,
                      seed: Optional[int] = None) -> tuple[list[TickSample], RunSummary]:
    if max_ticks < 1:
        raise ConfigError("max_ticks must be >= 1")
    n = len(world.agents)
    samples = []
    while not world.finished and world.clock < max_ticks:
        t, qlen = world.clock, len(world.queue)
        rep = tick(world, policy)
        samples.append(TickSample(t, rep.busy_nodes, rep.busy_nodes / n,
                                  rep.traversals, qlen))
    done = world.completed
    summary = RunSummary(
        t_complete=world.clock,
        t_wait=t_wait(done) if done else 0.0,
        mu_mean=float(np.mean(world.mu_samples)) if world.mu_samples else 1.0,
        seed=seed,
        scheduler=policy.name,
        nodes=n,
        tasks=world.total_tasks,
        incomplete=not world.finished,
    )
    return samples, summary


def check_invariants(world: World):
    """Raise :class:`InvariantError` if any structural invariant is broken."""

    def fail(msg):
        raise InvariantError(f"t={world.clock}: {msg}")

    seen = {}
    for cid, c in world.clusters.items():
        if not c.member_ids or c.leader_id not in c.member_ids:
            fail(f"cluster {cid} has no leader among its members")
        for m in c.member_ids:
            if m in seen:
                fail(f"agent {m} in clusters {seen[m]} and {cid}")
            seen[m] = cid
            a = world.agents[m]
            if a.cluster_id != cid or a.cpu_cluster != c.size:
                fail(f"agent {m} out of sync with cluster {cid}")
            want = IDLE_CLUSTER if c.task_id is None else BUSY_CLUSTER
            if a.mode != want:
                fail(f"agent {m} in mode {a.mode}, cluster {cid} expects {want}")

    for a in world.agents:
        if a.mode not in MODES:
            fail(f"agent {a.id} has invalid mode {a.mode}")
        if a.mode in (FREE, HOLDING):
            if a.cluster_id is not None or a.cpu_cluster != 1:
                fail(f"clusterless agent {a.id} carries cluster state")
        elif a.cluster_id not in world.clusters or a.id not in seen:
            fail(f"agent {a.id} in mode {a.mode} without a live cluster")
        if a.mode in (FREE, IDLE_CLUSTER):
            if a.time_rem != 0 or a.task_id is not None:
                fail(f"task-less agent {a.id} has time_rem {a.time_rem}")
        else:
            if a.task_id not in world.assignments:
                fail(f"agent {a.id} works on unknown task {a.task_id}")
            if a.time_rem != world.task_of(a.task_id).time_rem:
                fail(f"agent {a.id} info vector stale")

    for tid, asg in world.assignments.items():
        if asg.cluster_id is None:
            holder = world.agents[asg.leader_id]
            if holder.mode != HOLDING or holder.task_id != tid:
                fail(f"task {tid} holder {holder.id} in mode {holder.mode}")
        elif world.clusters[asg.cluster_id].task_id != tid:
            fail(f"task {tid} not attached to cluster {asg.cluster_id}")

    n_queue, n_run, n_done = len(world.queue), len(world.assignments), len(world.completed)
    if n_queue + n_run + n_done != world.total_tasks:
        fail(f"task conservation: {n_queue}+{n_run}+{n_done} != {world.total_tasks}")

    for t in world.queue:
        if t.start_time is not None or t.completion_time is not None:
            fail(f"queued task {t.id} has lifecycle stamps")
    for t in list(world.queue) + [a.task for a in world.assignments.values()] + world.completed:
        if not (t.cpu_req >= 1 and t.time_total >= 1 and 0 <= t.time_rem <= t.time_total):
            fail(f"task {t.id} fields out of range")
        if (t.time_rem == 0) != (t.completion_time is not None):
            fail(f"task {t.id} completion stamp inconsistent")
        if t.start_time is not None and t.start_time < t.arrival_time:
            fail(f"task {t.id} started before arrival")
        if t.completion_time is not None and (t.start_time is None
                                              or t.completion_time < t.start_time):
            fail(f"task {t.id} completed before start")
