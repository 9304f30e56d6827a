import pytest

from drapsim import WorkloadSpec, generate
from drapsim.core import BUSY_CLUSTER, check_invariants, init_world, run_to_completion, tick
from drapsim.fifo import FifoPolicy, fifo_assign, init_fixed_clusters

from .helpers import task, tasks_with_reqs


def partition(w):
    return sorted(tuple(sorted(c.member_ids)) for c in w.clusters.values())


def test_partition_from_task_distribution_covers_everyone():
    w = init_world(100, [], 0.2, 0)
    init_fixed_clusters(w, WorkloadSpec(), seed=4)
    members = [m for c in w.clusters.values() for m in c.member_ids]
    assert sorted(members) == list(range(100))
    sizes = [c.size for c in w.clusters.values()]
    # every cluster but the last drawn one has a size from [1, 5]
    assert sum(1 for s in sizes if not 1 <= s <= 5) == 0
    check_invariants(w)


def test_fixed_size_partition():
    w = init_world(100, [], 0.2, 0)
    init_fixed_clusters(w, 5, seed=1)
    assert sorted(c.size for c in w.clusters.values()) == [5] * 20


def test_remainder_cluster():
    w = init_world(12, [], 0.2, 0)
    init_fixed_clusters(w, 5, seed=1)
    assert sorted(c.size for c in w.clusters.values()) == [2, 5, 5]


def test_single_agent_partition():
    w = init_world(1, [], 0.2, 0)
    init_fixed_clusters(w, WorkloadSpec(), seed=0)
    assert [c.member_ids for c in w.clusters.values()] == [[0]]


def test_partition_deterministic():
    a, b = init_world(50, [], 0.2, 3), init_world(50, [], 0.2, 3)
    init_fixed_clusters(a, WorkloadSpec(), seed=8)
    init_fixed_clusters(b, WorkloadSpec(), seed=8)
    assert partition(a) == partition(b)


def test_partition_is_spatially_greedy():
    # two tight groups far apart split along the gap
    pos = [(0.1, 0.1), (0.11, 0.1), (0.1, 0.11), (0.9, 0.9), (0.91, 0.9), (0.9, 0.91)]
    w = init_world(6, [], 0.05, 0, positions=pos)
    init_fixed_clusters(w, 3, seed=0)
    assert partition(w) == [(0, 1, 2), (3, 4, 5)]


def test_oversized_cluster_leaves_unused_nodes():
    pos = [(0.5 + 0.01 * i, 0.5) for i in range(5)]
    w = init_world(5, [task(0, 2)], 0.1, 0, positions=pos)
    samples, s = run_to_completion(w, FifoPolicy(5, 0), 1000)
    assert s.t_complete == 50
    assert s.mu_mean == pytest.approx(0.4)
    assert all(x.busy_nodes == 2 for x in samples)


def test_empty_queue_no_assignments():
    w = init_world(10, [], 0.2, 0)
    init_fixed_clusters(w, 5, 0)
    assert fifo_assign(w) == []


def test_lowest_idle_cluster_id_first():
    w = init_world(10, [task(0, 1)], 0.2, 0)
    init_fixed_clusters(w, 1, 0)
    for cid in list(w.clusters):
        if cid not in (4, 9):
            w.clusters[cid].task_id = -1  # mark busy
    made = fifo_assign(w)
    assert made == [(0, 4)]


def test_head_of_queue_order():
    w = init_world(10, tasks_with_reqs([5, 1, 3, 2]), 0.2, 0)
    init_fixed_clusters(w, 5, 0)
    made = fifo_assign(w)
    assert [t for t, _ in made] == [0, 1]
    assert [c for _, c in made] == sorted(c for _, c in made)
    assert w.queue.ids() == [2, 3]
    assert all(w.agents[m].mode == BUSY_CLUSTER for c in w.clusters.values() for m in c.member_ids)


def test_nominal_duration_even_when_understaffed():
    w = init_world(2, [task(0, 5)], 0.2, 0)
    _, s = run_to_completion(w, FifoPolicy(2, 0), 1000)
    assert s.t_complete == 125 and s.mu_mean == 1.0


def test_fifo_start_order_and_static_partition():
    w = init_world(40, generate(WorkloadSpec(count=120, seed=6)), 0.2, 6)
    order = w.queue.ids()
    pol = FifoPolicy(WorkloadSpec(), 6)
    tick(w, pol)
    before = partition(w)
    while not w.finished:
        tick(w, pol)
        assert partition(w) == before
        check_invariants(w)
    starts = {t.id: t.start_time for t in w.completed}
    seq = [starts[i] for i in order]
    assert seq == sorted(seq)
    assert min(w.mu_samples) < 1 and sum(w.mu_samples) / len(w.mu_samples) < 1
