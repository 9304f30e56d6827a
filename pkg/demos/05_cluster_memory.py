# %% [markdown]
# # Keeping clusters alive between tasks
# With cluster_persistence > 0 a cluster that finishes a task waits in mode 3
# for a while and picks the queued task closest to its own size, instead of
# dissolving and being rebuilt from scratch.

# %%
from collections import Counter

from drapsim.core import init_world, run_to_completion, tick
from drapsim.drap import DrapConfig, DrapPolicy
from drapsim.metrics import middle_utilization
from drapsim.workload import WorkloadSpec, generate

for persistence in (0, 5, 25):
    world = init_world(100, generate(WorkloadSpec(count=1000, seed=3)), 0.2, seed=3)
    samples, s = run_to_completion(world, DrapPolicy(DrapConfig(cluster_persistence=persistence)))
    print(f"persistence {persistence:3d}: T_complete {s.t_complete}, T_wait {s.t_wait:.1f}, "
          f"mid-run utilization {middle_utilization(samples):.3f}")

# %% [markdown]
# Mode census part way through a run with persistence 25.

# %%
world = init_world(100, generate(WorkloadSpec(count=1000, seed=3)), 0.2, seed=3)
policy = DrapPolicy(DrapConfig(cluster_persistence=25))
for _ in range(500):
    tick(world, policy)
print(sorted(Counter(a.mode for a in world.agents).items()))
