# %% [markdown]
# # How much of the queue do agents actually scan?
# Worst case per tick is every node scanning the whole queue. Only free
# agents scan, and once the first tick has hired most of the grid there are
# few of them, so later ticks cost a small fraction of the worst case. The
# early-exit toggle mostly matters on the first tick: single-CPU tasks are
# exact fits for a free agent and get used up immediately.

# %%
import numpy as np

from drapsim.core import init_world, run_to_completion
from drapsim.drap import DrapConfig, DrapPolicy
from drapsim.metrics import traversal_fraction, traversal_worst_case
from drapsim.workload import WorkloadSpec, generate

print("worst case at full scale:", traversal_worst_case(100, 1000))

for early_exit in (True, False):
    world = init_world(100, generate(WorkloadSpec(count=1000, seed=1)), 0.2, seed=1)
    samples, summary = run_to_completion(world, DrapPolicy(DrapConfig(early_exit_on_exact_fit=early_exit)))
    trav = np.array([s.traversals for s in samples])
    print(f"early exit {early_exit!s:5}: first tick {trav[0]}, "
          f"later ticks mean {trav[1:].mean():.1f} / max {trav[1:].max()}, "
          f"fraction of worst case {traversal_fraction(samples, 100):.4f}, "
          f"T_complete {summary.t_complete}")
