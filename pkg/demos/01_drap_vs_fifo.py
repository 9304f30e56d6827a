# %% [markdown]
# # dRAP vs FIFO at full scale
# 100 nodes, 1000 tasks with cpu_req 1..5, ten paired trials. Each trial seed
# gives both schedulers the same workload and the same node placement.

# %%
from dataclasses import replace

import numpy as np

from drapsim.harness import ExperimentConfig, run_experiment
from drapsim.metrics import middle_utilization

base = ExperimentConfig(nodes=100, tasks=1000, trials=10)
results = {name: run_experiment(replace(base, scheduler=name)) for name in ("drap", "fifo")}

# %%
print(f"{'':6}{'T_complete':>28}{'T_wait':>28}{'mu':>8}")
for name, res in results.items():
    a = res.aggregate
    print(f"{name:6}"
          f"{a['t_complete']:10.1f} ({a['t_complete_ci_lo']:.1f}, {a['t_complete_ci_hi']:.1f})"
          f"{a['t_wait']:12.1f} ({a['t_wait_ci_lo']:.1f}, {a['t_wait_ci_hi']:.1f})"
          f"{a['mu_mean']:8.3f}")

d, f = results["drap"].aggregate, results["fifo"].aggregate
print(f"T_complete reduction {1 - d['t_complete'] / f['t_complete']:.1%}, "
      f"T_wait reduction {1 - d['t_wait'] / f['t_wait']:.1%}")

# %% [markdown]
# Global utilization over one run: the fraction of nodes doing useful work
# each tick.

# %%
for name, res in results.items():
    print(name, "mid-run utilization", round(middle_utilization(res.timeseries), 3))

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(7, 3.5))
    for name, res in results.items():
        u = np.array([s.utilization for s in res.timeseries])
        ax.plot(u, label=name, lw=0.8)
    ax.set_xlabel("timestep")
    ax.set_ylabel("fraction of nodes computing")
    ax.legend()
    fig.tight_layout()
    fig.savefig("utilization.png", dpi=120)
    print("saved utilization.png")
