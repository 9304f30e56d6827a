# %% [markdown]
# # Scaling with node count
# Node counts go up in steps of 50 while the neighbour radius shrinks as
# 1/sqrt(nodes), so each node keeps roughly the same number of neighbours.
# Timing should fall roughly as 1/nodes.

# %%
from drapsim.harness import ExperimentConfig, sweep_nodes

config = ExperimentConfig(trials=5)
res = sweep_nodes(config, [50, 100, 150, 200, 250, 300])

for row in res.rows:
    print(f"{row['nodes']:4d} nodes  r={row['radius']:.3f}  "
          f"T_complete {row['t_complete_mean']:8.1f}  T_wait {row['t_wait_mean']:8.1f}")

for metric, (exponent, coef, r2) in res.fits.items():
    print(f"{metric}: {coef:.4g} * nodes^{exponent:.3f}   r^2 {r2:.4f}")
