# %% [markdown]
# # Sizing aggregation units
# Units of n clusters pay n**alpha locally and N**gamma / n**beta to reach
# the other units. The best n grows as N**(gamma / (alpha + beta)).

# %%
from drapsim.harness import fit_power_law
from drapsim.lymph import classify_scaling, scaling_exponent, scaling_table

rows = scaling_table(2, 1, 1, [10, 1e2, 1e3, 1e4, 1e5, 1e6])
print(f"{'N':>10} {'optimal n':>10} {'integer n':>10} {'cost':>12}")
for N, n, nb, cost in rows:
    print(f"{N:10.0f} {n:10.3f} {nb:10d} {cost:12.1f}")

slope = fit_power_law([(N, n) for N, n, _, _ in rows])[0]
print("fitted growth exponent", round(slope, 4), "expected", scaling_exponent(2, 1, 1))

# %%
for abg in [(2, 1, 1), (1, 1, 3), (1, 1, 2), (1, 1, 0), (1, 1, -1)]:
    print(abg, classify_scaling(*abg))
