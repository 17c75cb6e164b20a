# %% [markdown]
# # Greedy and exact baselines
#
# The greedy solver walks to the nearest unvisited customer and then cuts
# the walk like the colony does. The exact solver enumerates every order
# on small instances.

# %%
from acoroute import AcoParams, GeneratorConfig, generate_instance, solve_aco, solve_exact, solve_greedy

inst = generate_instance(GeneratorConfig(n_customers=7, n_depots=2, vehicle_count=2, seed=3))

_, greedy = solve_greedy(inst)
_, colony, _ = solve_aco(inst, AcoParams(ants=20, iterations=100))
_, exact = solve_exact(inst)
_, full = solve_exact(inst, space="contiguous")
for name, b in [("greedy", greedy), ("colony", colony), ("exact, split orders", exact),
                ("exact, any routes", full)]:
    print(f"{name:>20} objective {b.weighted_objective:8.3f}  makespan {b.makespan_hours:.3f} h")

# %% [markdown]
# "split orders" is the space both heuristics search, so it is their oracle.
# "any routes" also tries every cut and depot choice; it can be shorter in
# distance because it ignores the makespan-first cut.
