# %% [markdown]
# # Ant colony solver
#
# Ants build customer orders one step at a time. The chance of moving to a
# node grows with trail strength and with the inverse of the distance. Each
# order is cut into routes, and good orders leave more trail behind.

# %%
from acoroute import AcoParams, GeneratorConfig, generate_instance, solve_aco
from acoroute.aco import PheromoneMatrix, transition_probabilities

inst = generate_instance(GeneratorConfig(n_customers=12, n_depots=3, vehicle_count=3, seed=7))

# %% [markdown]
# Move probabilities from a depot with a flat trail: close customers win.

# %%
depot = inst.depots[0].id
probs = transition_probabilities(depot, set(inst.customer_ids), PheromoneMatrix.uniform(inst, 1.0),
                                 inst, AcoParams())
for node, p in sorted(probs.items(), key=lambda kv: -kv[1])[:4]:
    print(node, round(p, 3))

# %%
solution, breakdown, trace = solve_aco(inst, AcoParams(ants=20, iterations=80, seed=1))
for r in solution.routes:
    print(r)
print("objective", round(breakdown.weighted_objective, 3))

# the best-so-far curve never goes up
best = trace.best_so_far()
print([round(best[i], 2) for i in range(0, len(best), 10)])

# %% [markdown]
# When delivery time is what matters, rank the incumbent by makespan.

# %%
_, by_time, _ = solve_aco(inst, AcoParams(ants=20, iterations=80, seed=1, rank_by="makespan"))
print(f"makespan {breakdown.makespan_hours:.3f} h -> {by_time.makespan_hours:.3f} h")
