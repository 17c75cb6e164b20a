# %% [markdown]
# # Instances, objective and the giant-tour split
#
# A routing instance is customers and depots in the plane plus a fleet size.
# A solution is a set of closed routes, each leaving one depot and coming
# back to it.

# %%
import numpy as np

from acoroute import GeneratorConfig, Route, Solution, check_feasibility, evaluate_objective, generate_instance
from acoroute.model import assign_depot, split_giant_tour

inst = generate_instance(GeneratorConfig(n_customers=8, n_depots=2, vehicle_count=3, seed=42))
print(inst.name, "customers:", len(inst.customers), "depots:", [d.id for d in inst.depots])
print(np.round(inst.distance_matrix[:4, :4], 2))

# %% [markdown]
# Evaluate a hand-made two-route plan. The breakdown carries both the
# weighted objective and the cost terms.

# %%
plan = Solution((Route(1, 9, (1, 2, 3, 4)), Route(2, 10, (5, 6, 7, 8))))
print(check_feasibility(inst, plan))
for key, value in evaluate_objective(inst, plan).as_dict().items():
    print(f"{key:>22} {value:.3f}")

# %% [markdown]
# Drop a customer and the checker names the broken rule.

# %%
broken = Solution((Route(1, 9, (1, 2, 3)), Route(2, 10, (5, 6, 7, 8))))
print([v.kind.value for v in check_feasibility(inst, broken)])

# %% [markdown]
# The heuristics search customer orders only. An order is cut into at most
# k contiguous routes so that the longest route is as short as possible; each
# piece starts from the depot closest to its two ends.

# %%
order = [1, 2, 3, 4, 5, 6, 7, 8]
for k in (1, 2, 3):
    sol = split_giant_tour(inst, order, k)
    b = evaluate_objective(inst, sol)
    pieces = [r.customer_sequence for r in sol.routes]
    print(k, pieces, f"makespan {b.makespan_hours:.3f} h")

print("depot for [5, 6]:", assign_depot(inst, [5, 6]))
