# %% [markdown]
# # Fleet-size sweep
#
# Solve one instance for a range of fleet sizes with both algorithms and
# write plot-ready CSV. The committed reference benchmark lives in
# ../benchmarks/reference.json; this demo uses a smaller version so it
# finishes in seconds.

# %%
import tempfile
from pathlib import Path

from acoroute import AcoParams, GeneratorConfig
from acoroute.bench import PUBLISHED_REFERENCE_HOURS, SweepConfig, emit_results, run_sweep, summarize

config = SweepConfig(GeneratorConfig(n_customers=25, n_depots=3, seed=1), vehicle_range=(1, 6),
                     repeats=3, aco_params=AcoParams(ants=10, iterations=40, rank_by="makespan"))
rows = run_sweep(config)
summary = summarize(rows)

for v in range(1, 7):
    g = summary.cells[(v, "greedy")].min_makespan_hours
    a = summary.cells[(v, "aco")]
    print(f"|V|={v}  greedy {g:6.2f} h   colony best {a.min_makespan_hours:6.2f} h  mean {a.mean_makespan_hours:6.2f} h")
print("colony runs at or below greedy:", summary.win_rate)

# %% [markdown]
# Published delivery times for a different, unpublished instance. They are
# only a shape to compare against, not targets.

# %%
print(PUBLISHED_REFERENCE_HOURS)

out = Path(tempfile.mkdtemp()) / "sweep"
for path in emit_results(rows, summary, out):
    print(path, path.read_text().splitlines()[:2])
