# %% [markdown]
# # Package tracking
#
# Drive a solved plan, emit scans, GPS fixes and random alerts, store them
# in a line log and query package state back.

# %%
import tempfile
from pathlib import Path

from acoroute import GeneratorConfig, generate_instance, solve_greedy
from acoroute.tracking import SimConfig, TrackingStore, encode_event, simulate_transport

inst = generate_instance(GeneratorConfig(n_customers=6, n_depots=2, vehicle_count=2, seed=5))
plan, _ = solve_greedy(inst)
events = simulate_transport(inst, plan, SimConfig(gps_interval_s=1800, alert_probability_per_leg=0.3, seed=2))
for e in events[:8]:
    print(encode_event(e))

# %%
log = Path(tempfile.mkdtemp()) / "events.log"
with TrackingStore(log) as store:
    for e in events:
        store.ingest(e)

replayed = TrackingStore.replay(log)
rec = replayed.query("PKG-1-1")
print(rec.latest_position, inst.point(1))
print(rec.last_scan, len(rec.alerts), rec.event_count)
