import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from acoroute.baselines import solve_greedy
from acoroute.errors import InfeasibleSolutionError, MalformedEventError, NotFoundError
from acoroute.instance_io import GeneratorConfig, generate_instance
from acoroute.model import Route, Solution
from acoroute.tracking import (
    AlertKind,
    EventKind,
    SimConfig,
    TrackingEvent,
    TrackingStore,
    decode_event,
    encode_event,
    fold_events,
    ingest_event,
    query_package,
    read_event_log,
    simulate_transport,
    write_event_log,
)

from conftest import make_instance


def test_constant_velocity():
    inst = make_instance([(40, 0)], [(0, 0)])
    events = simulate_transport(inst, Solution((Route(1, 2, (1,)),)),
                                SimConfig(gps_interval_s=1800, alert_probability_per_leg=0.0))
    gps = [e for e in events if e.kind is EventKind.GPS]
    assert (gps[0].timestamp, gps[0].position) == (1800.0, (20.0, 0.0))
    scans = [e for e in events if e.kind is EventKind.SCAN]
    assert [(e.timestamp, e.position) for e in scans] == [(0.0, (0.0, 0.0)), (3600.0, (40.0, 0.0))]
    assert all(e.barcode == "PKG-1-1" for e in scans)


def test_no_alerts_at_zero_probability():
    inst = generate_instance(GeneratorConfig(30, 3, vehicle_count=4, seed=2))
    sol, _ = solve_greedy(inst)
    events = simulate_transport(inst, sol, SimConfig(alert_probability_per_leg=0.0, seed=9))
    assert not any(e.kind is EventKind.ALERT for e in events)


def test_alert_rate_binomial():
    # one route through 1000 customers: 1000 legs carry cargo, the return leg does not
    inst = make_instance([(i % 50, i // 50) for i in range(1000)], [(0, -1)])
    sol = Solution((Route(1, 1001, tuple(range(1, 1001))),))
    events = simulate_transport(inst, sol, SimConfig(gps_interval_s=1e9, alert_probability_per_leg=0.5,
                                                     seed=4))
    alerts = sum(e.kind is EventKind.ALERT for e in events)
    assert 450 <= alerts <= 550


def test_infeasible_solution_rejected():
    inst = make_instance([(1, 0), (2, 0)], [(0, 0)])
    with pytest.raises(InfeasibleSolutionError):
        simulate_transport(inst, Solution((Route(1, 3, (1,)),)), SimConfig())


def _sim(seed=0, packages=1):
    inst = generate_instance(GeneratorConfig(25, 3, vehicle_count=4, seed=seed))
    sol, _ = solve_greedy(inst)
    return inst, sol, simulate_transport(
        inst, sol, SimConfig(gps_interval_s=300, alert_probability_per_leg=0.3,
                             packages_per_customer=packages, seed=seed))


def test_event_conservation():
    inst, sol, events = _sim(packages=2)
    by_pkg = {}
    for e in events:
        by_pkg.setdefault(e.package_id, []).append(e)
    assert len(by_pkg) == 2 * len(inst.customers)
    D, idx = inst.distance_matrix, inst.index
    for route in sol.routes:
        walk = [route.depot_id, *route.customer_sequence]
        for pos, c in enumerate(route.customer_sequence, start=1):
            legs = [D[idx[a], idx[b]] / inst.speed * 3600 for a, b in zip(walk[:pos], walk[1:pos + 1])]
            want_gps = sum(math.floor(t / 300) for t in legs)
            for k in (1, 2):
                evs = by_pkg[f"PKG-{c}-{k}"]
                scans = [e for e in evs if e.kind is EventKind.SCAN]
                assert len(scans) == 2 and scans[0].timestamp == 0.0
                assert scans[1].timestamp == pytest.approx(sum(legs), rel=1e-12)
                assert sum(e.kind is EventKind.GPS for e in evs) == want_gps


def test_events_sorted_and_deterministic():
    _, _, a = _sim(seed=5)
    _, _, b = _sim(seed=5)
    assert a == b
    keys = [(e.timestamp, e.package_id) for e in a]
    assert keys == sorted(keys)


def test_single_gps_into_empty_store():
    store = TrackingStore()
    ingest_event(store, TrackingEvent.gps(5.0, "P", 1.5, 2.5))
    assert query_package(store, "P").latest_position == (1.5, 2.5)


def test_alert_then_gps():
    store = TrackingStore()
    store.ingest(TrackingEvent.alert_event(1.0, "P", AlertKind.DAMAGE, 0.7))
    store.ingest(TrackingEvent.gps(2.0, "P", 3.0, 4.0))
    rec = store.query("P")
    assert len(rec.alerts) == 1 and rec.latest_position == (3.0, 4.0)
    assert rec.alerts[0].kind is AlertKind.DAMAGE


def test_full_stream_ends_at_customers():
    inst, _, events = _sim(seed=1)
    store = TrackingStore()
    for e in events:
        store.ingest(e)
    for c in inst.customers:
        rec = store.query(f"PKG-{c.id}-1")
        assert rec.latest_position == (c.x, c.y)
        assert rec.last_scan[0] == f"PKG-{c.id}-1"


def test_query_errors_and_counts():
    store = TrackingStore()
    with pytest.raises(NotFoundError) as err:
        store.query("nope")
    assert err.value.code == "NOT_FOUND"
    for t in range(3):
        store.ingest(TrackingEvent.gps(float(t), "P", 0.0, 0.0))
    assert store.query("P").event_count == 3


def test_store_equals_fold():
    _, _, events = _sim(seed=3)
    rng = np.random.default_rng(3)
    shuffled = [events[i] for i in rng.permutation(len(events))]
    store = TrackingStore()
    for e in shuffled:
        store.ingest(e)
    folded = fold_events(shuffled)
    assert sorted(folded) == store.package_ids()
    for pid, rec in folded.items():
        assert store.query(pid) == rec


def test_store_log_and_replay(tmp_path):
    _, _, events = _sim(seed=6)
    log = tmp_path / "events.log"
    with TrackingStore(log) as store:
        for e in events:
            store.ingest(e)
        live = {pid: store.query(pid) for pid in store.package_ids()}
    replayed = TrackingStore.replay(log)
    assert {pid: replayed.query(pid) for pid in replayed.package_ids()} == live
    assert read_event_log(log) == events


def test_log_rerun_byte_identical(tmp_path):
    for name in ("a", "b"):
        write_event_log(_sim(seed=8)[2], tmp_path / name)
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_gps_round_trip():
    e = TrackingEvent.gps(12.5, "PKG-1-1", 0.1 + 0.2, -3.0)
    assert decode_event(encode_event(e)) == e


@pytest.mark.parametrize("line, code", [
    ("1.0|P", "MALFORMED_LINE"),
    ("1.0|P|GPS|1.0", "MALFORMED_LINE"),
    ("x|P|GPS|1.0,2.0", "MALFORMED_LINE"),
    ("-1.0|P|GPS|1.0,2.0", "MALFORMED_LINE"),
    ("1.0|P|ALERT|FIRE,0.5", "MALFORMED_LINE"),
    ("1.0|P|ALERT|DAMAGE,1.5", "MALFORMED_LINE"),
    ("1.0|P|WAVE|1,2", "UNKNOWN_KIND"),
])
def test_decode_errors(line, code):
    with pytest.raises(MalformedEventError) as err:
        decode_event(line)
    assert err.value.code == code


@pytest.mark.parametrize("make", [
    lambda: TrackingEvent(1.0, "P", EventKind.GPS),
    lambda: TrackingEvent(1.0, "P", EventKind.SCAN, position=(0, 0)),
    lambda: TrackingEvent(1.0, "P", EventKind.ALERT, alert=AlertKind.DAMAGE, severity=0.5,
                          position=(0, 0)),
    lambda: TrackingEvent.gps(1.0, "P|Q", 0, 0),
    lambda: TrackingEvent.gps(float("nan"), "P", 0, 0),
])
def test_kind_payload_pairing(make):
    with pytest.raises(MalformedEventError):
        make()


def test_seeded_events_round_trip():
    rng = np.random.default_rng(10_000)
    kinds = list(AlertKind)
    for i in range(10_000):
        t = float(rng.uniform(0, 1e6))
        pid = f"PKG-{int(rng.integers(1000))}-{int(rng.integers(1, 4))}"
        r = rng.integers(3)
        if r == 0:
            e = TrackingEvent.scan(t, pid, pid, float(rng.normal(0, 100)), float(rng.normal(0, 100)))
        elif r == 1:
            e = TrackingEvent.gps(t, pid, float(rng.normal(0, 1e5)), float(rng.normal(0, 1e-5)))
        else:
            e = TrackingEvent.alert_event(t, pid, kinds[int(rng.integers(3))], float(rng.random()))
        assert decode_event(encode_event(e)) == e


text = st.text(st.characters(blacklist_characters="|,\n\r", blacklist_categories=("Cs",)), min_size=1)
real = st.floats(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e12), text, text, real, real)
def test_round_trip_property(t, pid, barcode, x, y):
    for e in (TrackingEvent.scan(t, pid, barcode, x, y), TrackingEvent.gps(t, pid, x, y)):
        assert decode_event(encode_event(e)) == e
