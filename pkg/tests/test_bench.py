import math
from pathlib import Path

import pytest

from acoroute import bench
from acoroute.aco import AcoParams
from acoroute.bench import (
    CSV_COLUMNS,
    SweepConfig,
    SweepRow,
    emit_results,
    load_sweep_config,
    run_sweep,
    summarize,
)
from acoroute.errors import AcoRouteError, ParseError, TooLargeError
from acoroute.instance_io import GeneratorConfig

DATA = Path(__file__).parent / "data"

FIXTURE = [
    SweepRow(1, "greedy", 0, 10.0, 400.0, 400.0, 1, 0),
    SweepRow(1, "aco", 0, 9.0, 380.5, 380.5, 1, 0),
    SweepRow(1, "aco", 1, 11.0, 390.25, 390.25, 2, 0),
    SweepRow(2, "greedy", 0, 6.0, 420.0, 420.0, 2, 0),
]


def test_single_cell_sweep():
    cfg = SweepConfig(GeneratorConfig(8, 2, seed=1), vehicle_range=(1, 1), algorithms=("greedy",))
    rows = run_sweep(cfg)
    assert len(rows) == 1
    assert (rows[0].vehicles, rows[0].algorithm, rows[0].repeat_seed) == (1, "greedy", 0)


def test_cells_layout():
    cfg = SweepConfig(GeneratorConfig(6, 2, seed=1), vehicle_range=(2, 3), repeats=2,
                      aco_params=AcoParams(ants=2, iterations=2, seed=5))
    rows = run_sweep(cfg)
    assert [(r.vehicles, r.algorithm, r.repeat_seed) for r in rows] == [
        (2, "aco", 5), (2, "aco", 6), (2, "greedy", 0),
        (3, "aco", 5), (3, "aco", 6), (3, "greedy", 0)]


def test_greedy_makespan_falls_with_fleet():
    cfg = SweepConfig(GeneratorConfig(60, 3, seed=1), algorithms=("greedy",))
    spans = [r.makespan_hours for r in run_sweep(cfg)]
    assert all(b <= a for a, b in zip(spans, spans[1:]))
    assert spans[0] > spans[-1]


def test_failed_cell_does_not_abort(monkeypatch):
    real = bench.solve_greedy

    def flaky(inst):
        if inst.vehicle_count == 2:
            raise TooLargeError("boom")
        return real(inst)
    monkeypatch.setattr(bench, "solve_greedy", flaky)
    rows = run_sweep(SweepConfig(GeneratorConfig(5, 1, seed=1), vehicle_range=(1, 3),
                                 algorithms=("greedy",)))
    assert [r.failed for r in rows] == [False, True, False]
    assert "TOO_LARGE" in rows[1].error


def test_summary_single_row():
    s = summarize([FIXTURE[0]])
    assert s.cells[(1, "greedy")] == bench.CellStats(1, 10.0, 10.0, 10.0)
    assert s.win_rate is None


def test_summary_all_wins():
    rows = [SweepRow(v, a, 0, 5.0 if a == "aco" else 6.0, 1, 1, 1, 0)
            for v in (1, 2) for a in ("aco", "greedy")]
    assert summarize(rows).win_rate == 1.0


def test_summary_fixture_by_hand():
    s = summarize(FIXTURE)
    aco = s.cells[(1, "aco")]
    assert (aco.runs, aco.mean_makespan_hours, aco.min_makespan_hours, aco.max_makespan_hours) == (
        2, 10.0, 9.0, 11.0)
    assert s.cells[(2, "greedy")].mean_makespan_hours == 6.0
    # one of the two aco runs at |V|=1 beats greedy
    assert s.win_rate == 0.5
    # |V|=2 has no aco rows, so it has no win entry
    assert s.best_of_seed_wins == {1: True}


def test_summary_empty():
    with pytest.raises(AcoRouteError) as err:
        summarize([SweepRow(1, "aco", 0, math.nan, math.nan, math.nan, 0, 0, error="x")])
    assert err.value.code == "EMPTY_INPUT"


def test_emit_header_only(tmp_path):
    rows_path, _ = emit_results([SweepRow(1, "aco", 0, math.nan, math.nan, math.nan, 0, 0, error="x")],
                                None, tmp_path / "out")
    assert rows_path.read_text() == ",".join(CSV_COLUMNS) + "\n"


def test_column_order():
    assert CSV_COLUMNS == ("vehicles", "algorithm", "seed", "makespan_hours", "weighted_objective",
                           "total_distance", "open_depots", "runtime_ms")


def test_emit_golden(tmp_path):
    rows_path, summary_path = emit_results(FIXTURE, summarize(FIXTURE), tmp_path / "fx")
    assert rows_path.name == "fx.csv" and summary_path.name == "fx.summary.csv"
    assert rows_path.read_bytes() == (DATA / "bench_fixture.csv").read_bytes()
    assert summary_path.read_bytes() == (DATA / "bench_fixture.summary.csv").read_bytes()


def test_emit_io_failure(tmp_path):
    with pytest.raises(OSError):
        emit_results(FIXTURE, None, tmp_path / "missing" / "out")


def _small():
    return SweepConfig(GeneratorConfig(7, 2, seed=3), vehicle_range=(1, 3), repeats=2,
                       aco_params=AcoParams(ants=4, iterations=5))


def test_rerun_byte_identical(tmp_path):
    a = run_sweep(_small())
    b = run_sweep(_small())
    emit_results(a, summarize(a), tmp_path / "a")
    emit_results(b, summarize(b), tmp_path / "b")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.summary.csv").read_bytes() == (tmp_path / "b.summary.csv").read_bytes()


def test_workers_do_not_change_rows():
    assert run_sweep(_small(), workers=2) == run_sweep(_small(), workers=1)


def test_load_config(tmp_path):
    (tmp_path / "inst.json").write_text(
        '{"customers": [{"id": 1, "x": 3, "y": 4}], "depots": [{"id": 2, "x": 0, "y": 0}]}')
    cfg = load_sweep_config('{"instance": {"file": "inst.json"}, "vehicle_range": [1, 2], '
                            '"algorithms": ["greedy"], "aco_params": {"ants": 3}}', tmp_path)
    assert cfg.vehicle_range == (1, 2) and cfg.aco_params.ants == 3
    assert len(cfg.instance().customers) == 1


def test_reference_config_committed():
    root = Path(__file__).parent.parent / "benchmarks"
    cfg = load_sweep_config((root / "reference.json").read_text(), root)
    inst = cfg.instance()
    assert (len(inst.customers), len(inst.depots), inst.speed) == (60, 3, 40.0)
    assert cfg.source.seed == 1 and cfg.vehicle_range == (1, 20) and cfg.repeats == 10


@pytest.mark.parametrize("text", [
    "{", '{"instance": {"generate": {"n_customers": 3, "n_depots": 1}}, "bogus": 1}',
    '{"instance": {"url": "x"}}',
    '{"instance": {"generate": {"n_customers": 3, "n_depots": 1}}, "aco_params": {"alpha": 1}}',
    '{"instance": {"generate": {"n_customers": 3, "n_depots": 1}}, "repeats": 0}',
    '{"instance": {"file": "nope.json"}}',
])
def test_load_config_errors(text, tmp_path):
    with pytest.raises(ParseError):
        load_sweep_config(text, tmp_path)
