"""Fleet-size sweep: delivery time of greedy vs. colony as vehicles are added.

Delivery time is the makespan: the longest route divided by the speed.
Rows go to ``<prefix>.csv``; per-cell aggregates and ACO-vs-greedy win
rates go to ``<prefix>.summary.csv`` in long (vehicles, algorithm, metric,
value) form, ready for plotting.
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Sequence

from .aco import AcoParams, solve_aco
from .baselines import solve_greedy
from .errors import AcoRouteError, OutputError, ParseError
from .instance_io import GeneratorConfig, generate_instance, parse_instance
from .model import Instance

ALGORITHMS = ("aco", "greedy")
CSV_COLUMNS = ("vehicles", "algorithm", "seed", "makespan_hours", "weighted_objective",
               "total_distance", "open_depots", "runtime_ms")

# Delivery hours reported for the original experiment, whose instance is
# unpublished. For overlays only; never a pass/fail target.
PUBLISHED_REFERENCE_HOURS = {1: {"greedy": 77.5, "aco": 71.5}, 20: {"greedy": 15.84, "aco": 7.02}}


@dataclass(frozen=True)
class SweepConfig:
    source: Instance | GeneratorConfig
    vehicle_range: tuple[int, int] = (1, 20)
    algorithms: tuple[str, ...] = ALGORITHMS
    repeats: int = 10
    aco_params: AcoParams = field(default_factory=AcoParams)
    # off by default so reruns are byte-identical
    record_runtime: bool = False

    def __post_init__(self):
        lo, hi = self.vehicle_range
        if not 1 <= lo <= hi:
            raise ValueError("vehicle_range must be a non-empty range of positive counts")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.algorithms or set(self.algorithms) - set(ALGORITHMS):
            raise ValueError(f"algorithms must be a non-empty subset of {ALGORITHMS}")

    def instance(self) -> Instance:
        if isinstance(self.source, GeneratorConfig):
            return generate_instance(self.source)
        return self.source


@dataclass(frozen=True)
class SweepRow:
    vehicles: int
    algorithm: str
    repeat_seed: int
    makespan_hours: float
    weighted_objective: float
    total_distance: float
    open_depots: int
    runtime_ms: int
    error: str | None = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass(frozen=True)
class CellStats:
    runs: int
    mean_makespan_hours: float
    min_makespan_hours: float
    max_makespan_hours: float


@dataclass(frozen=True)
class SweepSummary:
    cells: dict[tuple[int, str], CellStats]
    win_rate: float | None
    best_of_seed_wins: dict[int, bool]

    @property
    def best_of_seed_win_count(self) -> int:
        return sum(self.best_of_seed_wins.values())


def load_sweep_config(text: str, base_dir: str | Path = ".") -> SweepConfig:
    """Parse a sweep document.

    ``instance`` is either ``{"file": path}`` (relative to ``base_dir``) or
    ``{"generate": {GeneratorConfig fields}}``; ``aco_params`` holds any
    AcoParams fields. All other keys mirror :class:`SweepConfig`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc), code="MALFORMED_SYNTAX") from None
    allowed = {"instance", "vehicle_range", "algorithms", "repeats", "aco_params", "record_runtime"}
    if not isinstance(doc, dict):
        raise ParseError("expected an object", where="$")
    for key in sorted(set(doc) - allowed):
        raise ParseError("unknown field", where=f"$.{key}")
    src = doc.get("instance")
    try:
        if isinstance(src, dict) and set(src) == {"file"}:
            source = parse_instance(Path(base_dir, src["file"]).read_text(encoding="utf-8"))
        elif isinstance(src, dict) and set(src) == {"generate"}:
            gen = dict(src["generate"])
            if "bounding_box" in gen:
                gen["bounding_box"] = tuple(gen["bounding_box"])
            source = GeneratorConfig(**gen)
        else:
            raise ParseError('expected {"file": ...} or {"generate": {...}}', where="$.instance")
        aco_fields = {f.name for f in fields(AcoParams)}
        aco = doc.get("aco_params", {})
        for key in sorted(set(aco) - aco_fields):
            raise ParseError("unknown field", where=f"$.aco_params.{key}")
        return SweepConfig(
            source=source,
            vehicle_range=tuple(doc.get("vehicle_range", (1, 20))),
            algorithms=tuple(doc.get("algorithms", ALGORITHMS)),
            repeats=doc.get("repeats", 10),
            aco_params=AcoParams(**aco),
            record_runtime=bool(doc.get("record_runtime", False)),
        )
    except ParseError:
        raise
    except (TypeError, ValueError, OSError) as exc:
        raise ParseError(str(exc), code="SCHEMA_VIOLATION", where="$") from None


def _cells(config: SweepConfig):
    lo, hi = config.vehicle_range
    for v in range(lo, hi + 1):
        for algo in sorted(config.algorithms):
            if algo == "greedy":
                yield v, algo, 0
            else:
                for r in range(config.repeats):
                    yield v, algo, config.aco_params.seed + r


def _run_cell(args) -> SweepRow:
    instance, vehicles, algo, seed, params, record_runtime = args
    start = time.perf_counter()
    try:
        inst = instance.with_vehicles(vehicles)
        if algo == "greedy":
            _, b = solve_greedy(inst)
        else:
            _, b, _ = solve_aco(inst, replace(params, seed=seed))
    except AcoRouteError as exc:
        return SweepRow(vehicles, algo, seed, math.nan, math.nan, math.nan, 0, 0, error=str(exc))
    ms = int(round((time.perf_counter() - start) * 1000)) if record_runtime else 0
    return SweepRow(vehicles, algo, seed, b.makespan_hours, b.weighted_objective,
                    b.total_distance, b.open_depots, ms)


def run_sweep(config: SweepConfig, workers: int = 1) -> list[SweepRow]:
    """Solve every (vehicles, algorithm, seed) cell; a failing cell yields a
    row with ``error`` set instead of aborting the sweep."""
    instance = config.instance()
    jobs = [(instance, v, a, s, config.aco_params, config.record_runtime)
            for v, a, s in _cells(config)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_cell, jobs))
    return [_run_cell(job) for job in jobs]


def summarize(rows: Sequence[SweepRow]) -> SweepSummary:
    ok = [r for r in rows if not r.failed]
    if not ok:
        raise AcoRouteError("no successful rows to summarize", code="EMPTY_INPUT")
    grouped: dict[tuple[int, str], list[float]] = {}
    for r in ok:
        grouped.setdefault((r.vehicles, r.algorithm), []).append(r.makespan_hours)
    cells = {key: CellStats(len(v), statistics.fmean(v), min(v), max(v))
             for key, v in sorted(grouped.items())}

    greedy = {r.vehicles: r.makespan_hours for r in ok if r.algorithm == "greedy"}
    aco = [r for r in ok if r.algorithm == "aco" and r.vehicles in greedy]
    win_rate = (sum(r.makespan_hours <= greedy[r.vehicles] for r in aco) / len(aco)) if aco else None
    best = {v: cells[(v, "aco")].min_makespan_hours <= greedy[v]
            for v in sorted(greedy) if (v, "aco") in cells}
    return SweepSummary(cells, win_rate, best)


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6f}"


def rows_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        if r.failed:
            continue
        w.writerow([r.vehicles, r.algorithm, r.repeat_seed, _fmt(r.makespan_hours),
                    _fmt(r.weighted_objective), _fmt(r.total_distance), r.open_depots, r.runtime_ms])
    return buf.getvalue()


def summary_csv(summary: SweepSummary) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("vehicles", "algorithm", "metric", "value"))
    for (v, algo), s in summary.cells.items():
        w.writerow((v, algo, "runs", s.runs))
        w.writerow((v, algo, "mean_makespan_hours", _fmt(s.mean_makespan_hours)))
        w.writerow((v, algo, "min_makespan_hours", _fmt(s.min_makespan_hours)))
        w.writerow((v, algo, "max_makespan_hours", _fmt(s.max_makespan_hours)))
    for v, won in summary.best_of_seed_wins.items():
        w.writerow((v, "aco_vs_greedy", "best_of_seed_win", int(won)))
    if summary.win_rate is not None:
        w.writerow(("all", "aco_vs_greedy", "win_rate", _fmt(summary.win_rate)))
        w.writerow(("all", "aco_vs_greedy", "best_of_seed_win_rate",
                    _fmt(summary.best_of_seed_win_count / len(summary.best_of_seed_wins))))
    return buf.getvalue()


def emit_results(rows: Sequence[SweepRow], summary: SweepSummary | None,
                 prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.csv`` and ``<prefix>.summary.csv``; failed rows are dropped."""
    prefix = str(prefix)
    rows_path, summary_path = Path(prefix + ".csv"), Path(prefix + ".summary.csv")
    text = summary_csv(summary) if summary is not None else "vehicles,algorithm,metric,value\n"
    try:
        rows_path.write_text(rows_csv(rows), encoding="utf-8")
        summary_path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OutputError(str(exc)) from exc
    return rows_path, summary_path

