"""Command line entry point.

Exit codes: 0 success, 2 usage or invalid input document, 3 I/O failure,
4 domain error (infeasible solution, exact-search limit, unknown package).
Results go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .aco import AcoParams, solve_aco
from .baselines import SPACES, solve_exact, solve_greedy
from .bench import emit_results, load_sweep_config, run_sweep, summarize
from .errors import AcoRouteError, OutputError, ParseError
from .instance_io import (
    GeneratorConfig,
    generate_instance,
    parse_instance,
    parse_solution,
    serialize_instance,
    serialize_solution,
)
from .tracking import (
    SimConfig,
    TrackingStore,
    simulate_transport,
    write_event_log,
)

EXIT_USAGE, EXIT_IO, EXIT_DOMAIN = 2, 3, 4

_ACO_FLAGS = {
    "gamma": float, "epsilon": float, "theta": float, "rho": float, "evaporation": float,
    "ants": int, "iterations": int, "deposit_q": float, "initial_pheromone": float,
    "pheromone_floor": float, "seed": int, "rank_by": str,
}


class _IOFailure(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot read {path}: {exc.strerror or exc}") from None


def _write(path, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="acoroute", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded random instance")
    g.add_argument("--customers", type=int, required=True)
    g.add_argument("--depots", type=int, required=True)
    g.add_argument("--vehicles", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--width", type=float, default=100.0)
    g.add_argument("--height", type=float, default=100.0)
    g.add_argument("--w1", type=float, default=0.0)
    g.add_argument("--w2", type=float, default=1.0)
    g.add_argument("--transport-rate", type=float, default=1.0)
    g.add_argument("--fixed-cost", type=float, default=0.0)
    g.add_argument("--speed", type=float, default=40.0)
    g.add_argument("--name", default="")

    s = sub.add_parser("solve", help="solve an instance and print the objective breakdown")
    s.add_argument("--instance", required=True)
    s.add_argument("--algo", choices=("aco", "greedy", "exact"), default="aco")
    s.add_argument("--json", action="store_true")
    s.add_argument("--out", help="also write the solution document here")
    s.add_argument("--max-customers", type=int, default=8, help="exact-search size limit")
    s.add_argument("--space", choices=SPACES, default="split", help="exact-search space")
    defaults = AcoParams()
    for name, kind in _ACO_FLAGS.items():
        extra = {"choices": ("objective", "makespan")} if name == "rank_by" else {}
        s.add_argument("--" + name.replace("_", "-"), type=kind, default=getattr(defaults, name),
                       help=f"colony parameter (default {getattr(defaults, name)})", **extra)

    b = sub.add_parser("bench", help="run a fleet-size sweep from a JSON config")
    b.add_argument("--config", required=True)
    b.add_argument("--out", required=True, help="output prefix")
    b.add_argument("--timing", action="store_true", help="record wall-clock runtime_ms")
    b.add_argument("--workers", type=int, default=1)

    t = sub.add_parser("track", help="simulate tracking events for a solution")
    t.add_argument("--instance")
    t.add_argument("--solution")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", help="event log to write")
    t.add_argument("--gps-interval", type=float, default=60.0)
    t.add_argument("--alert-probability", type=float, default=0.01)
    t.add_argument("--packages-per-customer", type=int, default=1)
    t.add_argument("--json", action="store_true")
    tsub = t.add_subparsers(dest="track_command")
    q = tsub.add_parser("query", help="replay a log and print one package record")
    q.add_argument("--log", required=True)
    q.add_argument("--package", required=True)
    q.add_argument("--json", action="store_true")
    return p


def _breakdown_lines(b) -> str:
    return "".join(f"{k}={v!r}\n" for k, v in b.as_dict().items())


def _record_dict(r) -> dict:
    return {
        "package_id": r.package_id,
        "event_count": r.event_count,
        "latest_position": list(r.latest_position) if r.latest_position else None,
        "last_scan": {"barcode": r.last_scan[0], "timestamp": r.last_scan[1]} if r.last_scan else None,
        "alerts": [{"timestamp": a.timestamp, "kind": a.kind.value, "severity": a.severity}
                   for a in r.alerts],
    }


def _record_line(r) -> str:
    pos = "-" if r.latest_position is None else f"{r.latest_position[0]!r},{r.latest_position[1]!r}"
    scan = "-" if r.last_scan is None else f"{r.last_scan[0]}@{r.last_scan[1]!r}"
    alerts = ";".join(f"{a.kind.value}@{a.timestamp!r}:{a.severity!r}" for a in r.alerts) or "-"
    return (f"package_id={r.package_id} event_count={r.event_count} latest_position={pos} "
            f"last_scan={scan} alerts={alerts}\n")


def cmd_generate(args) -> int:
    cfg = GeneratorConfig(
        n_customers=args.customers, n_depots=args.depots, vehicle_count=args.vehicles,
        bounding_box=(args.width, args.height), seed=args.seed, w1=args.w1, w2=args.w2,
        transport_rate=args.transport_rate, vehicle_fixed_cost=args.fixed_cost,
        speed=args.speed, name=args.name,
    )
    _write(args.out, serialize_instance(generate_instance(cfg)))
    return 0


def cmd_solve(args, parser) -> int:
    try:
        params = AcoParams(**{name: getattr(args, name) for name in _ACO_FLAGS})
    except AcoRouteError as exc:
        parser.error(str(exc))
    instance = parse_instance(_read(args.instance))
    if args.algo == "greedy":
        solution, breakdown = solve_greedy(instance)
    elif args.algo == "exact":
        solution, breakdown = solve_exact(instance, max_customers=args.max_customers, space=args.space)
    else:
        solution, breakdown, _ = solve_aco(instance, params)
    if args.out:
        _write(args.out, serialize_solution(solution))
    if args.json:
        sys.stdout.write(json.dumps(breakdown.as_dict()) + "\n")
    else:
        sys.stdout.write(_breakdown_lines(breakdown))
    return 0


def cmd_bench(args) -> int:
    config_path = Path(args.config)
    config = load_sweep_config(_read(config_path), base_dir=config_path.parent)
    if args.timing:
        config = replace(config, record_runtime=True)
    rows = run_sweep(config, workers=args.workers)
    for r in rows:
        if r.failed:
            print(f"FAILED vehicles={r.vehicles} algorithm={r.algorithm} seed={r.repeat_seed}: "
                  f"{r.error}", file=sys.stderr)
    summary = summarize(rows)
    emit_results(rows, summary, args.out)
    sys.stdout.write(f"rows={sum(not r.failed for r in rows)}\n")
    if summary.win_rate is not None:
        sys.stdout.write(f"win_rate={summary.win_rate!r}\n")
        sys.stdout.write(f"best_of_seed_wins={summary.best_of_seed_win_count}"
                         f"/{len(summary.best_of_seed_wins)}\n")
    return 0


def cmd_track(args, parser) -> int:
    if args.track_command == "query":
        try:
            store = TrackingStore.replay(args.log)
        except OSError as exc:
            raise _IOFailure(f"cannot read {args.log}: {exc.strerror or exc}") from None
        record = store.query(args.package)
        if args.json:
            sys.stdout.write(json.dumps(_record_dict(record)) + "\n")
        else:
            sys.stdout.write(_record_line(record))
        return 0

    missing = [f"--{n}" for n in ("instance", "solution", "out") if getattr(args, n) is None]
    if missing:
        parser.error(f"track requires {', '.join(missing)}")
    instance = parse_instance(_read(args.instance))
    solution = parse_solution(_read(args.solution))
    try:
        config = SimConfig(args.gps_interval, args.alert_probability, args.packages_per_customer,
                           args.seed)
    except ValueError as exc:
        parser.error(str(exc))
    events = simulate_transport(instance, solution, config)
    try:
        write_event_log(events, args.out)
    except OSError as exc:
        raise _IOFailure(f"cannot write {args.out}: {exc.strerror or exc}") from None
    store = TrackingStore()
    for e in events:
        store.ingest(e)
    records = [store.query(pid) for pid in store.package_ids()]
    if args.json:
        sys.stdout.write(json.dumps([_record_dict(r) for r in records]) + "\n")
    else:
        sys.stdout.write("".join(_record_line(r) for r in records))
    return 0


def main(argv=None) -> int:
    """Run one command and return its exit code (argparse usage errors included)."""
    parser = _build_parser()
    try:
        return _dispatch(parser, parser.parse_args(argv))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


def _dispatch(parser, args) -> int:
    try:
        if args.command == "generate":
            return cmd_generate(args)
        if args.command == "solve":
            return cmd_solve(args, parser)
        if args.command == "bench":
            return cmd_bench(args)
        return cmd_track(args, parser)
    except _IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except AcoRouteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
