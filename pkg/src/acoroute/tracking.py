"""Software stand-in for a package tracking chain.

Three stages share one line protocol:

* the sensor side emits ALERT events (collision, disassembly, damage);
* the vehicle terminal emits barcode SCANs at departure and delivery and
  periodic GPS fixes while driving;
* the server side (:class:`TrackingStore`) ingests events and answers
  per-package queries.

Wire format, one event per line::

    <timestamp>|<package_id>|<kind>|<payload>

    SCAN   payload: barcode,x,y     (where the scan happened)
    GPS    payload: x,y
    ALERT  payload: KIND,severity

Floats are written with ``repr`` so decoding is lossless. Package ids and
barcodes may not contain ``|``, ``,`` or line breaks. Events are forwarded
as soon as they are produced; the terminal does not buffer.

Vehicles drive straight lines between stops at the instance speed with no
service time, all leaving their depot at t = 0.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleSolutionError, MalformedEventError, NotFoundError
from .model import Instance, Solution, check_feasibility

_FORBIDDEN = ("|", ",", "\n", "\r")


class EventKind(str, enum.Enum):
    SCAN = "SCAN"
    GPS = "GPS"
    ALERT = "ALERT"


class AlertKind(str, enum.Enum):
    COLLISION = "COLLISION"
    DISASSEMBLY = "DISASSEMBLY"
    DAMAGE = "DAMAGE"


def _check_text(value, what):
    if not isinstance(value, str) or not value or any(ch in value for ch in _FORBIDDEN):
        raise MalformedEventError(f"{what} must be non-empty text without | , or line breaks")


def _check_real(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise MalformedEventError(f"{what} must be a finite number")


@dataclass(frozen=True)
class TrackingEvent:
    timestamp: float
    package_id: str
    kind: EventKind
    barcode: str | None = None
    position: tuple[float, float] | None = None
    alert: AlertKind | None = None
    severity: float | None = None

    def __post_init__(self):
        _check_real(self.timestamp, "timestamp")
        if self.timestamp < 0:
            raise MalformedEventError("timestamp must be >= 0")
        _check_text(self.package_id, "package_id")
        try:
            object.__setattr__(self, "kind", EventKind(self.kind))
        except ValueError:
            raise MalformedEventError(f"unknown kind {self.kind!r}", code="UNKNOWN_KIND") from None
        if self.position is not None:
            if len(self.position) != 2:
                raise MalformedEventError("position must be an (x, y) pair")
            for v in self.position:
                _check_real(v, "position")
            object.__setattr__(self, "position", (float(self.position[0]), float(self.position[1])))
        if self.kind is EventKind.SCAN:
            _check_text(self.barcode, "barcode")
            if self.position is None or self.alert is not None or self.severity is not None:
                raise MalformedEventError("SCAN carries a barcode and a position only")
        elif self.kind is EventKind.GPS:
            if (self.position is None or self.barcode is not None or self.alert is not None
                    or self.severity is not None):
                raise MalformedEventError("GPS carries a position only")
        else:
            if self.barcode is not None or self.position is not None:
                raise MalformedEventError("ALERT carries an alert kind and severity only")
            try:
                object.__setattr__(self, "alert", AlertKind(self.alert))
            except ValueError:
                raise MalformedEventError(f"unknown alert {self.alert!r}") from None
            _check_real(self.severity, "severity")
            if not 0.0 <= self.severity <= 1.0:
                raise MalformedEventError("severity must lie in [0, 1]")

    @classmethod
    def scan(cls, t, package_id, barcode, x, y):
        return cls(t, package_id, EventKind.SCAN, barcode=barcode, position=(x, y))

    @classmethod
    def gps(cls, t, package_id, x, y):
        return cls(t, package_id, EventKind.GPS, position=(x, y))

    @classmethod
    def alert_event(cls, t, package_id, alert, severity):
        return cls(t, package_id, EventKind.ALERT, alert=alert, severity=severity)


def encode_event(event: TrackingEvent) -> str:
    if event.kind is EventKind.SCAN:
        payload = f"{event.barcode},{event.position[0]!r},{event.position[1]!r}"
    elif event.kind is EventKind.GPS:
        payload = f"{event.position[0]!r},{event.position[1]!r}"
    else:
        payload = f"{event.alert.value},{event.severity!r}"
    return f"{float(event.timestamp)!r}|{event.package_id}|{event.kind.value}|{payload}"


def _float(text):
    try:
        return float(text)
    except ValueError:
        raise MalformedEventError(f"not a number: {text!r}", code="MALFORMED_LINE") from None


def decode_event(line: str) -> TrackingEvent:
    parts = line.rstrip("\n").split("|")
    if len(parts) != 4:
        raise MalformedEventError(f"expected 4 fields, got {len(parts)}", code="MALFORMED_LINE")
    ts, pid, kind, payload = parts
    if kind not in EventKind.__members__:
        raise MalformedEventError(f"unknown kind {kind!r}", code="UNKNOWN_KIND")
    sub = payload.split(",")
    expected = {"SCAN": 3, "GPS": 2, "ALERT": 2}[kind]
    if len(sub) != expected:
        raise MalformedEventError(f"{kind} payload needs {expected} fields", code="MALFORMED_LINE")
    try:
        if kind == "SCAN":
            return TrackingEvent.scan(_float(ts), pid, sub[0], _float(sub[1]), _float(sub[2]))
        if kind == "GPS":
            return TrackingEvent.gps(_float(ts), pid, _float(sub[0]), _float(sub[1]))
        return TrackingEvent.alert_event(_float(ts), pid, sub[0], _float(sub[1]))
    except MalformedEventError as exc:
        if exc.code == "MALFORMED_EVENT":
            raise MalformedEventError(str(exc), code="MALFORMED_LINE") from None
        raise


@dataclass(frozen=True)
class SimConfig:
    gps_interval_s: float = 60.0
    alert_probability_per_leg: float = 0.01
    packages_per_customer: int = 1
    seed: int = 0

    def __post_init__(self):
        if not self.gps_interval_s > 0:
            raise ValueError("gps_interval_s must be positive")
        if not 0.0 <= self.alert_probability_per_leg <= 1.0:
            raise ValueError("alert_probability_per_leg must lie in [0, 1]")
        if self.packages_per_customer < 1:
            raise ValueError("packages_per_customer must be >= 1")


def package_ids(customer_id: int, config: SimConfig) -> list[str]:
    return [f"PKG-{customer_id}-{k}" for k in range(1, config.packages_per_customer + 1)]


def simulate_transport(instance: Instance, solution: Solution, config: SimConfig) -> list[TrackingEvent]:
    """Events for driving ``solution``, sorted by (timestamp, package_id).

    Each leg with cargo on board yields ``floor(leg_time / gps_interval_s)``
    GPS fixes per package and, with probability ``alert_probability_per_leg``,
    one ALERT for a randomly chosen package at a random moment of the leg.
    Leg times follow the instance distances; GPS positions interpolate the
    straight segment between the stop coordinates.
    """
    violations = check_feasibility(instance, solution)
    if violations:
        raise InfeasibleSolutionError(violations)
    rng = np.random.default_rng(config.seed)
    D = instance.distance_matrix
    idx = instance.index
    alerts = list(AlertKind)
    events: list[TrackingEvent] = []
    interval = config.gps_interval_s

    for route in solution.routes:
        depot = instance.point(route.depot_id)
        parcels = {c: package_ids(c, config) for c in route.customer_sequence}
        on_board = [p for c in route.customer_sequence for p in parcels[c]]
        for pid in on_board:
            events.append(TrackingEvent.scan(0.0, pid, pid, depot.x, depot.y))
        t = 0.0
        here = depot
        for stop_id in (*route.customer_sequence, route.depot_id):
            stop = instance.point(stop_id)
            leg = float(D[idx[here.id], idx[stop_id]]) / instance.speed * 3600.0
            fixes = math.floor(leg / interval) if leg > 0 else 0
            for k in range(1, fixes + 1):
                frac = k * interval / leg
                x = here.x + frac * (stop.x - here.x)
                y = here.y + frac * (stop.y - here.y)
                for pid in on_board:
                    events.append(TrackingEvent.gps(t + k * interval, pid, x, y))
            if on_board and rng.random() < config.alert_probability_per_leg:
                when = t + rng.random() * leg
                victim = on_board[int(rng.integers(len(on_board)))]
                kind = alerts[int(rng.integers(len(alerts)))]
                events.append(TrackingEvent.alert_event(when, victim, kind, float(rng.random())))
            t += leg
            here = stop
            if stop_id != route.depot_id:
                for pid in parcels[stop_id]:
                    events.append(TrackingEvent.scan(t, pid, pid, stop.x, stop.y))
                    on_board.remove(pid)

    events.sort(key=lambda e: (e.timestamp, e.package_id))
    return events


@dataclass(frozen=True)
class Alert:
    timestamp: float
    kind: AlertKind
    severity: float


@dataclass(frozen=True)
class PackageRecord:
    package_id: str
    latest_position: tuple[float, float] | None
    last_scan: tuple[str, float] | None  # (barcode, timestamp)
    alerts: tuple[Alert, ...]
    event_count: int


class _State:
    __slots__ = ("position", "position_t", "scan", "alerts", "count")

    def __init__(self):
        self.position = None
        self.position_t = -math.inf
        self.scan = None
        self.alerts: list[Alert] = []
        self.count = 0


class TrackingStore:
    """In-memory per-package state with an optional append-only event log.

    Ingestion is not idempotent: a duplicated event counts twice. Later
    timestamps win for position and last scan; an event arriving late with
    an older timestamp never overwrites newer state.
    """

    def __init__(self, log_path: str | Path | None = None):
        self._state: dict[str, _State] = {}
        self._log = open(log_path, "a", encoding="utf-8") if log_path is not None else None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def close(self):
        if self._log is not None:
            self._log.close()
            self._log = None

    def ingest(self, event: TrackingEvent) -> "TrackingStore":
        if not isinstance(event, TrackingEvent):
            raise MalformedEventError(f"not a TrackingEvent: {event!r}")
        s = self._state.setdefault(event.package_id, _State())
        s.count += 1
        if event.position is not None and event.timestamp >= s.position_t:
            s.position, s.position_t = event.position, event.timestamp
        if event.kind is EventKind.SCAN and (s.scan is None or event.timestamp >= s.scan[1]):
            s.scan = (event.barcode, event.timestamp)
        if event.kind is EventKind.ALERT:
            alert = Alert(event.timestamp, event.alert, event.severity)
            pos = bisect.bisect_right([a.timestamp for a in s.alerts], alert.timestamp)
            s.alerts.insert(pos, alert)
        if self._log is not None:
            self._log.write(encode_event(event) + "\n")
        return self

    def query(self, package_id: str) -> PackageRecord:
        s = self._state.get(package_id)
        if s is None:
            raise NotFoundError(f"unknown package {package_id!r}")
        return PackageRecord(package_id, s.position, s.scan, tuple(s.alerts), s.count)

    def package_ids(self) -> list[str]:
        return sorted(self._state)

    @classmethod
    def replay(cls, path: str | Path) -> "TrackingStore":
        store = cls()
        for event in read_event_log(path):
            store.ingest(event)
        return store


def ingest_event(store: TrackingStore, event: TrackingEvent) -> TrackingStore:
    return store.ingest(event)


def query_package(store: TrackingStore, package_id: str) -> PackageRecord:
    return store.query(package_id)


def fold_events(events: Sequence[TrackingEvent]) -> dict[str, PackageRecord]:
    """Records computed in one pass over a finished log, without a store."""
    by_pkg: dict[str, list[tuple[int, TrackingEvent]]] = {}
    for order, e in enumerate(events):
        by_pkg.setdefault(e.package_id, []).append((order, e))
    out = {}
    for pid, items in by_pkg.items():
        located = [(e.timestamp, o, e.position) for o, e in items if e.position is not None]
        scans = [(e.timestamp, o, e.barcode) for o, e in items if e.kind is EventKind.SCAN]
        alerts = sorted(((e.timestamp, o, e) for o, e in items if e.kind is EventKind.ALERT),
                        key=lambda a: (a[0], a[1]))
        last_scan = max(scans) if scans else None
        out[pid] = PackageRecord(
            package_id=pid,
            latest_position=max(located)[2] if located else None,
            last_scan=(last_scan[2], last_scan[0]) if last_scan else None,
            alerts=tuple(Alert(t, e.alert, e.severity) for t, _, e in alerts),
            event_count=len(items),
        )
    return out


def write_event_log(events: Iterable[TrackingEvent], path: str | Path) -> None:
    Path(path).write_text("".join(encode_event(e) + "\n" for e in events), encoding="utf-8")


def read_event_log(path: str | Path) -> list[TrackingEvent]:
    with open(path, encoding="utf-8") as fh:
        return [decode_event(line) for line in fh if line.strip()]
