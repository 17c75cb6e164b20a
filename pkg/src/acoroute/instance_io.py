"""JSON documents for instances and solutions, and seeded instance generation.

Instance document::

    {
      "name": "demo",
      "depots":    [{"id": 4, "x": 0.0, "y": 0.0}],
      "customers": [{"id": 1, "x": 3.0, "y": 4.0}, ...],
      "vehicles":  {"count": 2, "fixed_cost": 0.0},
      "costs":     {"w1": 0.0, "w2": 1.0, "transport_rate": 1.0},
      "speed_kmh": 40.0,
      "distances": "euclidean"            # or {"matrix": [[...], ...]}
    }

Only ``depots`` and ``customers`` are required. Matrix rows are ordered
customers first, then depots. Unknown keys are rejected.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInstanceError, ParseError
from .model import Instance, Point, Route, Solution

DEFAULTS = {"w1": 0.0, "w2": 1.0, "speed": 40.0, "transport_rate": 1.0, "vehicle_fixed_cost": 0.0}

_TOP_KEYS = {"name", "depots", "customers", "vehicles", "costs", "speed_kmh", "distances"}
_POINT_KEYS = {"id", "x", "y"}
_VEHICLE_KEYS = {"count", "fixed_cost"}
_COST_KEYS = {"w1", "w2", "transport_rate"}


@dataclass(frozen=True)
class GeneratorConfig:
    n_customers: int
    n_depots: int
    vehicle_count: int = 1
    bounding_box: tuple[float, float] = (100.0, 100.0)
    seed: int = 0
    w1: float = DEFAULTS["w1"]
    w2: float = DEFAULTS["w2"]
    transport_rate: float = DEFAULTS["transport_rate"]
    vehicle_fixed_cost: float = DEFAULTS["vehicle_fixed_cost"]
    speed: float = DEFAULTS["speed"]
    name: str = ""

    def __post_init__(self):
        if self.n_customers < 1 or self.n_depots < 1 or self.vehicle_count < 1:
            raise InvalidInstanceError("counts must be positive", rule="positive counts")
        w, h = self.bounding_box
        if not (w > 0 and h > 0):
            raise InvalidInstanceError("bounding box must be positive", rule="positive bounding box")


def generate_instance(config: GeneratorConfig) -> Instance:
    """Uniform customers and depots in the box, rounded to 6 decimals.

    Customers get ids 1..n and depots n+1..n+m.
    """
    rng = np.random.default_rng(config.seed)
    w, h = config.bounding_box
    n, m = config.n_customers, config.n_depots
    xy = rng.uniform((0.0, 0.0), (w, h), size=(n + m, 2))
    # rounding through the decimal text keeps serialize/parse lossless
    points = [Point(i + 1, float(_coord(x)), float(_coord(y))) for i, (x, y) in enumerate(xy)]
    return Instance(
        name=config.name or f"gen-n{n}-m{m}-s{config.seed}",
        customers=tuple(points[:n]),
        depots=tuple(points[n:]),
        vehicle_count=config.vehicle_count,
        vehicle_fixed_cost=config.vehicle_fixed_cost,
        transport_rate=config.transport_rate,
        w1=config.w1,
        w2=config.w2,
        speed=config.speed,
    )


def _fail(path, message, code="SCHEMA_VIOLATION"):
    raise ParseError(message, code=code, where=path)


def _object(value, path, allowed):
    if not isinstance(value, dict):
        _fail(path, "expected an object")
    extra = sorted(set(value) - allowed)
    if extra:
        _fail(f"{path}.{extra[0]}", "unknown field")
    return value


def _number(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, "expected a number")
    if not math.isfinite(value):
        _fail(path, "expected a finite number")
    return float(value)


def _integer(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, "expected an integer")
    return value


def _points(value, path):
    if not isinstance(value, list):
        _fail(path, "expected an array")
    out = []
    for i, item in enumerate(value):
        p = f"{path}[{i}]"
        _object(item, p, _POINT_KEYS)
        for key in ("id", "x", "y"):
            if key not in item:
                _fail(f"{p}.{key}", "missing field")
        out.append((_integer(item["id"], f"{p}.id"), _number(item["x"], f"{p}.x"),
                    _number(item["y"], f"{p}.y")))
    return out


def _loads(text):
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(str(exc), code="MALFORMED_SYNTAX") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc), code="MALFORMED_SYNTAX") from None


def parse_instance(text: str | bytes) -> Instance:
    doc = _object(_loads(text), "$", _TOP_KEYS)
    for key in ("customers", "depots"):
        if key not in doc:
            _fail(f"$.{key}", "missing field")
    name = doc.get("name", "")
    if not isinstance(name, str):
        _fail("$.name", "expected a string")
    customers = _points(doc["customers"], "$.customers")
    depots = _points(doc["depots"], "$.depots")
    vehicles = _object(doc.get("vehicles", {}), "$.vehicles", _VEHICLE_KEYS)
    costs = _object(doc.get("costs", {}), "$.costs", _COST_KEYS)
    count = _integer(vehicles.get("count", 1), "$.vehicles.count")
    fixed = _number(vehicles.get("fixed_cost", DEFAULTS["vehicle_fixed_cost"]), "$.vehicles.fixed_cost")
    w1 = _number(costs.get("w1", DEFAULTS["w1"]), "$.costs.w1")
    w2 = _number(costs.get("w2", DEFAULTS["w2"]), "$.costs.w2")
    rate = _number(costs.get("transport_rate", DEFAULTS["transport_rate"]), "$.costs.transport_rate")
    speed = _number(doc.get("speed_kmh", DEFAULTS["speed"]), "$.speed_kmh")

    distances = doc.get("distances", "euclidean")
    if isinstance(distances, dict):
        _object(distances, "$.distances", {"matrix"})
        matrix = distances.get("matrix")
        if not isinstance(matrix, list) or not all(isinstance(r, list) for r in matrix):
            _fail("$.distances.matrix", "expected an array of arrays")
        distances = tuple(tuple(_number(v, f"$.distances.matrix[{i}][{j}]") for j, v in enumerate(row))
                          for i, row in enumerate(matrix))
    elif distances != "euclidean":
        _fail("$.distances", 'expected "euclidean" or {"matrix": ...}')

    try:
        return Instance(
            name=name,
            customers=tuple(Point(*c) for c in customers),
            depots=tuple(Point(*d) for d in depots),
            vehicle_count=count,
            vehicle_fixed_cost=fixed,
            transport_rate=rate,
            w1=w1,
            w2=w2,
            speed=speed,
            distances=distances,
        )
    except InvalidInstanceError as exc:
        raise ParseError(str(exc), code="INVARIANT_VIOLATION", where=exc.rule) from None


def _num(value: float) -> str:
    return json.dumps(float(value))


def _coord(value: float) -> str:
    return f"{value:.6f}"


def serialize_instance(instance: Instance) -> str:
    """Canonical document: fixed key order, coordinates with 6 decimals."""

    def points(pts):
        if not pts:
            return "[]"
        rows = [f'    {{"id": {p.id}, "x": {_coord(p.x)}, "y": {_coord(p.y)}}}' for p in pts]
        return "[\n" + ",\n".join(rows) + "\n  ]"

    if isinstance(instance.distances, str):
        distances = json.dumps(instance.distances)
    else:
        rows = ["[" + ", ".join(_num(v) for v in row) + "]" for row in instance.distances]
        distances = '{"matrix": [\n    ' + ",\n    ".join(rows) + "\n  ]}"
    return (
        "{\n"
        f'  "name": {json.dumps(instance.name)},\n'
        f'  "depots": {points(instance.depots)},\n'
        f'  "customers": {points(instance.customers)},\n'
        f'  "vehicles": {{"count": {instance.vehicle_count}, '
        f'"fixed_cost": {_num(instance.vehicle_fixed_cost)}}},\n'
        f'  "costs": {{"w1": {_num(instance.w1)}, "w2": {_num(instance.w2)}, '
        f'"transport_rate": {_num(instance.transport_rate)}}},\n'
        f'  "speed_kmh": {_num(instance.speed)},\n'
        f'  "distances": {distances}\n'
        "}\n"
    )


def serialize_solution(solution: Solution) -> str:
    routes = [{"vehicle": r.vehicle_index, "depot": r.depot_id, "customers": list(r.customer_sequence)}
              for r in solution.routes]
    return json.dumps({"routes": routes}, indent=2) + "\n"


def parse_solution(text: str | bytes) -> Solution:
    doc = _object(_loads(text), "$", {"routes"})
    if not isinstance(doc.get("routes"), list):
        _fail("$.routes", "expected an array")
    routes = []
    for i, item in enumerate(doc["routes"]):
        p = f"$.routes[{i}]"
        _object(item, p, {"vehicle", "depot", "customers"})
        for key in ("vehicle", "depot", "customers"):
            if key not in item:
                _fail(f"{p}.{key}", "missing field")
        if not isinstance(item["customers"], list):
            _fail(f"{p}.customers", "expected an array")
        seq = tuple(_integer(c, f"{p}.customers[{j}]") for j, c in enumerate(item["customers"]))
        routes.append(Route(_integer(item["vehicle"], f"{p}.vehicle"),
                            _integer(item["depot"], f"{p}.depot"), seq))
    return Solution(tuple(routes))
