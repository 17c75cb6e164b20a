"""Problem and solution model for multi-depot routing.

Nodes are customers (set N) and candidate distribution centres, called
depots here (set M). A vehicle leaves one depot, visits an ordered list of
customers and returns to the same depot. The objective is

    w1 * (number of depots with at least one departing vehicle)
  + w2 * (total travelled distance)

and the cost view splits total cost into a fixed part (one ``vehicle_fixed_cost``
per vehicle in use) and a transport part (``transport_rate`` per km).

Solutions are stored as routes rather than as binary arc variables, so two
classes of constraint violation cannot be expressed at all: a cycle among
customers that never touches a depot (every route is depot-anchored), and a
fractional arc or departure variable (routes are discrete sequences).
``check_feasibility`` therefore only diagnoses the remaining constraints:
each customer visited exactly once, at most |V| vehicles, known depots,
non-empty routes and valid vehicle indices.

The transport part treats the per-arc quantity in the transport cost as the
arc length, so ``transport_cost_sigma2 = transport_rate * total_distance``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InfeasibleSolutionError, InvalidArgumentError, InvalidInstanceError

SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class Point:
    id: int
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInstanceError(f"point {self.id} has non-finite coordinates",
                                       rule="finite coordinates")
        if self.id < 0:
            raise InvalidInstanceError(f"point id {self.id} is negative", rule="nonnegative ids")


@dataclass(frozen=True)
class Instance:
    """One routing problem. ``distances`` is ``"euclidean"`` or an explicit
    (|N|+|M|)-square matrix ordered customers first, then depots."""

    name: str
    customers: tuple[Point, ...]
    depots: tuple[Point, ...]
    vehicle_count: int = 1
    vehicle_fixed_cost: float = 0.0
    transport_rate: float = 1.0
    w1: float = 0.0
    w2: float = 1.0
    speed: float = 40.0
    distances: str | tuple[tuple[float, ...], ...] = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "customers", tuple(self.customers))
        object.__setattr__(self, "depots", tuple(self.depots))
        if not isinstance(self.distances, str):
            object.__setattr__(self, "distances",
                               tuple(tuple(float(v) for v in row) for row in self.distances))
        if not self.customers:
            raise InvalidInstanceError("at least one customer required", rule="nonempty customers")
        if not self.depots:
            raise InvalidInstanceError("at least one depot required", rule="nonempty depots")
        if self.vehicle_count < 1:
            raise InvalidInstanceError("vehicle_count must be >= 1", rule="positive vehicle count")
        ids = [p.id for p in self.customers + self.depots]
        if len(set(ids)) != len(ids):
            raise InvalidInstanceError("point ids must be unique", rule="unique ids")
        for name in ("vehicle_fixed_cost", "transport_rate", "w1", "w2"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise InvalidInstanceError(f"{name} must be finite and >= 0", rule=f"nonnegative {name}")
        if not self.w1 + self.w2 > 0:
            raise InvalidInstanceError("w1 + w2 must be positive", rule="positive weights")
        if not (math.isfinite(self.speed) and self.speed > 0):
            raise InvalidInstanceError("speed must be positive", rule="positive speed")
        if isinstance(self.distances, str):
            if self.distances != "euclidean":
                raise InvalidInstanceError(f"unknown distance mode {self.distances!r}",
                                           rule="distance mode")
        else:
            _validate_matrix(np.asarray(self.distances, dtype=float), len(ids))

    @property
    def node_ids(self) -> tuple[int, ...]:
        return tuple(p.id for p in self.customers + self.depots)

    @cached_property
    def index(self) -> dict[int, int]:
        """Node id -> row of the distance matrix."""
        return {node: i for i, node in enumerate(self.node_ids)}

    @cached_property
    def customer_ids(self) -> frozenset[int]:
        return frozenset(p.id for p in self.customers)

    @cached_property
    def depot_ids(self) -> frozenset[int]:
        return frozenset(p.id for p in self.depots)

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        matrix = build_distance_matrix(self)
        matrix.setflags(write=False)
        return matrix

    def point(self, node_id: int) -> Point:
        return (self.customers + self.depots)[self.index[node_id]]

    def with_vehicles(self, count: int) -> "Instance":
        return replace(self, vehicle_count=count)


def _validate_matrix(matrix: np.ndarray, size: int) -> None:
    if matrix.ndim != 2 or matrix.shape != (size, size):
        raise InvalidInstanceError(f"distance matrix must be {size}x{size}, got {matrix.shape}",
                                   code="NON_SQUARE_MATRIX", rule="square matrix")
    if not np.all(np.isfinite(matrix)):
        raise InvalidInstanceError("distance matrix has non-finite entries",
                                   code="NEGATIVE_DISTANCE", rule="nonnegative distances")
    if np.any(matrix < 0):
        raise InvalidInstanceError("distance matrix has negative entries",
                                   code="NEGATIVE_DISTANCE", rule="nonnegative distances")
    scale = max(1.0, float(matrix.max()))
    if np.any(np.abs(matrix - matrix.T) > SYMMETRY_TOL * scale):
        raise InvalidInstanceError("distance matrix is not symmetric",
                                   code="ASYMMETRIC_MATRIX", rule="symmetric distances")
    if np.any(np.diag(matrix) != 0):
        raise InvalidInstanceError("distance matrix diagonal must be zero",
                                   code="ASYMMETRIC_MATRIX", rule="zero diagonal")


def build_distance_matrix(instance: Instance) -> np.ndarray:
    """Distances in km, rows/columns ordered customers then depots."""
    if isinstance(instance.distances, str):
        pts = instance.customers + instance.depots
        xy = np.array([(p.x, p.y) for p in pts], dtype=float)
        diff = xy[:, None, :] - xy[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])
    matrix = np.array(instance.distances, dtype=float)
    _validate_matrix(matrix, len(instance.customers) + len(instance.depots))
    return matrix


@dataclass(frozen=True)
class Route:
    vehicle_index: int
    depot_id: int
    customer_sequence: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "customer_sequence", tuple(self.customer_sequence))


@dataclass(frozen=True)
class Solution:
    routes: tuple[Route, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "routes", tuple(self.routes))


@dataclass(frozen=True)
class ObjectiveBreakdown:
    open_depots: int
    total_distance: float
    fixed_cost_sigma1: float
    transport_cost_sigma2: float
    total_cost_sigma: float
    weighted_objective: float
    makespan_hours: float

    def as_dict(self) -> dict:
        return {
            "open_depots": self.open_depots,
            "total_distance": self.total_distance,
            "fixed_cost_sigma1": self.fixed_cost_sigma1,
            "transport_cost_sigma2": self.transport_cost_sigma2,
            "total_cost_sigma": self.total_cost_sigma,
            "weighted_objective": self.weighted_objective,
            "makespan_hours": self.makespan_hours,
        }


class ViolationKind(str, enum.Enum):
    DUPLICATE_VISIT = "DUPLICATE_VISIT"
    MISSED_CUSTOMER = "MISSED_CUSTOMER"
    TOO_MANY_VEHICLES = "TOO_MANY_VEHICLES"
    BAD_DEPOT = "BAD_DEPOT"
    EMPTY_ROUTE = "EMPTY_ROUTE"
    BAD_VEHICLE_INDEX = "BAD_VEHICLE_INDEX"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    detail: str


def check_feasibility(instance: Instance, solution: Solution) -> list[Violation]:
    """List every constraint the solution breaks; empty means feasible.

    A customer id that is not in N counts as MISSED_CUSTOMER (the visit does
    not serve any real customer). When there are more routes than vehicles,
    indices above |V| are a consequence of that and are not reported again.
    """
    out: list[Violation] = []
    routes = solution.routes
    too_many = len(routes) > instance.vehicle_count
    if too_many:
        out.append(Violation(ViolationKind.TOO_MANY_VEHICLES,
                             f"{len(routes)} routes for {instance.vehicle_count} vehicles"))

    seen_vehicles: set[int] = set()
    for route in routes:
        v = route.vehicle_index
        if v in seen_vehicles:
            out.append(Violation(ViolationKind.BAD_VEHICLE_INDEX, f"vehicle {v} used twice"))
        elif v < 1 or (v > instance.vehicle_count and not too_many):
            out.append(Violation(ViolationKind.BAD_VEHICLE_INDEX,
                                 f"vehicle {v} outside 1..{instance.vehicle_count}"))
        seen_vehicles.add(v)
        if route.depot_id not in instance.depot_ids:
            out.append(Violation(ViolationKind.BAD_DEPOT,
                                 f"vehicle {v} starts at unknown depot {route.depot_id}"))
        if not route.customer_sequence:
            out.append(Violation(ViolationKind.EMPTY_ROUTE, f"vehicle {v} visits no customer"))

    visits: dict[int, int] = {}
    for route in routes:
        for c in route.customer_sequence:
            visits[c] = visits.get(c, 0) + 1
    for c in sorted(visits):
        if c not in instance.customer_ids:
            out.append(Violation(ViolationKind.MISSED_CUSTOMER, f"{c} is not a customer"))
        elif visits[c] > 1:
            out.append(Violation(ViolationKind.DUPLICATE_VISIT,
                                 f"customer {c} visited {visits[c]} times"))
    for p in instance.customers:
        if p.id not in visits:
            out.append(Violation(ViolationKind.MISSED_CUSTOMER, f"customer {p.id} not visited"))
    return out


def route_distance(instance: Instance, route: Route) -> float:
    """Closed length depot -> customers -> depot, summed in travel order."""
    D = instance.distance_matrix
    idx = instance.index
    prev = idx[route.depot_id]
    dist = 0.0
    for c in route.customer_sequence:
        dist += D[prev, idx[c]]
        prev = idx[c]
    return float(dist + D[prev, idx[route.depot_id]])


def evaluate_objective(instance: Instance, solution: Solution) -> ObjectiveBreakdown:
    violations = check_feasibility(instance, solution)
    if violations:
        raise InfeasibleSolutionError(violations)
    total = 0.0
    longest = 0.0
    for route in solution.routes:
        d = route_distance(instance, route)
        total += d
        longest = max(longest, d)
    opened = len({r.depot_id for r in solution.routes})
    sigma1 = instance.vehicle_fixed_cost * len(solution.routes)
    sigma2 = instance.transport_rate * total
    return ObjectiveBreakdown(
        open_depots=opened,
        total_distance=total,
        fixed_cost_sigma1=sigma1,
        transport_cost_sigma2=sigma2,
        total_cost_sigma=sigma1 + sigma2,
        weighted_objective=instance.w1 * opened + instance.w2 * total,
        makespan_hours=longest / instance.speed,
    )


def assign_depot(instance: Instance, segment: Sequence[int]) -> int:
    """Depot minimising d(depot, first) + d(last, depot); lowest id on ties."""
    if not segment:
        raise InvalidArgumentError("segment must be non-empty", code="EMPTY_SEGMENT")
    D = instance.distance_matrix
    idx = instance.index
    first, last = idx[segment[0]], idx[segment[-1]]
    best_id, best = None, math.inf
    for depot in sorted(instance.depot_ids):
        legs = D[idx[depot], first] + D[last, idx[depot]]
        if legs < best:
            best_id, best = depot, legs
    return best_id


def sorted_depot_rows(instance: Instance) -> np.ndarray:
    return np.array([instance.index[d] for d in sorted(instance.depot_ids)], dtype=np.int64)


def sorted_customer_rows(instance: Instance) -> np.ndarray:
    return np.array([instance.index[c] for c in sorted(instance.customer_ids)], dtype=np.int64)


def split_giant_tour(instance: Instance, permutation: Sequence[int], max_routes: int) -> Solution:
    """Cut a customer permutation into at most ``max_routes`` contiguous routes.

    The cut points minimise the longest route; among cuts with that makespan
    the one with the smallest total distance is kept. Each route starts at
    the depot chosen by :func:`assign_depot`. Vehicles are numbered 1.. in
    route order.
    """
    if len(permutation) == 0:
        raise InvalidArgumentError("permutation is empty", code="EMPTY_PERMUTATION")
    if sorted(permutation) != sorted(instance.customer_ids):
        raise InvalidArgumentError("permutation must list every customer exactly once",
                                   code="NOT_A_PERMUTATION")
    if not 1 <= max_routes <= instance.vehicle_count:
        raise InvalidArgumentError(f"max_routes must lie in 1..{instance.vehicle_count}",
                                   code="BAD_MAX_ROUTES")
    rows = np.array([instance.index[c] for c in permutation], dtype=np.int64)
    depots = sorted_depot_rows(instance)
    cost, choice = _kernels.segment_table(instance.distance_matrix, rows, depots)
    count, starts = _kernels.split_segments(cost, max_routes)
    ids = instance.node_ids
    routes = []
    for r in range(count):
        lo, hi = int(starts[r]), int(starts[r + 1])
        depot_row = depots[choice[lo, hi - 1]]
        routes.append(Route(r + 1, ids[depot_row], tuple(permutation[lo:hi])))
    return Solution(tuple(routes))
