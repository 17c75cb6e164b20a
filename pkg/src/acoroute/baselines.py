"""Greedy comparator and exhaustive exact solver."""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import _kernels
from .errors import TooLargeError
from .model import (
    Instance,
    ObjectiveBreakdown,
    Route,
    Solution,
    evaluate_objective,
    sorted_customer_rows,
    sorted_depot_rows,
    split_giant_tour,
)

PARTITION_LIMIT = 6


def nearest_neighbor_tour(instance: Instance) -> list[int]:
    """Giant tour from the closest depot-customer pair, then nearest unvisited.

    Ties go to the lowest depot id, then the lowest customer id.
    """
    D = instance.distance_matrix
    idx = instance.index
    customers = sorted(instance.customer_ids)
    _, _, first = min((D[idx[d], idx[c]], d, c)
                      for d in sorted(instance.depot_ids) for c in customers)
    tour = [first]
    left = set(customers) - {first}
    while left:
        cur = idx[tour[-1]]
        nxt = min(left, key=lambda c: (D[cur, idx[c]], c))
        tour.append(nxt)
        left.remove(nxt)
    return tour


def solve_greedy(instance: Instance) -> tuple[Solution, ObjectiveBreakdown]:
    tour = nearest_neighbor_tour(instance)
    solution = split_giant_tour(instance, tour, instance.vehicle_count)
    return solution, evaluate_objective(instance, solution)


SPACES = ("split", "contiguous", "partition")


def solve_exact(instance: Instance, max_customers: int = 8, space: str = "split"
                ) -> tuple[Solution, ObjectiveBreakdown]:
    """Minimum weighted objective by exhaustive enumeration.

    ``space`` selects what is enumerated:

    ``"split"``
        every permutation of the customers, each cut by
        :func:`~acoroute.model.split_giant_tour` into at most |V| routes. This
        is exactly the set of solutions the greedy and colony solvers can
        return, so it is the oracle for them. Ties go to the shorter
        makespan, then the lexicographically first permutation.
    ``"contiguous"``
        every permutation, every cut into at most |V| contiguous routes and
        every depot assignment. Candidates are scanned with permutations in
        lexicographic id order, then cut masks, then depot sets, and the
        first strict minimum is kept. Any assignment of customers to routes
        is some permutation cut into pieces, so this is the optimum of the
        full model.
    ``"partition"``
        set partitions of the customers, each block toured optimally from
        its best depot; at most six customers. Cross-checks ``"contiguous"``.
    """
    if space not in SPACES:
        raise ValueError(f"space must be one of {SPACES}")
    n = len(instance.customers)
    limit = min(max_customers, PARTITION_LIMIT) if space == "partition" else max_customers
    if n > limit:
        raise TooLargeError(f"{n} customers exceed the exact-search limit of {limit}")
    if space == "split":
        solution = _split_search(instance)
    elif space == "contiguous":
        solution = _contiguous_search(instance)
    else:
        solution = _partition_search(instance)
    return solution, evaluate_objective(instance, solution)


def _split_search(instance: Instance) -> Solution:
    D = np.ascontiguousarray(instance.distance_matrix, dtype=float)
    cand = sorted_customer_rows(instance)
    _, _, order = _kernels.exact_split_search(
        D, cand, sorted_depot_rows(instance), instance.vehicle_count, instance.w1, instance.w2)
    ids = instance.node_ids
    return split_giant_tour(instance, [ids[cand[o]] for o in order], instance.vehicle_count)


def _contiguous_search(instance: Instance) -> Solution:
    D = np.ascontiguousarray(instance.distance_matrix, dtype=float)
    cand = sorted_customer_rows(instance)
    depots = sorted_depot_rows(instance)
    _, order, mask, subset = _kernels.exact_search(
        D, cand, depots, instance.vehicle_count, instance.w1, instance.w2)
    ids = instance.node_ids
    perm = [ids[cand[o]] for o in order]
    allowed = [ids[depots[d]] for d in range(len(depots)) if (subset >> d) & 1]
    segments, start = [], 0
    for t in range(len(perm) - 1):
        if (mask >> t) & 1:
            segments.append(perm[start:t + 1])
            start = t + 1
    segments.append(perm[start:])
    idx = instance.index
    routes = []
    for v, seg in enumerate(segments, start=1):
        depot = min(allowed, key=lambda d: (D[idx[d], idx[seg[0]]] + D[idx[seg[-1]], idx[d]], d))
        routes.append(Route(v, depot, tuple(seg)))
    return Solution(tuple(routes))


def _set_partitions(items):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[head]] + part
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1:]


def _partition_search(instance: Instance) -> Solution:
    D = instance.distance_matrix
    idx = instance.index
    depots = sorted(instance.depot_ids)
    tours: dict[tuple[frozenset, int], tuple[float, tuple[int, ...]]] = {}

    def best_tour(block, depot):
        key = (frozenset(block), depot)
        if key not in tours:
            best = (math.inf, ())
            for order in itertools.permutations(sorted(block)):
                nodes = [depot, *order, depot]
                length = sum(D[idx[a], idx[b]] for a, b in zip(nodes, nodes[1:]))
                if length < best[0]:
                    best = (length, order)
            tours[key] = best
        return tours[key]

    best_value, best_plan = math.inf, None
    customers = sorted(instance.customer_ids)
    for part in _set_partitions(customers):
        if len(part) > instance.vehicle_count:
            continue
        for r in range(1, len(depots) + 1):
            for allowed in itertools.combinations(depots, r):
                total, plan = 0.0, []
                for block in part:
                    length, order, depot = min(best_tour(block, d) + (d,) for d in allowed)
                    total += length
                    plan.append((depot, order))
                value = instance.w1 * r + instance.w2 * total
                if value < best_value:
                    best_value, best_plan = value, plan
    routes = [Route(v, depot, order) for v, (depot, order) in enumerate(sorted(best_plan), start=1)]
    return Solution(tuple(routes))
