"""Ant colony solver.

Each ant builds a giant tour over all customers. From node ``k`` the next
customer ``i`` is drawn with probability proportional to

    phi[k,i]**gamma * omega[k,i]**epsilon * sigma[k,i]**theta * mu[k,i]**rho

where ``omega`` is the pheromone trail and ``phi``, ``sigma``, ``mu`` are fixed
desirabilities derived from distance, freight cost and per-customer handling
cost. The tour is cut into vehicle routes by :func:`~acoroute.model.split_giant_tour`
and scored with the weighted objective. After every iteration

    omega <- (1 - evaporation) * omega + sum over ants of deposit_q / objective

on the arcs of each ant's routes (depot legs included), clamped below at
``pheromone_floor``.

Every ant draws from its own random stream seeded by (seed, iteration, ant),
so results do not depend on the order in which ants are evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError
from .model import (
    Instance,
    ObjectiveBreakdown,
    Route,
    Solution,
    evaluate_objective,
    sorted_customer_rows,
    sorted_depot_rows,
)

DISTANCE_FLOOR = 1e-6
COST_FLOOR = 1e-6
OBJECTIVE_FLOOR = 1e-9


@dataclass(frozen=True)
class AcoParams:
    gamma: float = 2.0
    epsilon: float = 1.0
    theta: float = 0.0
    rho: float = 0.0
    evaporation: float = 0.1
    ants: int = 20
    iterations: int = 200
    deposit_q: float = 1.0
    initial_pheromone: float = 1.0
    pheromone_floor: float = 1e-4
    seed: int = 0
    # which key picks the incumbent: "objective" or "makespan"
    rank_by: str = "objective"
    # customer id -> handling cost; feeds the distribution desirability
    handling_costs: Mapping[int, float] | None = field(default=None, compare=True)

    def __post_init__(self):
        for name in ("gamma", "epsilon", "theta", "rho"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise InvalidArgumentError(f"{name} must be finite and >= 0", code="BAD_PARAMS")
        if not 0.0 <= self.evaporation <= 1.0:
            raise InvalidArgumentError("evaporation must lie in [0, 1]", code="BAD_PARAMS")
        if self.ants < 1 or self.iterations < 1:
            raise InvalidArgumentError("ants and iterations must be positive", code="BAD_PARAMS")
        if not (self.deposit_q > 0 and self.initial_pheromone > 0 and self.pheromone_floor > 0):
            raise InvalidArgumentError("deposit_q, initial_pheromone and pheromone_floor must be > 0",
                                       code="BAD_PARAMS")
        if self.pheromone_floor > self.initial_pheromone:
            raise InvalidArgumentError("pheromone_floor must not exceed initial_pheromone",
                                       code="BAD_PARAMS")
        if self.rank_by not in ("objective", "makespan"):
            raise InvalidArgumentError("rank_by must be 'objective' or 'makespan'", code="BAD_PARAMS")
        if not 0 <= self.seed < 2**64:
            raise InvalidArgumentError("seed must be a 64-bit unsigned integer", code="BAD_PARAMS")


@dataclass(frozen=True)
class ProxyTriple:
    distance_proxy: float
    freight_proxy: float
    distribution_proxy: float


@dataclass
class PheromoneMatrix:
    """Symmetric trail values over all nodes, in distance-matrix order."""

    values: np.ndarray
    node_ids: tuple[int, ...]

    @classmethod
    def uniform(cls, instance: Instance, value: float) -> "PheromoneMatrix":
        size = len(instance.node_ids)
        return cls(np.full((size, size), float(value)), instance.node_ids)

    def __getitem__(self, arc: tuple[int, int]) -> float:
        i, j = (self.node_ids.index(a) for a in arc)
        return float(self.values[i, j])


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    best_objective: float
    iteration_best_objective: float


@dataclass(frozen=True)
class ConvergenceTrace:
    records: tuple[TraceRecord, ...]

    def best_so_far(self) -> list[float]:
        return [r.best_objective for r in self.records]


def heuristic_proxies(instance: Instance, from_node: int, to_node: int,
                      handling_costs: Mapping[int, float] | None = None) -> ProxyTriple:
    """Desirabilities of the arc ``from_node -> to_node`` (node ids).

    Distance and freight proxies are reciprocals with a 1e-6 floor on the
    denominator. The freight proxy is neutral (1) when transport is free, and
    the distribution proxy is neutral unless a handling cost is given for
    ``to_node``.
    """
    if from_node == to_node:
        raise InvalidArgumentError(f"arc {from_node}->{to_node} is a loop", code="SAME_NODE")
    idx = instance.index
    d = float(instance.distance_matrix[idx[from_node], idx[to_node]])
    distance_proxy = 1.0 / max(d, DISTANCE_FLOOR)
    if instance.transport_rate > 0:
        freight_proxy = 1.0 / max(instance.transport_rate * d, COST_FLOOR)
    else:
        freight_proxy = 1.0
    distribution_proxy = 1.0
    if handling_costs and to_node in handling_costs:
        distribution_proxy = 1.0 / max(float(handling_costs[to_node]), COST_FLOOR)
    return ProxyTriple(distance_proxy, freight_proxy, distribution_proxy)


def proxy_matrices(instance: Instance, handling_costs: Mapping[int, float] | None = None):
    """Vectorised :func:`heuristic_proxies` over every arc; diagonal is NaN."""
    D = np.asarray(instance.distance_matrix)
    phi = 1.0 / np.maximum(D, DISTANCE_FLOOR)
    if instance.transport_rate > 0:
        sigma = 1.0 / np.maximum(instance.transport_rate * D, COST_FLOOR)
    else:
        sigma = np.ones_like(D)
    mu = np.ones_like(D)
    if handling_costs:
        for node, cost in handling_costs.items():
            mu[:, instance.index[node]] = 1.0 / max(float(cost), COST_FLOOR)
    for m in (phi, sigma, mu):
        np.fill_diagonal(m, np.nan)
    return phi, sigma, mu


def heuristic_weights(instance: Instance, params: AcoParams) -> np.ndarray:
    """The pheromone-free factor phi**gamma * sigma**theta * mu**rho per arc."""
    phi, sigma, mu = proxy_matrices(instance, params.handling_costs)
    return phi ** params.gamma * sigma ** params.theta * mu ** params.rho


def transition_probabilities(current: int, feasible, pheromone: PheromoneMatrix,
                             instance: Instance, params: AcoParams) -> dict[int, float]:
    """Probability of moving from ``current`` to each node id in ``feasible``."""
    if not feasible:
        raise InvalidArgumentError("no feasible successor", code="EMPTY_FEASIBLE_SET")
    if current in feasible:
        raise InvalidArgumentError("current node cannot be its own successor", code="SAME_NODE")
    idx = instance.index
    scores = {}
    for j in sorted(feasible):
        p = heuristic_proxies(instance, current, j, params.handling_costs)
        omega = pheromone.values[idx[current], idx[j]]
        scores[j] = (p.distance_proxy ** params.gamma * omega ** params.epsilon
                     * p.freight_proxy ** params.theta * p.distribution_proxy ** params.rho)
    total = sum(scores.values())
    return {j: s / total for j, s in scores.items()}


def ant_uniforms(seed: int, iteration: int, ant: int, n_customers: int) -> np.ndarray:
    """The random stream of one ant: start-depot draw followed by one draw per step."""
    return np.random.default_rng([seed, iteration, ant]).random(n_customers + 1)


def construct_ant_tour(instance: Instance, pheromone: PheromoneMatrix, params: AcoParams,
                       uniforms: np.ndarray) -> list[int]:
    """Sample one giant tour (customer ids) from the supplied random stream.

    ``uniforms`` must hold |N| + 1 values in [0, 1); see :func:`ant_uniforms`.
    """
    n = len(instance.customers)
    uniforms = np.asarray(uniforms, dtype=float)
    if uniforms.shape != (n + 1,):
        raise InvalidArgumentError(f"need {n + 1} uniforms, got {uniforms.shape}", code="BAD_STREAM")
    weight = heuristic_weights(instance, params) * pheromone.values ** params.epsilon
    perm = _kernels.construct_tour(weight, sorted_customer_rows(instance),
                                   sorted_depot_rows(instance), uniforms)
    ids = instance.node_ids
    return [ids[r] for r in perm]


def _walks(idx: Mapping[int, int], solutions: Sequence[Solution]):
    nodes, offsets, owner = [], [], []
    for a, solution in enumerate(solutions):
        for route in solution.routes:
            offsets.append(len(nodes))
            owner.append(a)
            nodes.append(idx[route.depot_id])
            nodes.extend(idx[c] for c in route.customer_sequence)
    offsets.append(len(nodes))
    return (np.array(nodes, dtype=np.int64), np.array(offsets, dtype=np.int64),
            np.array(owner, dtype=np.int64))


def update_pheromone(pheromone: PheromoneMatrix,
                     ant_results: Sequence[tuple[Solution, float]],
                     params: AcoParams) -> PheromoneMatrix:
    """Evaporate, then deposit ``deposit_q / objective`` on every arc each ant used.

    ``ant_results`` pairs each ant's split solution with its weighted
    objective. An arc used several times by one ant is reinforced once for
    that ant; both directions are updated so the matrix stays symmetric.
    """
    objectives = np.array([obj for _, obj in ant_results], dtype=float)
    if np.any(~(objectives > 0)):
        raise InvalidArgumentError("ant objectives must be positive", code="NONPOSITIVE_OBJECTIVE")
    index = {node: i for i, node in enumerate(pheromone.node_ids)}
    nodes, offsets, owner = _walks(index, [s for s, _ in ant_results])
    values = _kernels.deposit(np.asarray(pheromone.values, dtype=float), params.evaporation,
                              params.pheromone_floor, nodes, offsets, owner,
                              params.deposit_q / objectives)
    return PheromoneMatrix(values, pheromone.node_ids)


def _solution_from_arrays(instance: Instance, perm, count, starts, seg_depots) -> Solution:
    ids = instance.node_ids
    routes = []
    for r in range(int(count)):
        seq = tuple(ids[c] for c in perm[starts[r]:starts[r + 1]])
        routes.append(Route(r + 1, ids[seg_depots[r]], seq))
    return Solution(tuple(routes))


def solve_aco(instance: Instance, params: AcoParams = AcoParams()
              ) -> tuple[Solution, ObjectiveBreakdown, ConvergenceTrace]:
    """Run the colony and return the best solution, its breakdown and the trace.

    With ``rank_by="objective"`` best means lowest weighted objective, then
    shorter makespan. With ``rank_by="makespan"`` the order is reversed; use
    it when delivery time is the quantity being compared. Pheromone deposits
    use the weighted objective either way. Remaining ties keep the earlier find.
    The trace records the primary ranking value (objective, or makespan hours).
    """
    n = len(instance.customers)
    D = np.ascontiguousarray(instance.distance_matrix, dtype=float)
    eta = heuristic_weights(instance, params)
    cand = sorted_customer_rows(instance)
    depots = sorted_depot_rows(instance)
    values = np.full(D.shape, float(params.initial_pheromone))
    k = instance.vehicle_count

    by_makespan = params.rank_by == "makespan"
    best_key = (math.inf, math.inf)
    best = None
    records = []
    for it in range(params.iterations):
        weight = eta * values ** params.epsilon
        uniforms = np.stack([ant_uniforms(params.seed, it, a, n) for a in range(params.ants)])
        perms, counts, starts, seg_depots, objective, longest = _kernels.run_colony(
            D, weight, cand, depots, uniforms, k, instance.w1, instance.w2)
        for a in range(params.ants):
            key = ((longest[a], objective[a]) if by_makespan else (objective[a], longest[a]))
            if key < best_key:
                best_key = key
                best = (perms[a].copy(), counts[a], starts[a].copy(), seg_depots[a].copy())
        primary = longest / instance.speed if by_makespan else objective
        scale = instance.speed if by_makespan else 1.0
        records.append(TraceRecord(it, float(best_key[0] / scale), float(primary.min())))
        nodes, offsets, owner = _kernels.colony_walks(perms, counts, starts, seg_depots)
        # zero-length instances score 0; floor keeps the deposit finite
        deltas = params.deposit_q / np.maximum(objective, OBJECTIVE_FLOOR)
        values = _kernels.deposit(values, params.evaporation, params.pheromone_floor,
                                  nodes, offsets, owner, deltas)

    solution = _solution_from_arrays(instance, *best)
    return solution, evaluate_objective(instance, solution), ConvergenceTrace(tuple(records))
