"""Multi-depot vehicle routing with an ant colony solver, baselines,
a fleet-size benchmark harness and a package-tracking simulator."""

from .aco import AcoParams, ConvergenceTrace, PheromoneMatrix, ProxyTriple, solve_aco
from .baselines import solve_exact, solve_greedy
from .instance_io import GeneratorConfig, generate_instance, parse_instance, serialize_instance
from .model import (
    Instance,
    ObjectiveBreakdown,
    Point,
    Route,
    Solution,
    Violation,
    ViolationKind,
    check_feasibility,
    evaluate_objective,
    split_giant_tour,
)

__version__ = "0.1.0"
