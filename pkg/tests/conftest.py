import itertools
import math

import pytest

from acoroute.model import Instance, Point

# acceptance results collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def make_instance(customers, depots, **kw):
    """Customers get ids 1..n, depots n+1..n+m, from (x, y) pairs."""
    cs = tuple(Point(i + 1, float(x), float(y)) for i, (x, y) in enumerate(customers))
    ds = tuple(Point(len(cs) + j + 1, float(x), float(y)) for j, (x, y) in enumerate(depots))
    return Instance(name=kw.pop("name", "t"), customers=cs, depots=ds, **kw)


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def oracle_route_length(inst, depot_id, seq):
    pts = [inst.point(depot_id), *(inst.point(c) for c in seq), inst.point(depot_id)]
    return sum(dist(a, b) for a, b in zip(pts, pts[1:]))


def oracle_depot(inst, seg):
    first, last = inst.point(seg[0]), inst.point(seg[-1])
    return min(sorted(p.id for p in inst.depots),
               key=lambda d: (dist(inst.point(d), first) + dist(last, inst.point(d)), d))


def contiguous_cuts(perm, k):
    """Every way to cut ``perm`` into at most k non-empty contiguous pieces."""
    n = len(perm)
    for pieces in range(1, min(k, n) + 1):
        for cuts in itertools.combinations(range(1, n), pieces - 1):
            bounds = (0, *cuts, n)
            yield [tuple(perm[a:b]) for a, b in zip(bounds, bounds[1:])]


def brute_split_makespan(inst, perm, k):
    """Smallest longest-route length over all contiguous cuts, depots by argmin."""
    best = math.inf
    for segs in contiguous_cuts(perm, k):
        longest = max(oracle_route_length(inst, oracle_depot(inst, s), s) for s in segs)
        best = min(best, longest)
    return best


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def corner_instance():
    return make_instance([(1, 1), (-1, 1), (-1, -1), (1, -1)], [(0, 0)])
