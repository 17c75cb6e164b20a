"""Compiled inner loops shared by the split, the colony and the exact search.

All node arguments are row indices into the distance matrix (customers
first, then depots, in instance order). Depot and candidate arrays are passed
pre-sorted by node id so that every "ties by lowest id" rule reduces to
"first strict improvement wins".
"""

from __future__ import annotations

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True)
def segment_table(D, perm, depots):
    """Route length and chosen depot for every contiguous segment perm[i..j].

    The depot minimises the two depot legs; the length is then summed leg by
    leg in travel order so it matches a plain route evaluation bit for bit.
    """
    n = perm.shape[0]
    m = depots.shape[0]
    cost = np.full((n, n), INF)
    choice = np.full((n, n), -1, dtype=np.int64)
    running = np.empty(m)
    for i in range(n):
        first = perm[i]
        for d in range(m):
            running[d] = D[depots[d], first]
        for j in range(i, n):
            last = perm[j]
            if j > i:
                leg = D[perm[j - 1], last]
                for d in range(m):
                    running[d] += leg
            best_legs = INF
            best_d = 0
            for d in range(m):
                legs = D[depots[d], first] + D[last, depots[d]]
                if legs < best_legs:
                    best_legs = legs
                    best_d = d
            cost[i, j] = running[best_d] + D[last, depots[best_d]]
            choice[i, j] = best_d
    return cost, choice


@njit(cache=True)
def split_segments(cost, max_routes):
    """Optimal contiguous split of a giant tour.

    Primary key: the longest segment (makespan). Secondary key: total length
    among partitions achieving that makespan. At most ``max_routes`` segments.
    Returns (count, starts) where segment r covers starts[r]..starts[r+1]-1.
    """
    n = cost.shape[0]
    k = min(max_routes, n)

    worst = np.full((k + 1, n + 1), INF)
    worst[0, 0] = 0.0
    for r in range(1, k + 1):
        worst[r, 0] = 0.0
        for j in range(1, n + 1):
            best = worst[r - 1, j]
            for i in range(j):
                prev = worst[r - 1, i]
                if prev == INF:
                    continue
                c = cost[i, j - 1]
                v = prev if prev > c else c
                if v < best:
                    best = v
            worst[r, j] = best
    limit = worst[k, n]

    total = np.full((k + 1, n + 1), INF)
    back = np.full((k + 1, n + 1), -1, dtype=np.int64)
    total[0, 0] = 0.0
    for r in range(1, k + 1):
        total[r, 0] = 0.0
        for j in range(1, n + 1):
            best = total[r - 1, j]
            arg = -1
            for i in range(j):
                prev = total[r - 1, i]
                if prev == INF:
                    continue
                c = cost[i, j - 1]
                if c > limit:
                    continue
                v = prev + c
                if v < best:
                    best = v
                    arg = i
            total[r, j] = best
            back[r, j] = arg

    rev = np.empty(k + 1, dtype=np.int64)
    count = 0
    r = k
    j = n
    while j > 0:
        i = back[r, j]
        if i == -1:
            r -= 1
            continue
        rev[count] = j
        count += 1
        j = i
        r -= 1
    starts = np.empty(count + 1, dtype=np.int64)
    starts[0] = 0
    for t in range(count):
        starts[t + 1] = rev[count - 1 - t]
    return count, starts


@njit(cache=True)
def evaluate_split(cost, choice, starts, count, depots, w1, w2):
    """(weighted objective, total length, longest route length, open depots)."""
    used = np.zeros(depots.shape[0], dtype=np.bool_)
    total = 0.0
    longest = 0.0
    for r in range(count):
        c = cost[starts[r], starts[r + 1] - 1]
        total += c
        if c > longest:
            longest = c
        used[choice[starts[r], starts[r + 1] - 1]] = True
    opened = 0
    for d in range(depots.shape[0]):
        if used[d]:
            opened += 1
    return w1 * opened + w2 * total, total, longest, opened


@njit(cache=True)
def construct_tour(weight, cand, depots, u):
    """Sample one giant tour by roulette over ``weight[current, next]``.

    ``u`` holds len(cand) + 1 uniforms: one for the start depot, one per step.
    Candidates are scanned in ``cand`` order when accumulating the CDF.
    """
    n = cand.shape[0]
    m = depots.shape[0]
    d = int(u[0] * m)
    if d >= m:
        d = m - 1
    current = depots[d]
    visited = np.zeros(n, dtype=np.bool_)
    w = np.zeros(n)
    perm = np.empty(n, dtype=np.int64)
    for step in range(n):
        total = 0.0
        for c in range(n):
            if visited[c]:
                w[c] = 0.0
            else:
                w[c] = weight[current, cand[c]]
                total += w[c]
        pick = -1
        if total > 0.0 and total < INF:
            threshold = u[step + 1] * total
            acc = 0.0
            for c in range(n):
                if visited[c]:
                    continue
                acc += w[c]
                if acc > threshold:
                    pick = c
                    break
            if pick == -1:
                for c in range(n - 1, -1, -1):
                    if not visited[c] and w[c] > 0.0:
                        pick = c
                        break
        else:
            # weights under/overflowed: fall back to a uniform choice
            remaining = n - step
            target = int(u[step + 1] * remaining)
            if target >= remaining:
                target = remaining - 1
            seen = 0
            for c in range(n):
                if not visited[c]:
                    if seen == target:
                        pick = c
                        break
                    seen += 1
        visited[pick] = True
        perm[step] = cand[pick]
        current = cand[pick]
    return perm


@njit(cache=True)
def run_colony(D, weight, cand, depots, uniforms, max_routes, w1, w2):
    """Construct, split and score one tour per row of ``uniforms``."""
    ants = uniforms.shape[0]
    n = cand.shape[0]
    k = min(max_routes, n)
    perms = np.empty((ants, n), dtype=np.int64)
    counts = np.empty(ants, dtype=np.int64)
    starts = np.zeros((ants, k + 1), dtype=np.int64)
    seg_depots = np.zeros((ants, k), dtype=np.int64)
    objective = np.empty(ants)
    longest = np.empty(ants)
    for a in range(ants):
        perm = construct_tour(weight, cand, depots, uniforms[a])
        cost, choice = segment_table(D, perm, depots)
        count, st = split_segments(cost, k)
        obj, _, lng, _ = evaluate_split(cost, choice, st, count, depots, w1, w2)
        perms[a] = perm
        counts[a] = count
        for r in range(count + 1):
            starts[a, r] = st[r]
        for r in range(count):
            seg_depots[a, r] = depots[choice[st[r], st[r + 1] - 1]]
        objective[a] = obj
        longest[a] = lng
    return perms, counts, starts, seg_depots, objective, longest


@njit(cache=True)
def colony_walks(perms, counts, starts, seg_depots):
    """Flatten split tours into closed walks: [depot, c1, ..., ck] per route."""
    ants = perms.shape[0]
    n_routes = 0
    n_nodes = 0
    for a in range(ants):
        n_routes += counts[a]
        n_nodes += counts[a] + perms.shape[1]
    nodes = np.empty(n_nodes, dtype=np.int64)
    offsets = np.empty(n_routes + 1, dtype=np.int64)
    owner = np.empty(n_routes, dtype=np.int64)
    pos = 0
    route = 0
    for a in range(ants):
        for r in range(counts[a]):
            offsets[route] = pos
            owner[route] = a
            nodes[pos] = seg_depots[a, r]
            pos += 1
            for t in range(starts[a, r], starts[a, r + 1]):
                nodes[pos] = perms[a, t]
                pos += 1
            route += 1
    offsets[n_routes] = pos
    return nodes, offsets, owner


@njit(cache=True)
def deposit(values, evaporation, floor, nodes, offsets, owner, deltas):
    """Evaporate, add each ant's deposit once per undirected arc it used, clamp."""
    size = values.shape[0]
    out = values * (1.0 - evaporation)
    stamp = np.zeros((size, size), dtype=np.int64)
    for route in range(offsets.shape[0] - 1):
        token = owner[route] + 1
        lo = offsets[route]
        hi = offsets[route + 1]
        for t in range(lo, hi):
            a = nodes[t]
            b = nodes[t + 1] if t + 1 < hi else nodes[lo]
            if a == b:
                continue
            i = a if a < b else b
            j = b if a < b else a
            if stamp[i, j] == token:
                continue
            stamp[i, j] = token
            out[i, j] += deltas[owner[route]]
            out[j, i] += deltas[owner[route]]
    for i in range(size):
        for j in range(size):
            if out[i, j] < floor:
                out[i, j] = floor
    return out


@njit(cache=True)
def _next_permutation(a):
    n = a.shape[0]
    i = n - 2
    while i >= 0 and a[i] >= a[i + 1]:
        i -= 1
    if i < 0:
        return False
    j = n - 1
    while a[j] <= a[i]:
        j -= 1
    a[i], a[j] = a[j], a[i]
    lo = i + 1
    hi = n - 1
    while lo < hi:
        a[lo], a[hi] = a[hi], a[lo]
        lo += 1
        hi -= 1
    return True


@njit(cache=True)
def exact_search(D, cand, depots, max_routes, w1, w2):
    """Exhaustive minimum of the weighted objective.

    Enumerates permutations of ``cand`` (lexicographic in cand order), every
    cut mask with at most ``max_routes`` segments, and every non-empty set of
    depots allowed to open; each segment then uses its cheapest allowed depot.
    Scanning allowed-depot sets instead of raw assignments is exact: the
    optimum's own open set is among them.
    Returns (objective, order, cut_mask, depot_subset); first strict minimum wins.
    """
    n = cand.shape[0]
    m = depots.shape[0]
    order = np.arange(n)
    perm = np.empty(n, dtype=np.int64)
    inner = np.zeros(n)
    legs = np.empty((m, n, n))
    best = INF
    best_order = order.copy()
    best_mask = 0
    best_subset = 1
    seg_lo = np.empty(n, dtype=np.int64)
    seg_hi = np.empty(n, dtype=np.int64)
    while True:
        for t in range(n):
            perm[t] = cand[order[t]]
        for t in range(1, n):
            inner[t] = inner[t - 1] + D[perm[t - 1], perm[t]]
        for d in range(m):
            for i in range(n):
                for j in range(i, n):
                    legs[d, i, j] = D[depots[d], perm[i]] + D[perm[j], depots[d]]
        for mask in range(1 << (n - 1)):
            segs = 1
            s = 0
            for t in range(n - 1):
                if (mask >> t) & 1:
                    seg_lo[segs - 1] = s
                    seg_hi[segs - 1] = t
                    s = t + 1
                    segs += 1
            if segs > max_routes:
                continue
            seg_lo[segs - 1] = s
            seg_hi[segs - 1] = n - 1
            for subset in range(1, 1 << m):
                opened = 0
                for d in range(m):
                    if (subset >> d) & 1:
                        opened += 1
                total = 0.0
                for g in range(segs):
                    lo = seg_lo[g]
                    hi = seg_hi[g]
                    cheapest = INF
                    for d in range(m):
                        if (subset >> d) & 1:
                            if legs[d, lo, hi] < cheapest:
                                cheapest = legs[d, lo, hi]
                    total += cheapest + inner[hi] - inner[lo]
                obj = w1 * opened + w2 * total
                if obj < best:
                    best = obj
                    best_order[:] = order
                    best_mask = mask
                    best_subset = subset
        if not _next_permutation(order):
            break
    return best, best_order, best_mask, best_subset


@njit(cache=True)
def exact_split_search(D, cand, depots, max_routes, w1, w2):
    """Best weighted objective over all giant tours, each cut by ``split_segments``.

    Ties on the objective go to the shorter makespan, then the first tour in
    lexicographic cand order. Returns (objective, longest, order).
    """
    n = cand.shape[0]
    order = np.arange(n)
    perm = np.empty(n, dtype=np.int64)
    best = INF
    best_longest = INF
    best_order = order.copy()
    while True:
        for t in range(n):
            perm[t] = cand[order[t]]
        cost, choice = segment_table(D, perm, depots)
        count, starts = split_segments(cost, max_routes)
        obj, _, lng, _ = evaluate_split(cost, choice, starts, count, depots, w1, w2)
        if obj < best or (obj == best and lng < best_longest):
            best = obj
            best_longest = lng
            best_order[:] = order
        if not _next_permutation(order):
            break
    return best, best_longest, best_order
