"""Reference solutions: nearest-neighbour tours and exact optima for small instances."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, InputError
from .model import Instance, Tour, make_tour

DP_MAX_CLUSTERS = 16
BRUTEFORCE_MAX_CLUSTERS = 8
BRUTEFORCE_MAX_TOURS = 20_000_000


@dataclass(frozen=True)
class ExactResult:
    optimum_cost: float
    optimum_tour: Tour
    states_expanded: int


def nearest_neighbor(instance: Instance, start_node: int, rng=None) -> Tour:
    """Greedy tour: always move to the cheapest node of an unvisited cluster.

    ``rng`` is accepted for interface symmetry with the solvers; ties are
    resolved deterministically towards the lowest node id.
    """
    if not 0 <= start_node < instance.n:
        raise InputError(f"unknown start node {start_node}")
    costs = instance.costs
    available = np.ones(instance.n, dtype=bool)
    current = int(start_node)
    available[list(instance.clusters[instance.cluster_of[current]])] = False
    nodes = [current]
    for _ in range(instance.p - 1):
        cand = np.flatnonzero(available)
        nxt = int(cand[np.argmin(costs[current, cand])])
        available[list(instance.clusters[instance.cluster_of[nxt]])] = False
        nodes.append(nxt)
        current = nxt
    return make_tour(instance, nodes)


def best_nearest_neighbor(instance: Instance) -> Tour:
    """Nearest-neighbour tour minimised over every start node."""
    best = None
    for s in range(instance.n):
        t = nearest_neighbor(instance, s)
        if best is None or t.cost < best.cost:
            best = t
    return best


def exact_optimum_dp(instance: Instance, max_clusters: int = DP_MAX_CLUSTERS) -> ExactResult:
    """Held-Karp over clusters.

    The smallest cluster is fixed as the tour start. State ``(mask, v)`` holds
    the cheapest path from each start node through the clusters in ``mask``
    ending at node ``v``; all start nodes are carried together as rows.
    """
    p = instance.p
    if p > max_clusters:
        raise CapacityError(f"exact DP limited to {max_clusters} clusters, instance has {p}")
    C = instance.costs
    n = instance.n
    fixed = min(range(p), key=lambda k: (len(instance.clusters[k]), k))
    starts = np.array(instance.clusters[fixed])
    others = [k for k in range(p) if k != fixed]
    members = [np.array(instance.clusters[k]) for k in others]
    r = len(others)
    full = (1 << r) - 1

    dp = np.full((1 << r, len(starts), n), np.inf)
    expanded = 0
    for b, nodes in enumerate(members):
        dp[1 << b][:, nodes] = C[np.ix_(starts, nodes)]
        expanded += len(starts) * len(nodes)
    for mask in range(1, full + 1):
        if mask & (mask - 1) == 0:
            continue
        for b, nodes in enumerate(members):
            bit = 1 << b
            if not mask & bit:
                continue
            prev = dp[mask ^ bit]
            # (starts, u, v) -> min over predecessor u
            dp[mask][:, nodes] = (prev[:, :, None] + C[None, :, nodes]).min(axis=1)
            expanded += len(starts) * len(nodes)

    closing = dp[full] + C[:, starts].T
    s_idx, last = np.unravel_index(np.argmin(closing), closing.shape)
    best = float(closing[s_idx, last])

    # backtrack through the stored table
    path = [int(last)]
    mask = full
    v = int(last)
    while mask & (mask - 1):
        b = others.index(int(instance.cluster_of[v]))
        mask ^= 1 << b
        u = int(np.argmin(dp[mask][s_idx] + C[:, v]))
        path.append(u)
        v = u
    path.append(int(starts[s_idx]))
    path.reverse()
    tour = make_tour(instance, path)
    return ExactResult(best, tour, expanded)


def exact_optimum_bruteforce(
    instance: Instance,
    max_clusters: int = BRUTEFORCE_MAX_CLUSTERS,
    max_tours: int = BRUTEFORCE_MAX_TOURS,
) -> ExactResult:
    """Enumerate every cluster order (first cluster fixed, one orientation) and
    every choice of representative nodes."""
    p = instance.p
    if p > max_clusters:
        raise CapacityError(f"brute force limited to {max_clusters} clusters, instance has {p}")
    selections = math.prod(len(c) for c in instance.clusters)
    orders = math.factorial(p - 1) // 2
    if orders * selections > max_tours:
        raise CapacityError(
            f"brute force would enumerate {orders * selections} tours (limit {max_tours})"
        )
    C = instance.costs
    # column k = node chosen from cluster k
    picks = np.array(list(itertools.product(*instance.clusters)), dtype=np.int64)
    best_cost = math.inf
    best_nodes = None
    for rest in itertools.permutations(range(1, p)):
        if rest[0] > rest[-1]:
            continue  # mirror image of an order already enumerated
        order = (0,) + rest
        seq = picks[:, order]
        totals = C[seq, np.roll(seq, -1, axis=1)].sum(axis=1)
        i = int(np.argmin(totals))
        if totals[i] < best_cost:
            best_cost = float(totals[i])
            best_nodes = seq[i]
    tour = make_tour(instance, best_nodes)
    return ExactResult(tour.cost, tour, orders * selections)
