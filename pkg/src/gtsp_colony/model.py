"""E-GTSP problem instances, tours and feasibility checks.

An instance is a complete undirected graph whose node set is partitioned
into ``p`` clusters.  A feasible tour is a cycle visiting exactly one node
of every cluster.  Node ids are 0-based integers throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError


class Instance:
    """Immutable E-GTSP instance backed by a dense symmetric cost matrix.

    ``clusters`` is normalised to a tuple of sorted tuples; the cluster
    index of a node is its position in that tuple.
    """

    def __init__(
        self,
        name: str,
        costs,
        clusters: Iterable[Iterable[int]],
        coords=None,
    ):
        matrix = np.array(costs, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise InputError(f"cost matrix must be square, got shape {matrix.shape}")
        n = matrix.shape[0]
        if not np.all(np.isfinite(matrix)):
            raise InputError("cost matrix contains non-finite entries")
        if np.any(matrix < 0):
            raise InputError("edge costs must be non-negative")
        if np.any(np.diag(matrix) != 0):
            raise InputError("edge_cost(i, i) must be 0")
        if not np.array_equal(matrix, matrix.T):
            raise InputError("cost matrix must be symmetric")

        groups = tuple(tuple(sorted(int(v) for v in c)) for c in clusters)
        if len(groups) < 3:
            raise InputError(f"need at least 3 clusters, got {len(groups)}")
        cluster_of = np.full(n, -1, dtype=np.int64)
        for k, group in enumerate(groups):
            if not group:
                raise InputError(f"cluster {k} is empty")
            for v in group:
                if not 0 <= v < n:
                    raise InputError(f"cluster {k} references unknown node {v}")
                if cluster_of[v] != -1:
                    raise InputError(
                        f"node {v} belongs to clusters {cluster_of[v]} and {k}"
                    )
                cluster_of[v] = k
        missing = np.flatnonzero(cluster_of < 0)
        if missing.size:
            raise InputError(f"nodes without a cluster: {missing.tolist()}")

        if coords is not None:
            coords = np.array(coords, dtype=np.float64)
            if coords.shape != (n, 2):
                raise InputError(f"coords must have shape ({n}, 2), got {coords.shape}")
            coords.flags.writeable = False
        matrix.flags.writeable = False
        cluster_of.flags.writeable = False

        self.name = str(name)
        self.costs = matrix
        self.clusters = groups
        self.cluster_of = cluster_of
        self.coords = coords
        self.cluster_nodes = tuple(np.array(g, dtype=np.int64) for g in groups)

    @property
    def n(self) -> int:
        return self.costs.shape[0]

    @property
    def p(self) -> int:
        return len(self.clusters)

    def edge_cost(self, i: int, j: int) -> float:
        return float(self.costs[i, j])

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        same_coords = (self.coords is None and other.coords is None) or (
            self.coords is not None
            and other.coords is not None
            and np.array_equal(self.coords, other.coords)
        )
        return (
            self.name == other.name
            and self.clusters == other.clusters
            and np.array_equal(self.costs, other.costs)
            and same_coords
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        return f"Instance(name={self.name!r}, n={self.n}, p={self.p})"


@dataclass(frozen=True)
class Tour:
    nodes: tuple[int, ...]
    cost: float

    def __len__(self):
        return len(self.nodes)

    def edges(self):
        """Cycle edges ``(a, b)`` in visiting order, closing edge last."""
        k = len(self.nodes)
        return [(self.nodes[i], self.nodes[(i + 1) % k]) for i in range(k)]


def make_tour(instance: Instance, nodes: Sequence[int]) -> Tour:
    seq = tuple(int(v) for v in nodes)
    return Tour(seq, tour_cost(instance, seq))


def _cycle_cost(costs: np.ndarray, nodes: Sequence[int]) -> float:
    idx = np.asarray(nodes)
    return float(costs[idx, np.concatenate((idx[1:], idx[:1]))].sum())


def tour_cost(instance: Instance, nodes: Sequence[int]) -> float:
    """Total cost of the closed cycle through ``nodes``."""
    seq = [int(v) for v in nodes]
    for v in seq:
        if not 0 <= v < instance.n:
            raise InputError(f"unknown node id {v}")
    if len(seq) < 2:
        return 0.0
    return _cycle_cost(instance.costs, seq)


def validate_tour(instance: Instance, nodes: Sequence[int]) -> list[str]:
    """Return the list of feasibility violations; an empty list means valid."""
    violations = []
    seen_nodes = set()
    seen_clusters = set()
    for v in nodes:
        v = int(v)
        if not 0 <= v < instance.n:
            violations.append(f"unknown node {v}")
            continue
        if v in seen_nodes:
            violations.append(f"node {v} repeated")
            continue
        seen_nodes.add(v)
        k = int(instance.cluster_of[v])
        if k in seen_clusters:
            violations.append(f"cluster visited twice: {k}")
        seen_clusters.add(k)
    for k in range(instance.p):
        if k not in seen_clusters:
            violations.append(f"missing cluster: {k}")
    if len(nodes) != instance.p and not violations:
        violations.append(f"tour length {len(nodes)} != {instance.p}")
    return violations


def is_valid_tour(instance: Instance, nodes: Sequence[int]) -> bool:
    return not validate_tour(instance, nodes)
