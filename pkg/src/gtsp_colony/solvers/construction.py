"""Agent state and the state-transition rule used to build tours."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..model import Instance, Tour, _cycle_cost
from .pheromone import LocalRule, PheromoneMatrix


def visibility(instance: Instance, i: int, j: int, cap: float = 1e9) -> float:
    c = instance.costs[i, j]
    return cap if c == 0 else min(1.0 / float(c), cap)


def visibility_matrix(instance: Instance, cap: float = 1e9) -> np.ndarray:
    c = instance.costs
    with np.errstate(divide="ignore"):
        eta = np.where(c > 0, 1.0 / np.where(c > 0, c, 1.0), cap)
    eta = np.minimum(eta, cap)
    np.fill_diagonal(eta, 0.0)
    return eta


def heuristic_matrix(instance: Instance, beta: float, cap: float = 1e9) -> np.ndarray:
    return visibility_matrix(instance, cap) ** beta


@dataclass
class AgentState:
    """One ant/robot/agent while it builds a tour.

    ``visited_clusters`` is the tabu list; ``available`` marks nodes of
    clusters not yet visited.
    """

    instance: Instance
    current_node: int
    visited_clusters: set[int] = field(default_factory=set)
    partial_tour: list[int] = field(default_factory=list)
    sensitivity: float = 0.0
    available: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    @classmethod
    def at(cls, instance: Instance, node: int, sensitivity: float = 0.0) -> "AgentState":
        agent = cls(instance, int(node), sensitivity=sensitivity)
        agent.available = np.ones(instance.n, dtype=bool)
        agent._enter(int(node))
        return agent

    @classmethod
    def random_start(cls, instance: Instance, rng, sensitivity: float = 0.0) -> "AgentState":
        cluster = instance.clusters[int(rng.random() * instance.p)]
        node = cluster[int(rng.random() * len(cluster))]
        return cls.at(instance, node, sensitivity)

    def _enter(self, node: int) -> None:
        k = int(self.instance.cluster_of[node])
        self.visited_clusters.add(k)
        self.available[self.instance.cluster_nodes[k]] = False
        self.partial_tour.append(node)
        self.current_node = node

    def move(self, node: int) -> None:
        if not self.available[node]:
            raise ValueError(f"node {node} lies in an already visited cluster")
        self._enter(int(node))

    def candidates(self) -> np.ndarray:
        return self.available.nonzero()[0]

    @property
    def done(self) -> bool:
        return len(self.partial_tour) == self.instance.p


def _weights(agent: AgentState, pheromone: PheromoneMatrix, bias=None):
    cand = agent.candidates()
    if cand.size == 0:
        raise RuntimeError("no unvisited cluster left to move to")
    w = pheromone.weights[agent.current_node, cand]
    if bias is not None:
        mask, factor = bias
        w = np.where(mask[agent.current_node, cand], w * factor, w)
    return cand, w


def transition_probabilities(agent: AgentState, pheromone: PheromoneMatrix, params=None, bias=None):
    """Candidate nodes and their selection probabilities, proportional to tau * eta**beta.

    ``params`` is accepted for signature parity; beta is already folded into
    ``pheromone.heuristic``.
    """
    cand, w = _weights(agent, pheromone, bias)
    total = w.sum()
    if not np.isfinite(total) or total <= 0:
        probs = _degenerate(w)
    else:
        probs = w / total
    return cand, probs


def _degenerate(w: np.ndarray) -> np.ndarray:
    # overflowed weights: share mass among infinite entries; all-zero: uniform
    inf = np.isinf(w)
    base = inf if inf.any() else np.ones_like(w, dtype=bool)
    return base / base.sum()


def choose_next_node(agent: AgentState, pheromone: PheromoneMatrix, q0: float, rng, bias=None, exploit: bool | None = None) -> int:
    """Pseudo-random proportional rule.

    With ``q ~ U[0, 1)``: ``q > q0`` samples from the transition
    probabilities, otherwise the node maximising tau * eta**beta is taken
    (lowest id on ties).  ``exploit`` forces one branch without drawing ``q``.
    """
    cand, w = _weights(agent, pheromone, bias)
    if exploit is None:
        exploit = not rng.random() > q0
    if exploit:
        return int(cand[w.argmax()])
    cum = w.cumsum()
    total = cum[-1]
    if not np.isfinite(total) or total <= 0:
        probs = _degenerate(w)
        return int(cand[rng.choice(len(cand), p=probs)])
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return int(cand[min(idx, len(cand) - 1)])


def construct_tour(
    agent: AgentState,
    instance: Instance,
    pheromone: PheromoneMatrix,
    q0: float,
    rng,
    local_rule: LocalRule | None,
    bias=None,
    exploit: bool | None = None,
    on_move: Callable[[int, int], None] | None = None,
) -> Tour:
    """Extend ``agent`` to a full tour, applying ``local_rule`` to each traversed
    edge right after the move and finally to the closing edge."""
    while not agent.done:
        i = agent.current_node
        j = choose_next_node(agent, pheromone, q0, rng, bias=bias, exploit=exploit)
        agent.move(j)
        if local_rule is not None:
            pheromone.apply(i, j, local_rule)
        if on_move is not None:
            on_move(i, j)
    first, last = agent.partial_tour[0], agent.current_node
    if first != last:
        if local_rule is not None:
            pheromone.apply(last, first, local_rule)
        if on_move is not None:
            on_move(last, first)
    nodes = tuple(agent.partial_tour)
    return Tour(nodes, _cycle_cost(instance.costs, nodes))
