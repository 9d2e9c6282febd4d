"""Pheromone trail state and the local/global update rules.

The scalar rules operate on a single trail value so they can be tested in
isolation; :class:`PheromoneMatrix` applies them edge by edge and keeps the
combined transition weights ``tau * eta**beta`` in sync.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

LocalRule = Callable[[float], float]


class PheromoneMatrix:
    def __init__(self, n: int, tau0: float, tau_max: float, heuristic=None):
        if tau0 <= 0:
            raise ValueError(f"tau0 must be positive, got {tau0}")
        self.tau0 = float(tau0)
        self.tau_max = float(tau_max)
        self.tau = np.full((n, n), self.tau0)
        self.heuristic = np.ones((n, n)) if heuristic is None else np.asarray(heuristic, dtype=np.float64)
        self.weights = self.tau * self.heuristic

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    def set(self, i: int, j: int, value: float) -> None:
        self.tau[i, j] = self.tau[j, i] = value
        w = value * self.heuristic[i, j]
        self.weights[i, j] = self.weights[j, i] = w

    def apply(self, i: int, j: int, rule: LocalRule) -> float:
        value = rule(float(self.tau[i, j]))
        self.set(i, j, value)
        return value

    def edge_values(self, nodes: Sequence[int]) -> list[float]:
        k = len(nodes)
        return [float(self.tau[nodes[a], nodes[(a + 1) % k]]) for a in range(k)]

    def copy(self) -> "PheromoneMatrix":
        other = PheromoneMatrix.__new__(PheromoneMatrix)
        other.tau0, other.tau_max = self.tau0, self.tau_max
        other.tau = self.tau.copy()
        other.heuristic = self.heuristic
        other.weights = self.weights.copy()
        return other


def initial_levels(n: int, l_nn: float, rho: float) -> tuple[float, float]:
    """(tau0, tau_max) derived from the nearest-neighbour tour length."""
    return 1.0 / (n * l_nn), 1.0 / ((1.0 - rho) * l_nn)


# -- scalar rules --------------------------------------------------------------

def local_update_acs(tau: float, rho: float, tau0: float) -> float:
    return (1.0 - rho) * tau + rho * tau0


def local_update_racs(tau: float, rho: float, best_cost: float, n: int) -> float:
    if not best_cost > 0:
        raise ValueError("reinforcing local rule needs a positive best tour cost")
    return (1.0 - rho) * tau + rho / (n * best_cost)


def local_update_sacs(tau: float, s: float, tau0: float, n: int) -> float:
    # the deposited amount is tau0 (see README, "Model choices")
    return s * s * tau + (1.0 - s) ** 2 * tau0 / n


def local_update_srm(tau: float, q0: float, tau0: float) -> float:
    return q0 * q0 * tau + (1.0 - q0) ** 2 * tau0


def global_rule(tau: float, rho: float, best_cost: float) -> float:
    return (1.0 - rho) * tau + rho / best_cost


def global_rule_srm(tau: float, q0: float, best_cost: float) -> float:
    return q0 * q0 * tau + (1.0 - q0) ** 2 / best_cost


# -- matrix updates ------------------------------------------------------------

def _tour_edges(nodes: Sequence[int]):
    k = len(nodes)
    return [(int(nodes[a]), int(nodes[(a + 1) % k])) for a in range(k)]


def global_update(pheromone: PheromoneMatrix, best_nodes: Sequence[int], best_cost: float, rho: float) -> PheromoneMatrix:
    """Elitist update: only edges of the best tour move toward 1/best_cost."""
    for i, j in _tour_edges(best_nodes):
        pheromone.set(i, j, global_rule(float(pheromone.tau[i, j]), rho, best_cost))
    return pheromone


def global_update_srm(pheromone: PheromoneMatrix, best_nodes: Sequence[int], best_cost: float, q0: float) -> PheromoneMatrix:
    for i, j in _tour_edges(best_nodes):
        pheromone.set(i, j, global_rule_srm(float(pheromone.tau[i, j]), q0, best_cost))
    return pheromone


def clamp_pheromone(pheromone: PheromoneMatrix) -> int:
    """Reset every trail strictly above tau_max to tau0; returns how many were reset."""
    over = pheromone.tau > pheromone.tau_max
    count = int(over.sum())
    if count:
        pheromone.tau[over] = pheromone.tau0
        pheromone.weights[over] = pheromone.tau0 * pheromone.heuristic[over]
    return count
