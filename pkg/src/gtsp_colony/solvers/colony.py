"""Iteration loops for the five colony strategies.

All strategies share initialisation (nearest-neighbour tour from a random
start fixes tau0, tau_max and the first best tour), sequential per-agent
construction with immediate local updates, and an elitist global update on
the best tour found so far.
"""

from __future__ import annotations

import math
import time
from collections import deque
from dataclasses import dataclass, field
from functools import partial
from typing import Callable

import numpy as np

from ..errors import InputError
from ..model import Instance, Tour
from ..oracle import nearest_neighbor
from .construction import AgentState, construct_tour, heuristic_matrix
from .params import ALGORITHMS, SolverParams
from .pheromone import (
    PheromoneMatrix,
    clamp_pheromone,
    global_update,
    global_update_srm,
    initial_levels,
    local_update_acs,
    local_update_racs,
    local_update_sacs,
    local_update_srm,
)


@dataclass
class SolveResult:
    algorithm: str
    best_tour: Tour
    best_cost: float
    iterations_used: int
    wall_time: float
    cost_trace: list[float]
    initial_cost: float


@dataclass
class KnowledgeBase:
    """Edge announcements exchanged between SSAS agents.

    ``message_queue`` holds the current iteration's announcements; on
    :meth:`archive` they move into ``edge_reports`` where they stay for
    ``memory`` iterations.
    """

    n: int
    memory: int = 5
    edge_reports: deque = field(default_factory=deque)
    message_queue: list = field(default_factory=list)

    def send(self, edge: tuple[int, int], agent: int, iteration: int) -> None:
        i, j = edge
        if not (0 <= i < self.n and 0 <= j < self.n) or i == j:
            raise ValueError(f"edge {edge} is not an edge of the instance graph")
        self.message_queue.append(((min(i, j), max(i, j)), agent, iteration))

    def archive(self, iteration: int) -> None:
        self.edge_reports.extend(self.message_queue)
        self.message_queue = []
        while self.edge_reports and self.edge_reports[0][2] <= iteration - self.memory:
            self.edge_reports.popleft()

    def edge_mask(self) -> np.ndarray:
        mask = np.zeros((self.n, self.n), dtype=bool)
        for (i, j), _, _ in (*self.edge_reports, *self.message_queue):
            mask[i, j] = mask[j, i] = True
        return mask


def split_population(m: int) -> tuple[int, int]:
    """Agents in the first and second role group (first group gets the odd one)."""
    first = (m + 1) // 2
    return first, m - first


class _Run:
    def __init__(self, algorithm: str, instance: Instance, params: SolverParams, rng):
        self.algorithm = algorithm
        self.instance = instance
        self.params = params
        self.rng = rng
        self.n = instance.n

        start = int(rng.integers(instance.n))
        greedy = nearest_neighbor(instance, start)
        self.l_nn = greedy.cost
        self.best = greedy
        self.pheromone = None
        if self.l_nn > 0:
            tau0, tau_max = initial_levels(self.n, self.l_nn, params.rho)
            heur = heuristic_matrix(instance, params.beta, params.zero_cost_visibility)
            self.pheromone = PheromoneMatrix(self.n, tau0, tau_max, heur)

        if algorithm == "SACS":
            n_s, n_h = split_population(params.m)
            s0 = params.s0
            self.sensitivity = [float(rng.uniform(0.0, s0)) for _ in range(n_s)] + [
                float(rng.uniform(s0, 1.0)) for _ in range(n_h)
            ]
        else:
            self.sensitivity = list(params.psl_levels or [params.psl] * params.m)
        if algorithm == "SSAS":
            self.kb = KnowledgeBase(self.n, params.kb_memory)

    def offer(self, tour: Tour) -> None:
        if tour.cost < self.best.cost:
            self.best = tour

    def build(self, k: int, rule, **kw) -> Tour:
        agent = AgentState.random_start(self.instance, self.rng, self.sensitivity[k])
        tour = construct_tour(
            agent, self.instance, self.pheromone, self.params.q0, self.rng, rule, **kw
        )
        self.offer(tour)
        return tour

    # each rule reads the current best cost at call time
    def _acs_rule(self, tau):
        return local_update_acs(tau, self.params.rho, self.pheromone.tau0)

    def _racs_rule(self, tau):
        return local_update_racs(tau, self.params.rho, self.best.cost, self.n)

    def _srm_rule(self, tau):
        return local_update_srm(tau, self.params.q0, self.pheromone.tau0)

    def iterate(self, t: int) -> None:
        p = self.params
        m = p.m
        if self.algorithm == "ACS":
            for k in range(m):
                self.build(k, self._acs_rule)
            global_update(self.pheromone, self.best.nodes, self.best.cost, p.rho)
        elif self.algorithm == "RACS":
            for k in range(m):
                self.build(k, self._racs_rule)
            global_update(self.pheromone, self.best.nodes, self.best.cost, p.rho)
            clamp_pheromone(self.pheromone)
        elif self.algorithm == "SACS":
            # sPSL ants occupy the first slots, hPSL ants the rest
            tau0 = self.pheromone.tau0
            for k in range(m):
                rule = partial(local_update_sacs, s=self.sensitivity[k], tau0=tau0, n=self.n)
                self.build(k, rule)
            global_update(self.pheromone, self.best.nodes, self.best.cost, p.rho)
        elif self.algorithm == "SRM":
            for k in range(m):
                exploit = None
                if p.srm_draw == "tour":
                    exploit = not self.rng.random() > p.q0
                self.build(k, self._srm_rule, exploit=exploit)
            global_update_srm(self.pheromone, self.best.nodes, self.best.cost, p.q0)
        elif self.algorithm == "SSAS":
            n_h, _ = split_population(m)
            for k in range(n_h):
                self.build(k, self._racs_rule, on_move=partial(self._announce, k, t))
            mask = self.kb.edge_mask()
            for k in range(n_h, m):
                factor = p.message_boost / (1.0 + self.sensitivity[k])
                self.build(k, self._racs_rule, bias=(mask, factor))
            self.kb.archive(t)
            global_update(self.pheromone, self.best.nodes, self.best.cost, p.rho)
        else:  # pragma: no cover - guarded in run()
            raise InputError(f"unknown algorithm {self.algorithm}")

    def _announce(self, agent: int, t: int, i: int, j: int) -> None:
        self.kb.send((i, j), agent, t)


def run(
    algorithm: str,
    instance: Instance,
    params: SolverParams | None = None,
    rng=None,
    callback: Callable[[int, PheromoneMatrix, Tour], None] | None = None,
) -> SolveResult:
    """Run one colony strategy until the iteration or time budget is spent.

    ``rng`` defaults to ``numpy.random.default_rng(params.seed)``.
    ``callback(iteration, pheromone, best_tour)`` is invoked after every
    iteration's global update.
    """
    name = algorithm.upper()
    if name not in ALGORITHMS:
        raise InputError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    params = (params or SolverParams()).validate()
    if params.psl_levels is not None and name == "SACS":
        raise InputError("SACS draws its own sensitivities; psl_levels is not supported")
    if rng is None:
        rng = np.random.default_rng(params.seed)

    t_start = time.perf_counter()
    state = _Run(name, instance, params, rng)
    initial = state.best.cost
    trace: list[float] = []
    iterations = 0
    deadline = math.inf if params.time_limit is None else t_start + params.time_limit
    # a zero-cost tour cannot be improved and leaves tau0 undefined
    while state.best.cost > 0 and iterations < params.max_iterations:
        if time.perf_counter() >= deadline:
            break
        state.iterate(iterations)
        iterations += 1
        trace.append(state.best.cost)
        if callback is not None:
            callback(iterations, state.pheromone, state.best)
    return SolveResult(
        algorithm=name,
        best_tour=state.best,
        best_cost=state.best.cost,
        iterations_used=iterations,
        wall_time=time.perf_counter() - t_start,
        cost_trace=trace,
        initial_cost=initial,
    )
