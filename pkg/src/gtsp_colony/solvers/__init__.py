from .colony import KnowledgeBase, SolveResult, run, split_population
from .construction import (
    AgentState,
    choose_next_node,
    construct_tour,
    heuristic_matrix,
    transition_probabilities,
    visibility,
    visibility_matrix,
)
from .params import ALGORITHMS, SolverParams
from .pheromone import (
    PheromoneMatrix,
    clamp_pheromone,
    global_rule,
    global_rule_srm,
    global_update,
    global_update_srm,
    initial_levels,
    local_update_acs,
    local_update_racs,
    local_update_sacs,
    local_update_srm,
)

__all__ = [
    "ALGORITHMS",
    "AgentState",
    "KnowledgeBase",
    "PheromoneMatrix",
    "SolveResult",
    "SolverParams",
    "choose_next_node",
    "clamp_pheromone",
    "construct_tour",
    "global_rule",
    "global_rule_srm",
    "global_update",
    "global_update_srm",
    "heuristic_matrix",
    "initial_levels",
    "local_update_acs",
    "local_update_racs",
    "local_update_sacs",
    "local_update_srm",
    "run",
    "split_population",
    "transition_probabilities",
    "visibility",
    "visibility_matrix",
]
