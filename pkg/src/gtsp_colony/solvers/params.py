from __future__ import annotations

from dataclasses import asdict, dataclass, replace

from ..errors import InputError

ALGORITHMS = ("ACS", "RACS", "SACS", "SRM", "SSAS")


@dataclass(frozen=True)
class SolverParams:
    """Tunables shared by all colony strategies.

    Defaults reproduce the published experimental setting: beta=5, rho=0.5,
    q0=0.5, ten agents, s0=0.5 and a pheromone sensitivity of 0.01.
    """

    beta: float = 5.0
    rho: float = 0.5
    q0: float = 0.5
    s0: float = 0.5
    m: int = 10
    psl: float = 0.01
    psl_levels: tuple[float, ...] | None = None  # per-agent override of psl
    max_iterations: int = 1000
    time_limit: float | None = None
    seed: int = 0
    # SSAS: weight multiplier for edges announced by hPSL agents, scaled by 1/(1+psl)
    message_boost: float = 2.0
    # SSAS: iterations an edge report stays in the knowledge base
    kb_memory: int = 5
    # SRM: draw the team-selecting q per construction "step" or once per "tour"
    srm_draw: str = "step"
    zero_cost_visibility: float = 1e9

    def validate(self) -> "SolverParams":
        if not 0 < self.rho < 1:
            raise InputError(f"rho must lie in (0, 1), got {self.rho}")
        for name in ("q0", "s0", "psl"):
            v = getattr(self, name)
            if not 0 <= v <= 1:
                raise InputError(f"{name} must lie in [0, 1], got {v}")
        if self.beta < 0:
            raise InputError(f"beta must be >= 0, got {self.beta}")
        if self.m < 1:
            raise InputError(f"need at least one agent, got m={self.m}")
        if self.max_iterations < 1:
            raise InputError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise InputError(f"time_limit must be positive, got {self.time_limit}")
        if self.psl_levels is not None:
            if len(self.psl_levels) != self.m:
                raise InputError(f"psl_levels needs {self.m} values, got {len(self.psl_levels)}")
            if any(not 0 <= v <= 1 for v in self.psl_levels):
                raise InputError("psl_levels must lie in [0, 1]")
        if self.message_boost <= 0:
            raise InputError("message_boost must be positive")
        if self.kb_memory < 0:
            raise InputError("kb_memory must be >= 0")
        if self.srm_draw not in ("step", "tour"):
            raise InputError(f"srm_draw must be 'step' or 'tour', got {self.srm_draw!r}")
        if self.zero_cost_visibility <= 0:
            raise InputError("zero_cost_visibility must be positive")
        return self

    def with_(self, **changes) -> "SolverParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return asdict(self)
