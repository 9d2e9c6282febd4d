"""Agent-based colony heuristics for the equality generalized TSP."""

from .errors import CapacityError, ConfigError, DomainError, GTSPError, InputError, ParseError
from .model import Instance, Tour, is_valid_tour, make_tour, tour_cost, validate_tour

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "DomainError",
    "GTSPError",
    "InputError",
    "Instance",
    "ParseError",
    "Tour",
    "is_valid_tour",
    "make_tour",
    "tour_cost",
    "validate_tour",
]
