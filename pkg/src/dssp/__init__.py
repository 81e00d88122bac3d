"""Minimum-cost protection policies for secrets split across distributed agents."""

from .model import (
    NO_SOLUTION,
    Agent,
    Automaton,
    ControlPolicy,
    CostModel,
    GlobalSecret,
    ProtectionPolicy,
    SecurityRequirement,
    Solution,
    SystemModel,
    Violation,
    effective_controllable,
    validate_system,
)
from .modelio import parse_model, serialize_model, serialize_solution
from .oracle import INFINITE, is_solvable, oracle_min_level, verify_policy
from .synthesis import drcmc, mrcmc, rcmc

__version__ = "0.1.0"

__all__ = [
    "NO_SOLUTION",
    "INFINITE",
    "Agent",
    "Automaton",
    "ControlPolicy",
    "CostModel",
    "GlobalSecret",
    "ProtectionPolicy",
    "SecurityRequirement",
    "Solution",
    "SystemModel",
    "Violation",
    "drcmc",
    "effective_controllable",
    "is_solvable",
    "mrcmc",
    "oracle_min_level",
    "parse_model",
    "rcmc",
    "serialize_model",
    "serialize_solution",
    "validate_system",
    "verify_policy",
]


def example_path(name: str = "two_servers"):
    """Path of a bundled model file."""
    from importlib.resources import files

    return files(__name__) / "data" / f"{name}.dssp"
