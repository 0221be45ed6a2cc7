"""Hyperdimensional contextual bandits with low-precision probabilistic updates."""

from .agents import (
    TABLE_AGENTS,
    AgentSpec,
    HDBin,
    HDProb,
    HDReal,
    LinEPS,
    agent_memory_bits,
    update_probability,
)
from .encoding import ContextEncoder, RewardEncoder
from .env import SyntheticEnv
from .harness import (
    ConfigError,
    ExperimentConfig,
    evaluate,
    grid_search_epsilon,
    memory_table,
    run_agent,
    run_episode,
    run_experiment,
    sweep,
)
from .hypervec import BipolarHV, DimensionMismatchError, SatIntHV, UpdateMask
from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = [
    "AgentSpec", "BACKEND", "BipolarHV", "ConfigError", "ContextEncoder",
    "DimensionMismatchError", "ExperimentConfig", "HDBin", "HDProb", "HDReal",
    "LinEPS", "RewardEncoder", "SatIntHV", "SyntheticEnv", "TABLE_AGENTS",
    "UpdateMask", "agent_memory_bits", "evaluate", "grid_search_epsilon",
    "memory_table", "run_agent", "run_episode", "run_experiment", "sweep", "update_probability",
]
