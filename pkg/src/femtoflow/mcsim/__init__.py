"""Monte-Carlo validators for the analytical model."""

from ._stats import SimConfig, SimEstimate, agrees
from .capacity import CapacitySimResult, simulate_capacity
from .chain import ChainSimResult, simulate_chain
from .system import simulate_system

__all__ = [
    "CapacitySimResult",
    "ChainSimResult",
    "SimConfig",
    "SimEstimate",
    "agrees",
    "simulate_capacity",
    "simulate_chain",
    "simulate_system",
]
