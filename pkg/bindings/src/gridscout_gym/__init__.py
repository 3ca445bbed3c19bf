"""Gym-style bindings for the gridscout exploration engine."""

from gridscout_gym.adapter import (
    ENV_ID,
    DiscreteSpace,
    GridScoutEnv,
    GridSpace,
    make,
    register_with_gymnasium,
)

__all__ = [
    "ENV_ID",
    "DiscreteSpace",
    "GridScoutEnv",
    "GridSpace",
    "make",
    "register_with_gymnasium",
]
