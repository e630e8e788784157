"""Seeded continuous-time Monte Carlo for the uniform-catastrophe growth models."""
from .config import Model, ModelKind, SimConfig, SimSummary
from .simulate import (
    estimate,
    sample_aggregate,
    sample_jumps,
    sample_offspring,
    sample_survivors,
    simulate_free,
    simulate_no_dispersion,
    simulate_tree,
    stream,
)

__all__ = [
    "Model", "ModelKind", "SimConfig", "SimSummary", "estimate", "sample_aggregate",
    "sample_jumps", "sample_offspring", "sample_survivors", "simulate_free",
    "simulate_no_dispersion", "simulate_tree", "stream",
]
