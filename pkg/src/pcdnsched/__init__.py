"""Joint playback ordering and delivery-node scheduling for peer-assisted CDNs.

The optimal solver (:mod:`pcdnsched.mmec`) routes every video request
through a min-cost flow over unit-capacity node replicas, then turns the
flow into per-slot playlists by bipartite edge coloring.  Baselines,
a scenario generator, an exhaustive oracle and a CLI harness live in
their own modules.
"""

from .kernels import DEFAULT_BACKEND, available_backends
from .model import (
    CostBreakdown,
    NodeSpec,
    Scenario,
    Schedule,
    evaluate_cost,
    validate_scenario,
    validate_schedule,
)
from .scengen import GenConfig, generate

__version__ = "0.1.0"

__all__ = [
    "CostBreakdown",
    "DEFAULT_BACKEND",
    "GenConfig",
    "NodeSpec",
    "Scenario",
    "Schedule",
    "available_backends",
    "evaluate_cost",
    "generate",
    "validate_scenario",
    "validate_schedule",
    "__version__",
]
