"""Time-varying graph mode decomposition.

Decomposes a multivariate time series, viewed as a signal on the nodes of
an unknown graph, into K band-limited oscillatory modes together with a
learned weighted connectivity graph per mode.
"""

__version__ = "0.1.0"

from .core import (
    DecompositionConfig,
    DecompositionResult,
    GraphMode,
    IterationSnapshot,
    TimeVaryingGraphSignal,
    objective_value,
    validate_config,
)
from .decomposer import decompose, decompose_mvmd
from .graph_learner import graph_objective, learn_graph
from .synth import GroundTruth, SynthSpec, generate, paper_preset

__all__ = [
    "DecompositionConfig",
    "DecompositionResult",
    "GraphMode",
    "GroundTruth",
    "IterationSnapshot",
    "SynthSpec",
    "TimeVaryingGraphSignal",
    "__version__",
    "decompose",
    "decompose_mvmd",
    "generate",
    "graph_objective",
    "learn_graph",
    "objective_value",
    "paper_preset",
    "validate_config",
]
