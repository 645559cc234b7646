"""Version-space learning of ground STRIPS action models.

Learns the full set of preconditions and effects consistent with positive and
failed demonstrations, then reads off an optimal sound deterministic model and
an optimal complete non-deterministic model from the boundaries.
"""

from .core import (
    Demonstration,
    FluentUniverse,
    GroundAction,
    GroundModel,
    Literal,
    complement,
    enumerate_transitions,
    holds,
    successor,
    transition_member,
)
from .kernels import BACKEND

__version__ = "0.1.0"
