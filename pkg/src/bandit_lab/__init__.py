"""Simulation and experiment harness for multi-armed bandits with bounded arm memory."""
from .core import Instance, RunOutcome, SeedSpec, epsilon_best
from .harness import ExperimentPlan, TrialSummary, monte_carlo
from .instances import DistSpec, InstanceSpec
from .stream import StreamOrder, StreamSession, begin_session

__all__ = ["Instance", "RunOutcome", "SeedSpec", "epsilon_best", "ExperimentPlan",
           "TrialSummary", "monte_carlo", "DistSpec", "InstanceSpec", "StreamOrder",
           "StreamSession", "begin_session"]
__version__ = "0.1.0"
