"""Vertical hopping on yielding ground: hybrid simulation and return-map analysis."""

from .model import (
    DimensionalSpec,
    EventKind,
    HopperState,
    HopRecord,
    HybridDomain,
    LegSpring,
    ModelParams,
    NondimResult,
    Scales,
    SpringMode,
    TransitionEvent,
    actuator_force,
    com_kinetic_energy,
    dimensionalize,
    ground_force,
    liftoff_loss,
    liftoff_reset,
    nondimensionalize,
    spring_update,
)
from .sim import SimConfig, SimulationError, Trajectory, simulate_hop, simulate_trajectory
from .massless import GaitAnalysis, MapCoefficients, NoGaitError, fixed_point, gait_metrics, map_eval

__all__ = [
    "DimensionalSpec", "EventKind", "HopperState", "HopRecord", "HybridDomain", "LegSpring",
    "ModelParams", "NondimResult", "Scales", "SpringMode", "TransitionEvent", "actuator_force",
    "com_kinetic_energy", "dimensionalize", "ground_force", "liftoff_loss", "liftoff_reset",
    "nondimensionalize", "spring_update", "SimConfig", "SimulationError", "Trajectory",
    "simulate_hop", "simulate_trajectory", "GaitAnalysis", "MapCoefficients", "NoGaitError",
    "fixed_point", "gait_metrics", "map_eval",
]

__version__ = "0.1.0"
