"""Post-collision trajectory recovery for single-track vehicle models."""
from .control import (ForceParams, SteeringParams, cruise_force, steering,
                      tractive_force, window)
from .dynamics import (VX_FLOOR, ControlInput, Model, VehicleParams, VehicleState,
                       VxFloorError, lateral_subsystem_matrix, rhs_generalized,
                       rhs_reference)
from .scenario import (RecoveryMetrics, ScenarioSpec, Thresholds, case1, case2,
                       compute_metrics)
from .sim import SimConfig, Trace, simulate, step_rk4
from .tuner import ObjectiveWeights, TuneResult, TuneSpec, objective, tune

__version__ = "0.1.0"
