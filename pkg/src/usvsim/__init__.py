"""Deterministic maneuvering simulator and low-level control library for a
twin-hull, waterjet-propelled unmanned surface vehicle."""

from .version import __version__
from .params import (
    FULL,
    LIGHTSHIP,
    SLICK,
    STANDARD_CONDITIONS,
    DisplacementCondition,
    HydroCoefficients,
    VesselGeometry,
    condition_draft,
    derive_coefficients,
    standard_condition,
)
from .dynamics import (
    GeneralizedForce,
    ModelOptions,
    PlantModel,
    SimState,
    SimulationError,
    coriolis_matrix,
    damping_matrix,
    hull_drag_split,
    kinematic_transform,
    kinetic_energy,
    mass_matrix,
    state_derivative,
    surge_drag,
    wrap_angle,
)
from .propulsion import (
    Allocation,
    ThrusterModel,
    allocate,
    bollard_thrust,
    calibrate_thrust_decay,
    calibrated_pump_model,
    combine,
    jet_thrust,
    pump_analog_thrust,
    thrust_to_command,
)
from .control import (
    AdaptiveBacksteppingController,
    AdaptiveState,
    BacksteppingController,
    ControlModel,
    ControllerGains,
    Setpoint,
    abs_surge,
    bs_heading,
    bs_surge,
    heading_error,
    initial_adaptive_state,
    lyapunov_diagnostics,
    reference_model_step,
    shape_desired_accel,
)
from .sim import (
    BUILTIN_SCENARIOS,
    CommandChange,
    Impulse,
    MassDrop,
    NoiseSpec,
    ScenarioSpec,
    SetpointPhase,
    TowAttach,
    ValidationError,
    builtin_scenario,
    integrate_step,
    run_scenario,
    scenario_acceleration,
    scenario_setpoint,
    scenario_variable_drag,
    scenario_variable_mass,
    scenario_variable_mass_drag,
    scenario_zigzag,
    validate_spec,
)
from .analysis import (
    ComparisonReport,
    DragFit,
    SteadyWindow,
    TowDragFit,
    compare_controllers,
    detect_steady_state,
    fit_drag_quadratic,
    fit_tow_drag,
    lambda_compare,
    phase_metrics,
    steady_errors,
)
from .runlog import RunLog
