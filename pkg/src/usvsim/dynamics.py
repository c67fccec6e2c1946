"""Three degree-of-freedom planar equations of motion.

State is split into an earth-fixed pose eta = (x north, y east, psi) and a
body-fixed velocity nu = (u surge, v sway, r yaw rate).  The body z-axis
points down, so a positive yaw rate swings the bow to starboard and the
port hull runs faster than the starboard hull in a turn.

The force balance is

    M nu_dot + C(nu) nu + D(nu) nu = tau + hull drag split + tow drag

with rigid-body plus added-mass inertia M, Coriolis/centripetal matrix C,
and linear plus quadratic sway/yaw damping D.  Surge drag is not taken from
D inside the equations of motion: it is evaluated per hull at the hull's own
through-water speed, which yields both the total resistive force and a yaw
moment whenever the hulls travel at different speeds.  All drag opposes
motion (the fitted surge pair is read as a resistive magnitude).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .params import (
    SURGE_ADDED_MASS_FRACTION,
    DisplacementCondition,
    HydroCoefficients,
    VesselGeometry,
    derive_coefficients,
)

__all__ = [
    "SimState",
    "GeneralizedForce",
    "ModelOptions",
    "PlantModel",
    "SimulationError",
    "wrap_angle",
    "kinematic_transform",
    "mass_matrix",
    "coriolis_matrix",
    "damping_matrix",
    "surge_drag",
    "hull_drag_split",
    "state_derivative",
    "kinetic_energy",
]


class SimulationError(RuntimeError):
    """Numerical failure while evaluating or integrating the dynamics."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = (angle + math.pi) % math.tau - math.pi
    if wrapped == -math.pi:
        wrapped = math.pi
    return wrapped


@dataclass(frozen=True)
class SimState:
    """Simulation state: time, earth-fixed pose, body-fixed velocity."""

    t: float = 0.0
    x: float = 0.0
    y: float = 0.0
    psi: float = 0.0
    u: float = 0.0
    v: float = 0.0
    r: float = 0.0

    def __post_init__(self) -> None:
        for name in ("t", "x", "y", "psi", "u", "v", "r"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"state component {name} must be finite")

    @property
    def pose(self) -> np.ndarray:
        return np.array([self.x, self.y, self.psi])

    @property
    def velocity(self) -> np.ndarray:
        return np.array([self.u, self.v, self.r])


@dataclass(frozen=True)
class GeneralizedForce:
    """Body-frame surge force, sway force, and yaw moment.

    The vehicle has no sway actuation, so tau_y must stay zero.
    """

    tau_x: float = 0.0
    tau_y: float = 0.0
    tau_z: float = 0.0

    def __post_init__(self) -> None:
        if self.tau_y != 0.0:
            raise ValueError("tau_y must be zero: the vehicle cannot actuate sway")

    def as_array(self) -> np.ndarray:
        return np.array([self.tau_x, self.tau_y, self.tau_z])


@dataclass(frozen=True)
class ModelOptions:
    """Switches for the ambiguous corners of the plant model.

    ``mirror_hull_offsets`` flips which hull speeds up under positive yaw;
    the default assignment is the dissipative one (drag moment opposes the
    turn).  ``switching_added_mass`` selects a larger surge added mass while
    decelerating than while accelerating; off by default since a single
    coefficient is conventional.
    """

    surge_added_mass_fraction: float = SURGE_ADDED_MASS_FRACTION
    switching_added_mass: bool = False
    accel_added_mass_fraction: float | None = None  # None -> surge fraction
    decel_added_mass_fraction: float = 0.30
    mirror_hull_offsets: bool = False


@dataclass(frozen=True)
class PlantModel:
    """Everything the integrator needs to evaluate the true plant."""

    geometry: VesselGeometry = field(default_factory=VesselGeometry)
    condition: DisplacementCondition = None  # type: ignore[assignment]
    options: ModelOptions = field(default_factory=ModelOptions)
    tow_drag_coeff: float = 0.0  # quadratic tow drag [N/(m/s)^2], always >= 0

    def __post_init__(self) -> None:
        if self.condition is None:
            raise ValueError("PlantModel requires a displacement condition")
        if self.tow_drag_coeff < 0.0:
            raise ValueError("tow drag coefficient must be non-negative")

    @property
    def mass(self) -> float:
        return self.condition.mass

    @property
    def yaw_inertia(self) -> float:
        return self.geometry.yaw_inertia_for(self.condition.mass)

    def coefficients(self, nu: tuple[float, float, float] = (0.0, 0.0, 0.0)) -> HydroCoefficients:
        return derive_coefficients(
            self.geometry, self.condition, nu, self.options.surge_added_mass_fraction
        )


def kinematic_transform(psi: float) -> np.ndarray:
    """Body-to-earth rotation for the planar pose rates (orthogonal, det 1)."""
    if not math.isfinite(psi):
        raise ValueError("heading must be finite")
    c, s = math.cos(psi), math.sin(psi)
    return np.array([
        [c, -s, 0.0],
        [s, c, 0.0],
        [0.0, 0.0, 1.0],
    ])


def mass_matrix(coeffs: HydroCoefficients, mass: float, yaw_inertia: float) -> np.ndarray:
    """Rigid-body plus added-mass inertia with the origin at the CG.

    The sway/yaw added-mass couplings y_rdot and n_vdot are tuned
    independently, so M is not symmetric in general; positive definiteness
    is checked through the symmetric part (x^T M x > 0 for all x != 0).
    """
    m = np.array([
        [mass - coeffs.x_udot, 0.0, 0.0],
        [0.0, mass - coeffs.y_vdot, -coeffs.y_rdot],
        [0.0, -coeffs.n_vdot, yaw_inertia - coeffs.n_rdot],
    ])
    sym_eigs = np.linalg.eigvalsh(0.5 * (m + m.T))
    if sym_eigs.min() <= 0.0:
        raise SimulationError(
            f"inertia matrix is not positive definite (symmetric-part eigenvalues {sym_eigs})"
        )
    return m


def coriolis_matrix(coeffs: HydroCoefficients, nu: tuple[float, float, float], mass: float) -> np.ndarray:
    """Rigid-body plus added-mass Coriolis/centripetal matrix (skew-symmetric).

    The added-mass contribution to the surge/yaw corners carries a 1/200
    attenuation; without it the model cannot pull out of an established turn.
    The attenuation scales a (+,-) pair, so skew-symmetry is preserved.
    """
    u, v, r = nu
    c13 = -mass * v + (coeffs.y_vdot * v + 0.5 * (coeffs.y_rdot + coeffs.n_vdot) * r) / 200.0
    c23 = mass * u - coeffs.x_udot * u
    return np.array([
        [0.0, 0.0, c13],
        [0.0, 0.0, c23],
        [-c13, -c23, 0.0],
    ])


def _capped_drag_magnitude(x_u: float, x_uu: float, cap: float, speed: float) -> float:
    """Resistive surge-drag magnitude at a non-negative speed [N]."""
    if speed <= cap:
        return x_u * speed + x_uu * speed * speed
    return x_u * cap + x_uu * cap * cap + x_u * (speed - cap)


def surge_drag(condition: DisplacementCondition, u: float) -> float:
    """Signed resistive surge force [N]; odd in u so drag always opposes motion.

    Positive for forward motion.  The returned value is subtracted from the
    surge force balance in the equations of motion.
    """
    magnitude = _capped_drag_magnitude(
        condition.x_u, condition.x_uu, condition.drag_cap_speed, abs(u)
    )
    return math.copysign(magnitude, u) if u != 0.0 else 0.0


def damping_matrix(coeffs: HydroCoefficients, nu: tuple[float, float, float]) -> np.ndarray:
    """Linear plus quadratic damping matrix.

    Sway/yaw entries are the negated SNAME coefficients; the surge entry
    follows the resistive-magnitude convention so that D[0,0]*u equals the
    capped drag curve (positive damping).
    """
    u, v, r = nu
    av, ar, au = abs(v), abs(r), abs(u)
    if au > 0.0:
        d_surge = _capped_drag_magnitude(coeffs.x_u, coeffs.x_uu, coeffs.drag_cap_speed, au) / au
    else:
        d_surge = coeffs.x_u
    return np.array([
        [d_surge, 0.0, 0.0],
        [0.0, -coeffs.y_v - coeffs.y_vv * av - coeffs.y_vr * ar,
         -coeffs.y_r - coeffs.y_rv * av - coeffs.y_rr * ar],
        [0.0, -coeffs.n_v - coeffs.n_vv * av - coeffs.n_vr * ar,
         -coeffs.n_r - coeffs.n_rv * av - coeffs.n_rr * ar],
    ])


def hull_drag_split(
    condition: DisplacementCondition,
    nu: tuple[float, float, float],
    geometry: VesselGeometry,
    mirror_offsets: bool = False,
) -> tuple[float, float, float]:
    """Per-hull surge drag and the resulting yaw moment.

    Each hull sits half the hull separation off the centerline and sees its
    own through-water speed u - r*y_hull, so it carries half the drag curve
    evaluated at that speed.  Returns (drag_port, drag_stbd, yaw_moment)
    with drags in N (positive resists forward motion) and the moment in N m
    applied to the yaw balance.  With the default offsets (port at negative
    y) the moment opposes the turn; ``mirror_offsets`` swaps the speed
    assignment while keeping the (stbd - port) moment form, reproducing the
    anti-damped reading of the convention.
    """
    u, _, r = nu
    half_sep = 0.5 * geometry.hull_separation
    y_port, y_stbd = (-half_sep, half_sep)
    if mirror_offsets:
        y_port, y_stbd = (half_sep, -half_sep)
    u_port = u - r * y_port
    u_stbd = u - r * y_stbd
    drag_port = 0.5 * surge_drag(condition, u_port)
    drag_stbd = 0.5 * surge_drag(condition, u_stbd)
    yaw_moment = (drag_stbd - drag_port) * half_sep
    return drag_port, drag_stbd, yaw_moment


@lru_cache(maxsize=256)
def _inertia_terms(plant: PlantModel) -> tuple[float, np.ndarray, np.ndarray]:
    """Cached (surge inertia, full M, inverse of the sway/yaw block)."""
    coeffs = plant.coefficients()
    m_mat = mass_matrix(coeffs, plant.mass, plant.yaw_inertia)
    block = m_mat[1:, 1:]
    return m_mat[0, 0], m_mat, np.linalg.inv(block)


def state_derivative(
    state: SimState,
    tau: GeneralizedForce,
    plant: PlantModel,
    extra_surge_force: float = 0.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Pose rate and body acceleration for the full plant.

    ``extra_surge_force`` carries transient disturbances (e.g. a release
    impulse) that act along the body x-axis but are not thrust.
    """
    nu = (state.u, state.v, state.r)
    coeffs = plant.coefficients(nu)
    surge_inertia, _, block_inv = _inertia_terms(plant)

    c = coriolis_matrix(coeffs, nu, plant.mass)
    d = damping_matrix(coeffs, nu)
    d[0, 0] = 0.0  # surge drag enters through the per-hull split below

    nu_vec = np.array(nu)
    force = tau.as_array() - c @ nu_vec - d @ nu_vec
    drag_port, drag_stbd, drag_moment = hull_drag_split(
        plant.condition, nu, plant.geometry, plant.options.mirror_hull_offsets
    )
    force[0] += extra_surge_force - (drag_port + drag_stbd)
    force[2] += drag_moment
    if plant.tow_drag_coeff > 0.0:
        force[0] -= plant.tow_drag_coeff * state.u * abs(state.u)

    if plant.options.switching_added_mass:
        accel_frac = plant.options.accel_added_mass_fraction
        if accel_frac is None:
            accel_frac = plant.options.surge_added_mass_fraction
        frac = accel_frac if force[0] >= 0.0 else plant.options.decel_added_mass_fraction
        surge_inertia = plant.mass * (1.0 + frac)

    u_dot = force[0] / surge_inertia
    v_dot, r_dot = block_inv @ force[1:]
    nu_dot = np.array([u_dot, v_dot, r_dot])
    eta_dot = kinematic_transform(state.psi) @ nu_vec

    if not (np.isfinite(nu_dot).all() and np.isfinite(eta_dot).all()):
        raise SimulationError(
            f"non-finite derivative at t={state.t:.3f}s, state={state}"
        )
    return eta_dot, nu_dot


def kinetic_energy(plant: PlantModel, nu: tuple[float, float, float]) -> float:
    """Kinetic energy 0.5 * nu^T M nu [J] (uses the symmetric part of M)."""
    _, m_mat, _ = _inertia_terms(plant)
    nu_vec = np.array(nu)
    return 0.5 * float(nu_vec @ m_mat @ nu_vec)
