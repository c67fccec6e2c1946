"""Surge-speed and heading control laws.

Two controllers are provided:

* :class:`BacksteppingController` -- feedback-linearizing surge and heading
  laws with prescribed error dynamics.  With a perfect plant model and unit
  command scales the surge error obeys de/dt + k_u e = 0 and the heading
  error obeys e'' + k2 e' + k1 e = 0.
* :class:`AdaptiveBacksteppingController` -- the same heading law combined
  with a model-reference adaptive surge law.  A first-order reference model
  u_m' = -a_m u_m + b_m u_d defines the model error e_m = u - u_m, and three
  parameter estimates (linear drag, quadratic drag, command feedforward) are
  integrated so that the Lyapunov value of the error system is
  non-increasing; speed offsets caused by unknown drag or displacement are
  absorbed by the estimates instead of appearing as steady-state error.

Commanded surge force and yaw moment are scaled down (0.5 / 0.05 by
default) before allocation.  The scaling suppresses the motor chatter seen
on the physical drivers and acts like an extra saturation; the closed-loop
error-dynamics statements above hold for unit scales.  For the adaptive
Lyapunov bookkeeping the scale simply multiplies the effective estimates
and adaptation gain, see :func:`lyapunov_diagnostics`.

Controllers only assume a tuning condition (their model of the plant); the
true plant may differ, which is exactly the situation the adaptive law is
for.  Desired-yaw derivatives are never available, so the heading error
rate is the measured yaw rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

from .params import (
    SURGE_ADDED_MASS_FRACTION,
    DisplacementCondition,
    HydroCoefficients,
    VesselGeometry,
    derive_coefficients,
)
from .dynamics import surge_drag, wrap_angle

__all__ = [
    "ControllerGains",
    "Setpoint",
    "ControlModel",
    "AdaptiveState",
    "ControlOutput",
    "BacksteppingController",
    "AdaptiveBacksteppingController",
    "heading_error",
    "shape_desired_accel",
    "bs_surge",
    "bs_heading",
    "reference_model_step",
    "initial_adaptive_state",
    "abs_surge",
    "lyapunov_diagnostics",
    "YAW_SLOWDOWN_RATE",
]

# Decay rate of the desired-speed reduction with heading error; at ~23 deg
# of error the commanded speed is down to ~10% of the way from the turning
# speed back to the cruise setpoint.
YAW_SLOWDOWN_RATE = 5.73


@dataclass(frozen=True)
class ControllerGains:
    """Gain set shared by both controllers.

    Defaults are the field-proven set for this vehicle: k1=0.1, k2=1.0 give
    overdamped heading error dynamics, k_u=8.0 a fast surge error decay.
    ``gamma`` is the adaptation gain of the adaptive surge law.
    """

    k_u: float = 8.0          # surge error gain [1/s]
    k1: float = 0.1           # heading stiffness [1/s^2]
    k2: float = 1.0           # heading damping [1/s]
    k_a_max: float = 1.2      # approach-shaping gain [1/s]
    u_dot_a_max: float = 1.0  # acceleration bound for shaping [m/s^2]
    gamma: float = 0.05       # adaptation gain
    surge_scale: float = 0.5
    yaw_scale: float = 0.05

    def __post_init__(self) -> None:
        for name in ("k_u", "k1", "k2", "k_a_max", "u_dot_a_max", "gamma",
                     "surge_scale", "yaw_scale"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"gain {name} must be positive")


@dataclass(frozen=True)
class Setpoint:
    """Desired surge speed and heading.

    ``u_d_yaw`` is the reduced speed held while the heading error is large;
    ``None`` selects half the cruise setpoint.
    """

    u_d: float
    psi_d: float
    u_d_yaw: float | None = None

    def __post_init__(self) -> None:
        if self.u_d < 0.0:
            raise ValueError("desired surge speed must be non-negative")
        object.__setattr__(self, "psi_d", wrap_angle(self.psi_d))

    @property
    def turning_speed(self) -> float:
        return 0.5 * self.u_d if self.u_d_yaw is None else self.u_d_yaw


@dataclass(frozen=True)
class ControlModel:
    """The plant model a controller believes in (its tuning condition)."""

    geometry: VesselGeometry
    condition: DisplacementCondition
    surge_added_mass_fraction: float = SURGE_ADDED_MASS_FRACTION

    @cached_property
    def _base(self) -> HydroCoefficients:
        return derive_coefficients(
            self.geometry, self.condition, (0.0, 0.0, 0.0), self.surge_added_mass_fraction
        )

    @property
    def mass(self) -> float:
        return self.condition.mass

    @cached_property
    def surge_inertia(self) -> float:
        """m - x_udot: effective inertia against surge acceleration."""
        return self.mass - self._base.x_udot

    @cached_property
    def sway_inertia(self) -> float:
        return self.mass - self._base.y_vdot

    @cached_property
    def yaw_effective_inertia(self) -> float:
        return self.geometry.yaw_inertia_for(self.mass) - self._base.n_rdot

    @cached_property
    def added_mass_imbalance(self) -> float:
        """(-x_udot + y_vdot): surge/sway added-mass difference in the yaw law."""
        return -self._base.x_udot + self._base.y_vdot

    def drag_estimate(self, u: float) -> float:
        """Believed resistive surge force at speed u [N]."""
        return surge_drag(self.condition, u)

    def yaw_damping(self, u: float, v: float) -> float:
        """Believed linear yaw damping coefficient n_r at the given speeds."""
        coeffs = derive_coefficients(
            self.geometry, self.condition, (u, v, 0.0), self.surge_added_mass_fraction
        )
        return coeffs.n_r


def heading_error(psi: float, psi_d: float) -> float:
    """Heading error psi - psi_d wrapped to (-pi, pi]."""
    if not (math.isfinite(psi) and math.isfinite(psi_d)):
        raise ValueError("headings must be finite")
    return wrap_angle(psi - psi_d)


def shape_desired_accel(
    u: float,
    setpoint: Setpoint,
    e_psi: float,
    gains: ControllerGains,
) -> tuple[float, float]:
    """Desired-speed reference and shaped desired acceleration.

    The speed reference backs off toward the turning speed as the heading
    error grows (small turning radius beats speed while turning), and the
    desired acceleration approaches it through a tanh profile bounded by
    u_dot_a_max.
    """
    blended = setpoint.turning_speed + (setpoint.u_d - setpoint.turning_speed) * math.exp(
        -YAW_SLOWDOWN_RATE * abs(e_psi)
    )
    u_d_ref = min(blended, setpoint.u_d)
    u_dot_d = gains.u_dot_a_max * math.tanh(
        gains.k_a_max * (u_d_ref - u) / gains.u_dot_a_max
    )
    return u_d_ref, u_dot_d


def bs_surge(
    nu: tuple[float, float, float],
    u_dot_d: float,
    e_u: float,
    model: ControlModel,
    gains: ControllerGains,
) -> float:
    """Feedback-linearizing surge force command [N].

    Cancels the believed drag and sway/yaw coupling and imposes the
    linearizing acceleration u_dot_d - k_u e_u; the result is scaled by
    surge_scale before allocation.
    """
    u, v, r = nu
    xi_u = u_dot_d - gains.k_u * e_u
    tau = model.surge_inertia * xi_u - model.sway_inertia * v * r + model.drag_estimate(u)
    return gains.surge_scale * tau


def bs_heading(
    nu: tuple[float, float, float],
    e_psi: float,
    e_psi_dot: float,
    model: ControlModel,
    gains: ControllerGains,
) -> float:
    """Feedback-linearizing yaw moment command [N m].

    Only the desired heading is available (no desired yaw-rate or
    acceleration), so the linearizing input is -k1 e_psi - k2 e_psi_dot
    with e_psi_dot taken from the measured yaw rate.
    """
    u, v, r = nu
    accel = -gains.k1 * e_psi - gains.k2 * e_psi_dot
    tau = (
        model.yaw_effective_inertia * accel
        - model.added_mass_imbalance * u * v
        - model.yaw_damping(u, v) * r
    )
    return gains.yaw_scale * tau


@dataclass(frozen=True)
class AdaptiveState:
    """Parameter estimates and reference-model state of the adaptive law.

    ``x_u_hat``/``x_uu_hat`` start at the tuning condition's drag pair and
    ``a_d_hat`` at surge_inertia * b_m; at convergence x_u_hat absorbs both
    the true linear drag and the model-following feedback -h*a_m.
    """

    x_u_hat: float
    x_uu_hat: float
    a_d_hat: float
    u_m: float
    a_m: float
    b_m: float

    def __post_init__(self) -> None:
        if not (self.a_m > 0.0 and self.b_m > 0.0):
            raise ValueError("reference model rates must be positive")
        if not math.isfinite(self.u_m):
            raise ValueError("reference model speed must be finite")


def initial_adaptive_state(
    model: ControlModel,
    gains: ControllerGains,
    initial_speed: float = 0.0,
) -> AdaptiveState:
    """Adaptive state tuned to the controller's assumed condition.

    The reference-model rates come from linearizing the tanh acceleration
    shaping around zero error, which gives a_m = b_m = k_a_max.
    """
    a_m = b_m = gains.k_a_max
    return AdaptiveState(
        x_u_hat=model.condition.x_u,
        x_uu_hat=model.condition.x_uu,
        a_d_hat=model.surge_inertia * b_m,
        u_m=initial_speed,
        a_m=a_m,
        b_m=b_m,
    )


def reference_model_step(adaptive: AdaptiveState, u_d: float, dt: float) -> AdaptiveState:
    """Advance the first-order reference model by one tick (exact update)."""
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    target = adaptive.b_m / adaptive.a_m * u_d
    u_m = target + (adaptive.u_m - target) * math.exp(-adaptive.a_m * dt)
    return replace(adaptive, u_m=u_m)


def abs_surge(
    nu: tuple[float, float, float],
    adaptive: AdaptiveState,
    u_d: float,
    model: ControlModel,
    gains: ControllerGains,
    dt: float,
    saturated_high: bool = False,
    saturated_low: bool = False,
    freeze_quadratic: bool = False,
    freeze_feedforward: bool = False,
) -> tuple[float, AdaptiveState]:
    """Adaptive surge force command and the updated adaptive state.

    The command cancels the believed sway/yaw coupling, adds the estimated
    drag compensation and the feedforward a_d_hat * u_d, and is scaled by
    surge_scale.  The estimates are then integrated one explicit-Euler step
    along the gradient that makes the Lyapunov value of the model-error
    system non-increasing:

        d(x_u_hat)/dt  = -gamma * e_m * u      * sgn(h)
        d(x_uu_hat)/dt = -gamma * e_m * u|u|   * sgn(h)
        d(a_d_hat)/dt  = -gamma * e_m * u_d    * sgn(h)

    with h the believed surge inertia.  While both jets sit on a limit the
    update is applied only if it drives the command back out of saturation
    (conditional anti-windup); otherwise the estimates would wind up against
    a force the plant never applied.
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    u, v, r = nu
    drag_est = adaptive.x_u_hat * u + adaptive.x_uu_hat * u * abs(u)
    tau = gains.surge_scale * (
        -model.sway_inertia * v * r + drag_est + adaptive.a_d_hat * u_d
    )

    e_m = u - adaptive.u_m
    sign_h = math.copysign(1.0, model.surge_inertia)
    signed_error = e_m * sign_h
    paused = (saturated_high and signed_error <= 0.0) or (
        saturated_low and signed_error >= 0.0
    )
    if paused:
        updated = adaptive
    else:
        rate = gains.gamma * signed_error
        updated = replace(
            adaptive,
            x_u_hat=adaptive.x_u_hat - dt * rate * u,
            x_uu_hat=adaptive.x_uu_hat
            - (0.0 if freeze_quadratic else dt * rate * u * abs(u)),
            a_d_hat=adaptive.a_d_hat
            - (0.0 if freeze_feedforward else dt * rate * u_d),
        )
    updated = reference_model_step(updated, u_d, dt)
    return tau, updated


def lyapunov_diagnostics(
    adaptive: AdaptiveState,
    plant_x_u: float,
    plant_x_uu: float,
    plant_surge_inertia: float,
    gamma: float,
    e_m: float,
    control_scale: float = 1.0,
) -> tuple[float, float]:
    """Lyapunov value and its rate for the adaptive surge loop.

    V combines the weighted model error with the three matching errors of
    the effective (scale-applied) estimates against the true plant; along
    the continuous-time trajectory its rate is -2 a_m e_m^2 |h|, which is
    non-positive.  Simulation-only: it needs the true plant coefficients.
    """
    if not gamma > 0.0 or not control_scale > 0.0:
        raise ValueError("gamma and control_scale must be positive")
    h = plant_surge_inertia
    s = control_scale
    gamma_eff = gamma * s
    p1 = h * adaptive.a_m + (s * adaptive.x_u_hat - plant_x_u)
    p2 = s * adaptive.x_uu_hat - plant_x_uu
    p3 = h * adaptive.b_m - s * adaptive.a_d_hat
    value = abs(h) * e_m * e_m + (p1 * p1 + p2 * p2 + p3 * p3) / gamma_eff
    rate = -2.0 * adaptive.a_m * e_m * e_m * abs(h)
    return value, rate


@dataclass(frozen=True)
class ControlOutput:
    """Commanded generalized force plus per-tick diagnostics."""

    tau_x: float
    tau_z: float
    diag: dict


class BacksteppingController:
    """Non-adaptive speed/heading controller; one instance per run."""

    name = "bs"

    def __init__(
        self,
        model: ControlModel,
        gains: ControllerGains,
        accel_shaping: bool = True,
    ):
        self.model = model
        self.gains = gains
        self.accel_shaping = accel_shaping

    def notify_allocation(self, high_saturated: bool, low_saturated: bool) -> None:
        """Hook for applied-thrust feedback; the static law ignores it."""

    def step(
        self,
        nu: tuple[float, float, float],
        psi: float,
        setpoint: Setpoint,
        dt: float,
    ) -> ControlOutput:
        u, v, r = nu
        e_psi = heading_error(psi, setpoint.psi_d)
        if self.accel_shaping:
            u_d_ref, u_dot_d = shape_desired_accel(u, setpoint, e_psi, self.gains)
        else:
            u_d_ref, u_dot_d = setpoint.u_d, 0.0
        e_u = u - u_d_ref
        tau_x = bs_surge(nu, u_dot_d, e_u, self.model, self.gains)
        tau_z = bs_heading(nu, e_psi, r, self.model, self.gains)
        diag = {
            "e_u": u - setpoint.u_d,
            "e_psi": e_psi,
            "u_d_ref": u_d_ref,
            "u_dot_d": u_dot_d,
        }
        return ControlOutput(tau_x, tau_z, diag)


class AdaptiveBacksteppingController:
    """Adaptive surge law combined with the backstepping heading law."""

    name = "abs"

    def __init__(
        self,
        model: ControlModel,
        gains: ControllerGains,
        accel_shaping: bool = True,
        initial_speed: float = 0.0,
        freeze_quadratic: bool = False,
        freeze_feedforward: bool = False,
    ):
        self.model = model
        self.gains = gains
        self.accel_shaping = accel_shaping
        self.freeze_quadratic = freeze_quadratic
        self.freeze_feedforward = freeze_feedforward
        self.adaptive = initial_adaptive_state(model, gains, initial_speed)
        self._saturated_high = False
        self._saturated_low = False

    def notify_allocation(self, high_saturated: bool, low_saturated: bool) -> None:
        """Record the applied-thrust saturation state for the next tick."""
        self._saturated_high = high_saturated
        self._saturated_low = low_saturated

    def step(
        self,
        nu: tuple[float, float, float],
        psi: float,
        setpoint: Setpoint,
        dt: float,
    ) -> ControlOutput:
        u, v, r = nu
        e_psi = heading_error(psi, setpoint.psi_d)
        if self.accel_shaping:
            u_d_ref, _ = shape_desired_accel(u, setpoint, e_psi, self.gains)
        else:
            u_d_ref = setpoint.u_d
        u_m_pre = self.adaptive.u_m
        e_m = u - u_m_pre
        tau_x, self.adaptive = abs_surge(
            nu,
            self.adaptive,
            u_d_ref,
            self.model,
            self.gains,
            dt,
            saturated_high=self._saturated_high,
            saturated_low=self._saturated_low,
            freeze_quadratic=self.freeze_quadratic,
            freeze_feedforward=self.freeze_feedforward,
        )
        tau_z = bs_heading(nu, e_psi, r, self.model, self.gains)
        diag = {
            "e_u": u - setpoint.u_d,
            "e_psi": e_psi,
            "u_d_ref": u_d_ref,
            "e_m": e_m,
            "u_m": u_m_pre,
            "x_u_hat": self.adaptive.x_u_hat,
            "x_uu_hat": self.adaptive.x_uu_hat,
            "a_d_hat": self.adaptive.a_d_hat,
        }
        return ControlOutput(tau_x, tau_z, diag)
