"""Waterjet thrust models and differential thrust allocation.

Commands are normalized fractions of maximum motor speed in [0, 1].  The
jets have no reversing buckets, so thrust is forward-only and anything that
allocates below zero is clamped at zero without redistribution.

Two thrust models are available per jet:

* ``bollard_linear`` -- thrust proportional to command, anchored at the
  measured static (bollard) pull; ignores forward speed.
* ``pump_analog`` -- a pump-affinity form T = a2*cmd^2 + a1*u*cmd whose
  thrust falls off with forward speed, mimicking a propeller-style
  thrust-vs-advance characteristic.  The lumped decay constant a1 can be
  calibrated so full throttle balances drag at an observed top speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .dynamics import GeneralizedForce, surge_drag
from .params import DisplacementCondition

__all__ = [
    "ThrusterModel",
    "Allocation",
    "bollard_thrust",
    "pump_analog_thrust",
    "jet_thrust",
    "calibrate_thrust_decay",
    "calibrated_pump_model",
    "allocate",
    "combine",
    "thrust_to_command",
    "DEFAULT_BOLLARD_TOTAL",
    "TOP_SPEED_BY_CONDITION",
]

# Static pull of the whole vessel with both jets at full throttle [N].
# Interpreted as a two-jet total, i.e. 102 N per jet.
DEFAULT_BOLLARD_TOTAL = 204.0

# Observed steady full-throttle speeds used to anchor the pump-analog decay.
TOP_SPEED_BY_CONDITION = {"lightship": 2.8, "full": 2.5}


@dataclass(frozen=True)
class ThrusterModel:
    """Per-jet thrust model parameters.

    ``speed_decay`` is the lumped a1 term of the pump-analog form, in
    N/(m/s) per unit command and non-positive (thrust cannot grow with
    forward speed at a fixed command).  It is ignored by the bollard model.
    """

    kind: str = "bollard_linear"  # or "pump_analog"
    jet_max_thrust: float = DEFAULT_BOLLARD_TOTAL / 2.0
    speed_decay: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("bollard_linear", "pump_analog"):
            raise ValueError(f"unknown thruster model kind {self.kind!r}")
        if not self.jet_max_thrust > 0.0:
            raise ValueError("jet_max_thrust must be positive")
        if self.speed_decay > 0.0:
            raise ValueError("speed_decay must be non-positive")

    @classmethod
    def bollard(cls, jet_max_thrust: float = DEFAULT_BOLLARD_TOTAL / 2.0) -> "ThrusterModel":
        return cls(kind="bollard_linear", jet_max_thrust=jet_max_thrust)

    @classmethod
    def pump(
        cls,
        speed_decay: float,
        jet_max_thrust: float = DEFAULT_BOLLARD_TOTAL / 2.0,
    ) -> "ThrusterModel":
        return cls(kind="pump_analog", jet_max_thrust=jet_max_thrust, speed_decay=speed_decay)


def _clamp_command(cmd: float) -> float:
    return min(1.0, max(0.0, cmd))


def bollard_thrust(cmd: float, jet_max_thrust: float = DEFAULT_BOLLARD_TOTAL / 2.0) -> float:
    """Per-jet thrust of the speed-independent linear model [N]."""
    return _clamp_command(cmd) * jet_max_thrust


def pump_analog_thrust(cmd: float, u: float, model: ThrusterModel) -> float:
    """Per-jet thrust of the pump-analog model at forward speed u [N].

    T = a2*cmd^2 + a1*u*cmd with a2 anchored so full command at rest equals
    the bollard pull; clamped at zero (an overrun jet produces no reverse
    thrust in this model).
    """
    c = _clamp_command(cmd)
    return max(0.0, model.jet_max_thrust * c * c + model.speed_decay * u * c)


def jet_thrust(model: ThrusterModel, cmd: float, u: float) -> float:
    """Per-jet thrust for either model kind [N]."""
    if model.kind == "bollard_linear":
        return bollard_thrust(cmd, model.jet_max_thrust)
    return pump_analog_thrust(cmd, u, model)


def calibrate_thrust_decay(
    bollard_total: float,
    target_speed: float,
    condition: DisplacementCondition,
) -> float:
    """Per-jet speed-decay constant a1 so thrust balances drag at top speed.

    At full command the two-jet total becomes bollard_total + 2*a1*u, and a1
    is chosen so that total equals the condition's drag curve at
    ``target_speed``.  Raises if the drag at the target already exceeds the
    bollard pull (the model could never reach that speed).
    """
    if not target_speed > 0.0:
        raise ValueError("target_speed must be positive")
    drag = surge_drag(condition, target_speed)
    if drag > bollard_total:
        raise ValueError(
            f"drag {drag:.1f} N at {target_speed} m/s exceeds bollard total {bollard_total:.1f} N"
        )
    return (drag - bollard_total) / (2.0 * target_speed)


def calibrated_pump_model(
    condition: DisplacementCondition,
    target_speed: float | None = None,
    bollard_total: float = DEFAULT_BOLLARD_TOTAL,
) -> ThrusterModel:
    """Pump-analog model calibrated to a condition's observed top speed."""
    if target_speed is None:
        try:
            target_speed = TOP_SPEED_BY_CONDITION[condition.label]
        except KeyError:
            raise ValueError(
                f"no tabulated top speed for condition {condition.label!r}; "
                "pass target_speed explicitly"
            ) from None
    decay = calibrate_thrust_decay(bollard_total, target_speed, condition)
    return ThrusterModel.pump(speed_decay=decay, jet_max_thrust=bollard_total / 2.0)


@dataclass(frozen=True)
class Allocation:
    """Result of splitting a commanded force/moment between the jets.

    ``port_raw``/``stbd_raw`` are the pre-clamp values kept for diagnostics;
    ``high_saturated``/``low_saturated`` flag both jets pinned at the upper
    or lower limit, which is what pauses adaptation upstream.
    """

    port: float
    stbd: float
    port_raw: float
    stbd_raw: float
    jet_max_thrust: float

    @property
    def clamped(self) -> bool:
        return self.port != self.port_raw or self.stbd != self.stbd_raw

    @property
    def high_saturated(self) -> bool:
        return self.port_raw >= self.jet_max_thrust and self.stbd_raw >= self.jet_max_thrust

    @property
    def low_saturated(self) -> bool:
        return self.port_raw <= 0.0 and self.stbd_raw <= 0.0


def allocate(
    tau_x: float,
    tau_z: float,
    hull_separation: float,
    jet_max_thrust: float = DEFAULT_BOLLARD_TOTAL / 2.0,
) -> Allocation:
    """Split a commanded surge force and yaw moment between the two jets.

    Solving the force/moment composition for the jet thrusts gives
    T_port = tau_x/2 + tau_z/B and T_stbd = tau_x/2 - tau_z/B; each is then
    clamped to [0, jet_max_thrust] without redistributing the shortfall.
    """
    if not hull_separation > 0.0:
        raise ValueError("hull separation must be positive")
    port_raw = tau_x / 2.0 + tau_z / hull_separation
    stbd_raw = tau_x / 2.0 - tau_z / hull_separation
    port = min(jet_max_thrust, max(0.0, port_raw))
    stbd = min(jet_max_thrust, max(0.0, stbd_raw))
    return Allocation(port, stbd, port_raw, stbd_raw, jet_max_thrust)


def combine(t_port: float, t_stbd: float, hull_separation: float) -> GeneralizedForce:
    """Generalized force produced by the two jet thrusts."""
    if t_port < 0.0 or t_stbd < 0.0:
        raise ValueError("jet thrusts must be non-negative")
    return GeneralizedForce(
        tau_x=t_port + t_stbd,
        tau_y=0.0,
        tau_z=(t_port - t_stbd) * hull_separation / 2.0,
    )


def thrust_to_command(thrust: float, u: float, model: ThrusterModel) -> float:
    """Smallest command in [0, 1] whose modeled thrust meets ``thrust``.

    Returns 0 for non-positive requests and saturates at 1 when the request
    exceeds what the jet can deliver at the current speed.
    """
    if thrust <= 0.0:
        return 0.0
    if model.kind == "bollard_linear":
        return min(1.0, thrust / model.jet_max_thrust)
    a2 = model.jet_max_thrust
    a1u = model.speed_decay * u
    # Positive root of a2*c^2 + a1u*c - thrust = 0.
    disc = a1u * a1u + 4.0 * a2 * thrust
    cmd = (-a1u + math.sqrt(disc)) / (2.0 * a2)
    return min(1.0, cmd)
