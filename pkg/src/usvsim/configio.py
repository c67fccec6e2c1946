"""Config file loading, canonical hashing, and table export.

Configs are human-readable YAML with SI units throughout (angles in the
scenario files are degrees for readability and converted on load).  Hashes
are SHA-256 over a canonical JSON rendering of the fully resolved scenario,
so unchanged configs reproduce byte-identical outputs.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import re
from pathlib import Path

import yaml

from .control import ControllerGains
from .dynamics import ModelOptions, SimState
from .params import (
    DisplacementCondition,
    VesselGeometry,
    derive_coefficients,
    standard_condition,
)
from .propulsion import ThrusterModel, calibrated_pump_model
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
)

__all__ = [
    "parse_duration",
    "spec_to_dict",
    "config_hash",
    "scenario_hash",
    "load_geometry",
    "load_condition",
    "load_thruster",
    "load_gains",
    "load_scenario",
    "save_condition_fragment",
    "coefficient_table",
    "coefficient_table_csv",
]

_DURATION_ISO = re.compile(
    r"^P?T?(?:(?P<minutes>\d+(?:\.\d+)?)M)?(?:(?P<seconds>\d+(?:\.\d+)?)S?)?$",
    re.IGNORECASE,
)


def parse_duration(value: float | int | str) -> float:
    """Duration in seconds from a number, '90', '90s', 'PT1M30S', or '2m'."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    match = _DURATION_ISO.match(text.replace(" ", ""))
    if not match or (match.group("minutes") is None and match.group("seconds") is None):
        raise ValidationError(f"cannot parse duration {value!r}")
    seconds = 0.0
    if match.group("minutes"):
        seconds += 60.0 * float(match.group("minutes"))
    if match.group("seconds"):
        seconds += float(match.group("seconds"))
    return seconds


# ---------------------------------------------------------------- hashing


def _event_dict(event) -> dict:
    data = dataclasses.asdict(event)
    data["kind"] = event.kind
    return data


def spec_to_dict(spec: ScenarioSpec) -> dict:
    """JSON-ready dictionary of a fully resolved scenario."""
    data = dataclasses.asdict(spec)
    data["events"] = [_event_dict(e) for e in spec.events]
    return data


def _canonical(data: dict) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_hash(spec: ScenarioSpec) -> str:
    """SHA-256 of the complete resolved scenario."""
    return hashlib.sha256(_canonical(spec_to_dict(spec)).encode()).hexdigest()[:16]


def scenario_hash(spec: ScenarioSpec) -> str:
    """Hash of the scenario with everything controller-specific removed.

    Two runs are comparable when these hashes match: same plant, thruster,
    schedule and events, possibly different controller/gains.
    """
    data = spec_to_dict(spec)
    for key in ("name", "controller", "gains", "assumed_condition",
                "accel_shaping", "freeze_quadratic", "freeze_feedforward"):
        data.pop(key, None)
    return hashlib.sha256(_canonical(data).encode()).hexdigest()[:16]


# ---------------------------------------------------------------- loading


def _require_mapping(data, what: str) -> dict:
    if not isinstance(data, dict):
        raise ValidationError(f"{what} must be a mapping")
    return data


def _build(cls, data: dict, what: str):
    fields = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - fields
    if unknown:
        raise ValidationError(f"unknown {what} keys: {sorted(unknown)}")
    try:
        return cls(**data)
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad {what}: {exc}") from exc


def load_geometry(data: dict | None) -> VesselGeometry:
    if data is None:
        return VesselGeometry()
    return _build(VesselGeometry, _require_mapping(data, "geometry"), "geometry")


def load_condition(data: str | dict | None, default: str = "lightship") -> DisplacementCondition:
    if data is None:
        return standard_condition(default)
    if isinstance(data, str):
        return standard_condition(data)
    data = dict(_require_mapping(data, "condition"))
    base = data.pop("base", None)
    if base is not None:
        merged = dataclasses.asdict(standard_condition(base))
        merged.update(data)
        data = merged
    return _build(DisplacementCondition, data, "condition")


def load_thruster(data: str | dict | None, condition: DisplacementCondition) -> ThrusterModel:
    if data is None or data == "bollard":
        return ThrusterModel.bollard()
    if data == "pump":
        return calibrated_pump_model(condition)
    data = dict(_require_mapping(data, "thruster"))
    kind = data.pop("kind", "bollard_linear")
    if kind in ("pump", "pump_analog") and "speed_decay" not in data:
        return calibrated_pump_model(condition, data.pop("target_speed", None))
    data["kind"] = "pump_analog" if kind == "pump" else kind
    return _build(ThrusterModel, data, "thruster")


def load_gains(data: dict | None) -> ControllerGains:
    if data is None:
        return ControllerGains()
    return _build(ControllerGains, _require_mapping(data, "gains"), "gains")


_EVENT_TYPES = {
    "mass_drop": MassDrop,
    "tow_attach": TowAttach,
    "impulse": Impulse,
    "command_change": CommandChange,
}


def _load_event(data: dict):
    data = dict(_require_mapping(data, "event"))
    kind = data.pop("kind", None)
    if kind not in _EVENT_TYPES:
        raise ValidationError(f"unknown event kind {kind!r}")
    if kind == "mass_drop":
        data["new_condition"] = load_condition(data.get("new_condition"))
    if "time" in data:
        data["time"] = parse_duration(data["time"])
    if "duration" in data:
        data["duration"] = parse_duration(data["duration"])
    return _build(_EVENT_TYPES[kind], data, f"{kind} event")


def load_scenario(path: str | Path, **overrides) -> ScenarioSpec:
    """Load a scenario YAML file.

    Two forms are accepted: ``builtin: <name>`` plus builder arguments, or a
    full inline scenario with geometry / condition / thruster / gains /
    setpoints / events sections.  Keyword overrides win over file values.
    """
    path = Path(path)
    if not path.exists():
        raise ValidationError(f"scenario config {path} does not exist")
    raw = yaml.safe_load(path.read_text(encoding="utf-8"))
    data = dict(_require_mapping(raw, "scenario config"))

    if "builtin" in data:
        name = data.pop("builtin")
        data.update(overrides)
        if "duration" in data:
            data["duration"] = parse_duration(data["duration"])
        return builtin_scenario(name, **data)

    data.update(overrides)
    geometry = load_geometry(data.pop("geometry", None))
    condition = load_condition(data.pop("condition", None))
    assumed = load_condition(data.pop("assumed_condition", None))
    thruster = load_thruster(data.pop("thruster", None), condition)
    gains = load_gains(data.pop("gains", None))
    options = _build(ModelOptions, _require_mapping(data.pop("options", {}) or {}, "options"), "options")
    noise = _build(NoiseSpec, _require_mapping(data.pop("noise", {}) or {}, "noise"), "noise")

    setpoints = []
    for item in data.pop("setpoints", []) or []:
        item = dict(_require_mapping(item, "setpoint"))
        if "psi_d_deg" in item:
            item["psi_d"] = math.radians(item.pop("psi_d_deg"))
        if "time" in item:
            item["time"] = parse_duration(item["time"])
        setpoints.append(_build(SetpointPhase, item, "setpoint"))

    events = tuple(_load_event(e) for e in data.pop("events", []) or [])

    initial = data.pop("initial", None)
    if initial is not None:
        initial = dict(_require_mapping(initial, "initial state"))
        if "psi_deg" in initial:
            initial["psi"] = math.radians(initial.pop("psi_deg"))
        initial = _build(SimState, initial, "initial state")
    else:
        initial = SimState()

    if "duration" in data:
        data["duration"] = parse_duration(data["duration"])
    if "initial_command" in data:
        data["initial_command"] = tuple(data["initial_command"])

    return _build(
        ScenarioSpec,
        {
            **data,
            "geometry": geometry,
            "condition": condition,
            "assumed_condition": assumed,
            "thruster": thruster,
            "gains": gains,
            "options": options,
            "noise": noise,
            "setpoints": tuple(setpoints),
            "events": events,
            "initial": initial,
        },
        "scenario",
    )


def save_condition_fragment(path: str | Path, label: str, x_u: float, x_uu: float,
                            mass: float | None = None) -> None:
    """Write a condition config fragment produced by a drag fit."""
    fragment = {"condition": {"label": label, "x_u": x_u, "x_uu": x_uu}}
    if mass is not None:
        fragment["condition"]["mass"] = mass
    Path(path).write_text(yaml.safe_dump(fragment, sort_keys=True), encoding="utf-8")


# ------------------------------------------------------------ coefficient table

# Rows in presentation order: (name, correction factor or None for fitted,
# velocity-dependent flag).
_COEFF_ROWS = (
    ("N_vdot", 2.5, False),
    ("N_rdot", 1.2, False),
    ("X_udot", 0.075, False),
    ("Y_rdot", 0.2, False),
    ("Y_vdot", 0.9, False),
    ("X_u", None, False),
    ("Y_v", 0.5, False),
    ("N_r", 0.02, True),
    ("N_v", 0.06, True),
    ("Y_r", 6.0, True),
    ("X_uu", None, False),
    ("Y_vv", 1.0, False),
    ("Y_vr", 1.0, False),
    ("Y_rv", 1.0, False),
    ("Y_rr", 1.0, False),
    ("N_vv", 1.0, False),
    ("N_vr", 1.0, False),
    ("N_rv", 1.0, False),
    ("N_rr", 1.0, False),
)


def coefficient_table(
    geometry: VesselGeometry,
    condition: DisplacementCondition,
    nu: tuple[float, float, float] = (0.0, 0.0, 0.0),
    surge_added_mass_fraction: float = 0.075,
) -> list[tuple[str, str, float, str]]:
    """Rows (name, factor, value, note) of the derived coefficient set."""
    coeffs = derive_coefficients(geometry, condition, nu, surge_added_mass_fraction)
    at_rest = math.hypot(nu[0], nu[1]) == 0.0
    values = {
        "N_vdot": coeffs.n_vdot, "N_rdot": coeffs.n_rdot, "X_udot": coeffs.x_udot,
        "Y_rdot": coeffs.y_rdot, "Y_vdot": coeffs.y_vdot,
        "X_u": coeffs.x_u, "Y_v": coeffs.y_v, "N_r": coeffs.n_r,
        "N_v": coeffs.n_v, "Y_r": coeffs.y_r, "X_uu": coeffs.x_uu,
        "Y_vv": coeffs.y_vv, "Y_vr": coeffs.y_vr, "Y_rv": coeffs.y_rv,
        "Y_rr": coeffs.y_rr, "N_vv": coeffs.n_vv, "N_vr": coeffs.n_vr,
        "N_rv": coeffs.n_rv, "N_rr": coeffs.n_rr,
    }
    rows = []
    for name, factor, velocity_dependent in _COEFF_ROWS:
        if name == "X_udot":
            factor = surge_added_mass_fraction
        factor_text = "fitted" if factor is None else f"{factor:g}"
        note = ""
        if velocity_dependent:
            note = "velocity-dependent (zero at rest)" if at_rest else "velocity-dependent"
        rows.append((name, factor_text, values[name], note))
    return rows


def coefficient_table_csv(rows: list[tuple[str, str, float, str]]) -> str:
    lines = ["coefficient,factor,value,note"]
    for name, factor, value, note in rows:
        lines.append(f"{name},{factor},{value!r},{note}")
    return "\n".join(lines) + "\n"
