"""Post-processing of run logs: steady-state metrics, controller comparison,
and the system-identification fits.

"Steady state" is operationalized as any maximal interval where a rolling
standard deviation of the channel stays below a threshold, minus a fixed
exclusion zone after each event (impulse transients and condition swaps are
unmeasured disturbances and must not bias the averages).  Two runs of the
same scenario under different controllers are compared per phase with the
relative-improvement metric

    lambda = (b - a) / max(a, b) * 100%        (a, b >= 0)

which is positive when result ``a`` carries the smaller error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .runlog import RunLog

__all__ = [
    "SteadyWindow",
    "PhaseErrors",
    "DragFit",
    "TowDragFit",
    "ComparisonRow",
    "ComparisonReport",
    "detect_steady_state",
    "steady_errors",
    "lambda_compare",
    "fit_drag_quadratic",
    "fit_tow_drag",
    "phase_boundaries",
    "phase_metrics",
    "compare_controllers",
    "DEFAULT_SPEED_TOL",
    "DEFAULT_HEADING_TOL",
    "DEFAULT_WINDOW",
    "DEFAULT_EXCLUSION",
    "TOW_FIT_SPEED_RANGE",
]

DEFAULT_WINDOW = 10.0      # rolling-std window [s]
DEFAULT_EXCLUSION = 5.0    # post-event exclusion zone [s]
DEFAULT_SPEED_TOL = 0.02   # steady if rolling std below this [m/s]
DEFAULT_HEADING_TOL = math.radians(0.5)  # [rad]

# Speed range over which the towed-device drag curve was measured [m/s].
TOW_FIT_SPEED_RANGE = (0.5, 1.6)


@dataclass(frozen=True)
class SteadyWindow:
    """A time interval certified steady for one channel."""

    start: float
    end: float

    @property
    def span(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class PhaseErrors:
    """Mean absolute tracking errors over a set of steady samples."""

    window: SteadyWindow
    speed_error: float          # mean |u - u_d| [m/s]
    speed_percent: float        # speed_error / mean(u_d) * 100
    heading_error_deg: float    # mean |psi - psi_d| [deg]
    sample_count: int


def _channel_tolerance(channel: str) -> float:
    if channel in ("e_psi", "psi"):
        return DEFAULT_HEADING_TOL
    return DEFAULT_SPEED_TOL


def detect_steady_state(
    log: RunLog,
    channel: str = "e_u",
    window: float = DEFAULT_WINDOW,
    tol: float | None = None,
    exclusion: float = DEFAULT_EXCLUSION,
    span: tuple[float, float] | None = None,
) -> list[SteadyWindow]:
    """Maximal steady intervals of a channel.

    A tick certifies the trailing ``window`` seconds as steady when the
    standard deviation over that window is below ``tol``; overlapping
    certificates are merged and the post-event exclusion zones are carved
    out.  Returns an empty list when nothing is steady.
    """
    if len(log) == 0:
        raise ValueError("empty log")
    if not window > 0.0:
        raise ValueError("window must be positive")
    tol = _channel_tolerance(channel) if tol is None else tol

    times = log.times
    values = log.column(channel)
    if span is not None:
        mask = (times >= span[0] - 1e-12) & (times <= span[1] + 1e-12)
        times = times[mask]
        values = values[mask]
    if len(times) < 2:
        return []
    tick = times[1] - times[0]
    n_win = max(2, int(round(window / tick)) + 1)
    if len(values) < n_win:
        return []

    # Rolling mean/std over trailing windows via cumulative sums.
    cs = np.concatenate([[0.0], np.cumsum(values)])
    cs2 = np.concatenate([[0.0], np.cumsum(values * values)])
    total = cs[n_win:] - cs[:-n_win]
    total2 = cs2[n_win:] - cs2[:-n_win]
    mean = total / n_win
    var = np.maximum(total2 / n_win - mean * mean, 0.0)
    std = np.sqrt(var)
    steady = std < tol  # steady[i] certifies ticks [i, i + n_win - 1]

    intervals: list[list[float]] = []
    i = 0
    while i < len(steady):
        if steady[i]:
            j = i
            while j + 1 < len(steady) and steady[j + 1]:
                j += 1
            intervals.append([times[i], times[j + n_win - 1]])
            i = j + 1
        else:
            i += 1

    zones = [(te, te + exclusion) for te in log.event_times()]
    for z0, z1 in zones:
        trimmed: list[list[float]] = []
        for start, end in intervals:
            if end <= z0 or start >= z1:
                trimmed.append([start, end])
                continue
            if start < z0:
                trimmed.append([start, z0])
            if end > z1:
                trimmed.append([z1, end])
        intervals = trimmed

    return [SteadyWindow(s, e) for s, e in intervals if e - s > tick]


def steady_errors(log: RunLog, windows: list[SteadyWindow]) -> list[PhaseErrors]:
    """Mean absolute speed/heading errors over each steady window."""
    times = log.times
    e_u = log.column("e_u")
    e_psi = log.column("e_psi")
    u_d = log.column("u_d")
    out = []
    for win in windows:
        mask = (times >= win.start - 1e-12) & (times <= win.end + 1e-12)
        if not mask.any():
            raise ValueError(f"steady window {win} contains no samples")
        speed_error = float(np.nanmean(np.abs(e_u[mask])))
        mean_u_d = float(np.nanmean(u_d[mask]))
        percent = 100.0 * speed_error / mean_u_d if mean_u_d > 0.0 else math.nan
        heading = float(np.degrees(np.nanmean(np.abs(e_psi[mask]))))
        out.append(PhaseErrors(win, speed_error, percent, heading, int(mask.sum())))
    return out


def lambda_compare(a: float, b: float) -> float:
    """Relative improvement of result a over result b, in percent."""
    if a < 0.0 or b < 0.0:
        raise ValueError("lambda metric compares non-negative errors")
    if a == 0.0 and b == 0.0:
        return 0.0
    return (b - a) / max(a, b) * 100.0


@dataclass(frozen=True)
class DragFit:
    """Least-squares surge-drag pair through the origin."""

    x_uu: float
    x_u: float
    residual_rms: float
    sample_count: int


def fit_drag_quadratic(points: list[tuple[float, float]]) -> DragFit:
    """Fit D = x_uu * u|u| + x_u * u to steady thrust-equals-drag samples.

    Requires at least three samples at no fewer than two distinct speeds;
    the design has no constant term because drag vanishes at rest.
    """
    if len(points) < 3:
        raise ValueError("need at least 3 samples for the quadratic drag fit")
    u = np.array([p[0] for p in points], dtype=float)
    d = np.array([p[1] for p in points], dtype=float)
    design = np.column_stack([u * np.abs(u), u])
    if np.linalg.matrix_rank(design) < 2:
        raise ValueError("rank-deficient drag fit: samples need at least two distinct speeds")
    coef, *_ = np.linalg.lstsq(design, d, rcond=None)
    residuals = d - design @ coef
    rms = float(np.sqrt(np.mean(residuals**2)))
    return DragFit(x_uu=float(coef[0]), x_u=float(coef[1]), residual_rms=rms,
                   sample_count=len(points))


@dataclass(frozen=True)
class TowDragFit:
    """Least-squares quadratic tow-drag coefficient."""

    tow_drag_coeff: float
    residual_rms: float
    sample_count: int
    out_of_range: tuple[float, ...] = ()

    @property
    def in_range(self) -> bool:
        return not self.out_of_range


def fit_tow_drag(
    points: list[tuple[float, float]],
    valid_range: tuple[float, float] = TOW_FIT_SPEED_RANGE,
) -> TowDragFit:
    """Fit D_tow = c_t * u^2; speeds outside the measured range are flagged."""
    if len(points) < 1:
        raise ValueError("need at least one sample for the tow drag fit")
    u = np.array([p[0] for p in points], dtype=float)
    d = np.array([p[1] for p in points], dtype=float)
    if np.all(u == 0.0):
        raise ValueError("tow drag fit needs a nonzero speed sample")
    u2 = u * u
    c_t = float(np.dot(u2, d) / np.dot(u2, u2))
    residuals = d - c_t * u2
    rms = float(np.sqrt(np.mean(residuals**2)))
    lo, hi = valid_range
    outside = tuple(float(s) for s in u if s < lo or s > hi)
    return TowDragFit(tow_drag_coeff=c_t, residual_rms=rms,
                      sample_count=len(points), out_of_range=outside)


# ------------------------------------------------------------- comparison


def phase_boundaries(log: RunLog) -> list[float]:
    """Times that split the run into phases: events plus setpoint changes."""
    times = log.times
    bounds: set[float] = set(log.event_times())
    for name in ("psi_d", "u_d"):
        col = log.column(name)
        finite = np.isfinite(col)
        prev = None
        for t, ok, value in zip(times, finite, col):
            if not ok:
                continue
            if prev is not None and value != prev and t > 0.0:
                bounds.add(float(t))
            prev = value
    return sorted(bounds)


def phase_metrics(
    log: RunLog,
    window: float = DEFAULT_WINDOW,
    speed_tol: float = DEFAULT_SPEED_TOL,
    heading_tol: float = DEFAULT_HEADING_TOL,
    exclusion: float = DEFAULT_EXCLUSION,
) -> list[dict]:
    """Steady-state error summary for each phase of a closed-loop run.

    Speed and heading statistics are gathered over the speed-steady windows
    of the phase (weighted by sample count); a phase with no steady window
    reports NaNs.
    """
    times = log.times
    bounds = [float(times[0])] + phase_boundaries(log) + [float(times[-1])]
    phases = []
    for idx in range(len(bounds) - 1):
        span = (bounds[idx], bounds[idx + 1])
        if span[1] - span[0] <= 0:
            continue
        windows = detect_steady_state(
            log, "e_u", window=window, tol=speed_tol, exclusion=exclusion, span=span
        )
        entry = {
            "phase": idx,
            "start": span[0],
            "end": span[1],
            "steady_windows": [(w.start, w.end) for w in windows],
            "speed_error": math.nan,
            "speed_percent": math.nan,
            "heading_error_deg": math.nan,
        }
        if windows:
            stats = steady_errors(log, windows)
            weights = np.array([s.sample_count for s in stats], dtype=float)
            weights /= weights.sum()
            entry["speed_error"] = float(
                np.sum(weights * np.array([s.speed_error for s in stats]))
            )
            entry["speed_percent"] = float(
                np.sum(weights * np.array([s.speed_percent for s in stats]))
            )
            entry["heading_error_deg"] = float(
                np.sum(weights * np.array([s.heading_error_deg for s in stats]))
            )
        phases.append(entry)
    return phases


@dataclass(frozen=True)
class ComparisonRow:
    metric: str
    value_a: float
    value_b: float
    lam: float
    winner: str


@dataclass
class ComparisonReport:
    """Per-phase error comparison of two runs of the same scenario."""

    label_a: str
    label_b: str
    rows: list[ComparisonRow] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "label_a": self.label_a,
            "label_b": self.label_b,
            "rows": [
                {
                    "metric": row.metric,
                    self.label_a: row.value_a,
                    self.label_b: row.value_b,
                    "lambda_percent": row.lam,
                    "winner": row.winner,
                }
                for row in self.rows
            ],
        }

    def to_text(self) -> str:
        width = max([len(r.metric) for r in self.rows] + [10])
        header = (
            f"{'Metric'.ljust(width)}  {self.label_a:>10}  {self.label_b:>10}  "
            f"{'lambda%':>8}  winner"
        )
        lines = [header, "-" * len(header)]
        for row in self.rows:
            lines.append(
                f"{row.metric.ljust(width)}  {row.value_a:10.4f}  {row.value_b:10.4f}  "
                f"{row.lam:8.1f}  {row.winner}"
            )
        return "\n".join(lines)


def compare_controllers(
    log_a: RunLog,
    log_b: RunLog,
    label_a: str | None = None,
    label_b: str | None = None,
) -> ComparisonReport:
    """Phase-by-phase comparison of two runs of the same scenario.

    Rejects logs whose scenario fingerprints (everything except the
    controller choice and tuning) differ.  The first phase is reported as
    "before" and the final phase as "after" the event, mirroring the layout
    of the field comparison tables.
    """
    ha = log_a.meta.get("scenario_hash")
    hb = log_b.meta.get("scenario_hash")
    if ha is None or hb is None or ha != hb:
        raise ValueError(
            "logs come from different scenarios (scenario_hash mismatch); "
            "comparisons need identical runs modulo controller choice"
        )
    label_a = label_a or log_a.meta.get("controller", "A")
    label_b = label_b or log_b.meta.get("controller", "B")

    phases_a = phase_metrics(log_a)
    phases_b = phase_metrics(log_b)
    if len(phases_a) != len(phases_b):
        raise ValueError("phase structure differs between the two logs")

    def pick(phases: list[dict], which: str) -> dict:
        return phases[0] if which == "before" else phases[-1]

    report = ComparisonReport(label_a=label_a, label_b=label_b)
    metric_rows = [
        ("Steady State Speed Error Before Event (m/s)", "before", "speed_error"),
        ("Percent Error Before (%)", "before", "speed_percent"),
        ("Steady State Speed Error After Event (m/s)", "after", "speed_error"),
        ("Percent Error After (%)", "after", "speed_percent"),
        ("Steady State Heading Error Before Event (deg)", "before", "heading_error_deg"),
        ("Steady State Heading Error After Event (deg)", "after", "heading_error_deg"),
    ]
    for name, which, key in metric_rows:
        va = pick(phases_a, which)[key]
        vb = pick(phases_b, which)[key]
        if math.isnan(va) or math.isnan(vb):
            lam = math.nan
            winner = "n/a"
        else:
            lam = lambda_compare(va, vb)
            winner = label_a if va <= vb else label_b
        report.rows.append(ComparisonRow(name, va, vb, lam, winner))
    return report
