"""Per-tick run logs: in-memory container plus CSV / JSON summary output.

A log holds one row per controller tick with every channel the analysis
layer consumes.  CSV output is fully deterministic: floats are written with
shortest round-trip precision, rows in tick order, Unix newlines, and the
run metadata (tool version, config hash, scenario fingerprint) embedded in
``# key=value`` comment lines ahead of the header row.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = ["RunLog", "FLOAT_COLUMNS", "STRING_COLUMNS", "LogFormatError"]


class LogFormatError(ValueError):
    """Raised when a log file cannot be parsed; carries the line number."""


FLOAT_COLUMNS = (
    "t", "x", "y", "psi", "u", "v", "r",
    "u_d", "psi_d", "u_d_ref",
    "cmd_port", "cmd_stbd", "thrust_port", "thrust_stbd",
    "tau_x_cmd", "tau_z_cmd",
    "e_u", "e_psi", "e_m",
    "x_u_hat", "x_uu_hat", "a_d_hat", "u_m",
    "lyap_v", "lyap_vdot",
    "sat_high", "sat_low",
)
STRING_COLUMNS = ("condition", "event")
ALL_COLUMNS = FLOAT_COLUMNS + STRING_COLUMNS


def _fmt(value: float) -> str:
    return repr(float(value))


@dataclass
class RunLog:
    """Columnar run log with metadata.

    ``meta`` must contain at least ``scenario``, ``config_hash``,
    ``scenario_hash`` and ``version``; extra keys are preserved.
    """

    meta: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)
    _arrays: dict | None = None

    def append(self, record: dict) -> None:
        self.rows.append(record)
        self._arrays = None

    def __len__(self) -> int:
        return len(self.rows)

    def column(self, name: str) -> np.ndarray:
        """Channel as an array (floats for numeric channels)."""
        if self._arrays is None:
            self._build_arrays()
        assert self._arrays is not None
        return self._arrays[name]

    def _build_arrays(self) -> None:
        arrays: dict = {}
        for name in FLOAT_COLUMNS:
            arrays[name] = np.array(
                [float(row.get(name, math.nan)) for row in self.rows]
            )
        for name in STRING_COLUMNS:
            arrays[name] = np.array(
                [str(row.get(name, "")) for row in self.rows], dtype=object
            )
        self._arrays = arrays

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def event_times(self) -> list[float]:
        """Times of rows carrying an event tag, in order."""
        out = []
        for row in self.rows:
            if row.get("event"):
                out.append(float(row["t"]))
        return out

    # ------------------------------------------------------------------ CSV

    def write_csv(self, path: str | Path) -> None:
        path = Path(path)
        lines = []
        for key in sorted(self.meta):
            lines.append(f"# {key}={self.meta[key]}")
        lines.append(",".join(ALL_COLUMNS))
        for row in self.rows:
            cells = [_fmt(row.get(name, math.nan)) for name in FLOAT_COLUMNS]
            cells += [str(row.get(name, "")) for name in STRING_COLUMNS]
            lines.append(",".join(cells))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")

    @classmethod
    def read_csv(cls, path: str | Path) -> "RunLog":
        path = Path(path)
        meta: dict = {}
        rows: list = []
        header: list[str] | None = None
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    body = line[1:].strip()
                    if "=" in body:
                        key, value = body.split("=", 1)
                        meta[key.strip()] = value
                    continue
                cells = line.split(",")
                if header is None:
                    header = cells
                    missing = [c for c in ALL_COLUMNS if c not in header]
                    if missing:
                        raise LogFormatError(
                            f"{path}:{lineno}: header is missing columns {missing}"
                        )
                    continue
                if len(cells) != len(header):
                    raise LogFormatError(
                        f"{path}:{lineno}: expected {len(header)} cells, found {len(cells)}"
                    )
                record: dict = {}
                for name, cell in zip(header, cells):
                    if name in STRING_COLUMNS:
                        record[name] = cell
                    else:
                        try:
                            record[name] = float(cell)
                        except ValueError as exc:
                            raise LogFormatError(
                                f"{path}:{lineno}: bad float {cell!r} in column {name}"
                            ) from exc
                rows.append(record)
        if header is None:
            raise LogFormatError(f"{path}:1: no header row found")
        return cls(meta=meta, rows=rows)

    # -------------------------------------------------------------- summary

    def summary(self, metrics: dict | None = None) -> dict:
        """JSON-ready run summary: identity, final state, events, metrics."""
        final = self.rows[-1] if self.rows else {}
        out = {
            "scenario": self.meta.get("scenario"),
            "version": self.meta.get("version"),
            "config_hash": self.meta.get("config_hash"),
            "scenario_hash": self.meta.get("scenario_hash"),
            "ticks": len(self.rows),
            "events": [
                {"t": float(row["t"]), "event": row["event"]}
                for row in self.rows
                if row.get("event")
            ],
            "final_state": {
                key: float(final.get(key, math.nan))
                for key in ("t", "x", "y", "psi", "u", "v", "r")
            },
        }
        if metrics is not None:
            out["metrics"] = metrics
        return out

    def write_summary(self, path: str | Path, metrics: dict | None = None) -> None:
        payload = json.dumps(self.summary(metrics), indent=2, sort_keys=True, allow_nan=True)
        Path(path).write_text(payload + "\n", encoding="utf-8")
