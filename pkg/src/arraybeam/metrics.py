"""Response maps and the rejection metrics derived from them.

The rejection factor is one minus the field average of the normalised noise
amplitude; the rejection percentage is ``100 * rf`` and the signal-to-noise
ratio is ``-20 log10(1 - rf)`` dB.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from ._errors import ContractError
from ._parallel import ordered_map
from .beamform import amplitude, normalize_kind
from .geometry import FORMAT_TAG, ArrayLayout
from .propagation import (
    SPEED_OF_SOUND,
    FarFieldTarget,
    LinearTarget,
    NearFieldTarget,
    SteeringTarget,
    linear_mic_phases,
    linear_spacing,
    plane_wave_mic_phases,
    point_source_mic_phases,
    steering_mic_phases,
)
from .sources import SourceGrid

DB_FLOOR_AMPLITUDE = 1e-12
DB_FLOOR = -240.0
CHUNK = 1 << 15


@dataclass(frozen=True, eq=False)
class ResponseMap:
    grid: SourceGrid
    values: np.ndarray
    scenario: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != len(self.grid):
            raise ContractError("response values do not match the grid size")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def db(self) -> np.ndarray:
        """``20 log10`` of the amplitudes, floored at -240 dB."""
        v = np.maximum(self.values, DB_FLOOR_AMPLITUDE)
        return np.maximum(20.0 * np.log10(v), DB_FLOOR)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {FORMAT_TAG} response_map grid={self.grid.kind}\n")
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(self.grid.coord_names)
        pts = self.grid.points
        if pts is not None:
            cols += ["x", "y", "z"]
        writer.writerow(cols + ["amplitude", "db"])
        db = self.db
        for k in range(len(self)):
            row = [repr(float(v)) for v in self.grid.coords[k]]
            if pts is not None:
                row += [repr(float(v)) for v in pts[k]]
            row += [repr(float(self.values[k])), repr(float(db[k]))]
            writer.writerow(row)
        return buf.getvalue()


@dataclass(frozen=True)
class RejectionReport:
    rf: float
    scenario: dict[str, Any] = field(default_factory=dict)

    @property
    def rp(self) -> float:
        return 100.0 * self.rf

    @property
    def snr_db(self) -> float:
        return snr_from_rf(self.rf)

    def to_dict(self) -> dict[str, Any]:
        snr = self.snr_db
        return {
            "format": FORMAT_TAG,
            "rf": self.rf,
            "rp": self.rp,
            "snr_db": snr if math.isfinite(snr) else "inf",
            "scenario": self.scenario,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def snr_from_rf(rf: float) -> float:
    """``-20 log10(1 - rf)``; ``inf`` for perfect rejection."""
    rf = float(rf)
    if not 0.0 <= rf <= 1.0:
        raise ContractError(f"rf must lie in [0, 1], got {rf}")
    if rf == 1.0:
        return math.inf
    return -20.0 * math.log10(1.0 - rf)


def rf_from_snr(snr_db: float) -> float:
    return 1.0 - 10.0 ** (-snr_db / 20.0)


def rejection_factor(rmap: ResponseMap) -> RejectionReport:
    if len(rmap) == 0:
        raise ContractError("cannot integrate an empty response map")
    mean = float(np.sum(rmap.grid.weights * rmap.values))
    rf = min(1.0, max(0.0, 1.0 - mean))
    scenario = dict(rmap.scenario)
    scenario.setdefault("grid", grid_descriptor(rmap.grid))
    return RejectionReport(rf, scenario)


def grid_descriptor(grid: SourceGrid) -> dict[str, Any]:
    out = {"field": grid.kind, "step": grid.step, "nodes": len(grid)}
    out.update(grid.meta)
    return out


def _resolve_target(target: SteeringTarget, grid: SourceGrid,
                    plane_wave: bool) -> SteeringTarget:
    if grid.kind == "sweep1d":
        if not isinstance(target, LinearTarget):
            raise ContractError("a 1-D sweep needs a LinearTarget")
        return target
    if isinstance(target, LinearTarget):
        raise ContractError(f"a LinearTarget cannot steer a {grid.kind} field")
    if isinstance(target, FarFieldTarget) and grid.kind == "dome":
        radius = None if plane_wave else grid.meta["radius"]
        return replace(target, radius=radius, convention=grid.meta["convention"])
    return target


def response_values(layout: ArrayLayout, kind: str, target: SteeringTarget,
                    grid: SourceGrid, f: float, c: float = SPEED_OF_SOUND,
                    plane_wave: bool = False,
                    threads: int | None = None) -> np.ndarray:
    """Per-node normalised noise amplitudes, in grid order."""
    kind = normalize_kind(kind)
    target = _resolve_target(target, grid, plane_wave)
    steer = steering_mic_phases(layout, target, f, c)
    if grid.kind == "sweep1d":
        d = linear_spacing(layout)
        theta = grid.coords[:, 0]
        def phases(sl):
            return linear_mic_phases(theta[sl], f, c, d, layout.n_mics)
    elif plane_wave and grid.kind == "dome":
        directions = grid.points / grid.meta["radius"]
        def phases(sl):
            return plane_wave_mic_phases(layout, directions[sl], f, c)
    else:
        def phases(sl):
            return point_source_mic_phases(layout, grid.points[sl], f, c)

    def chunk(sl):
        return amplitude(phases(sl) - steer, kind)

    slices = [slice(i, i + CHUNK) for i in range(0, len(grid), CHUNK)]
    values = np.concatenate(ordered_map(chunk, slices, threads))
    return np.clip(values, 0.0, 1.0)


def response_map(layout: ArrayLayout, kind: str, target: SteeringTarget,
                 grid: SourceGrid, f: float, c: float = SPEED_OF_SOUND,
                 plane_wave: bool = False,
                 threads: int | None = None) -> ResponseMap:
    values = response_values(layout, kind, target, grid, f, c, plane_wave, threads)
    scenario = {
        "design": layout.design,
        "n_mics": layout.n_mics,
        "kind": normalize_kind(kind),
        "target": target_descriptor(target),
        "f": float(f),
        "c": float(c),
        "plane_wave": bool(plane_wave),
        "grid": grid_descriptor(grid),
    }
    return ResponseMap(grid, values, scenario)


def target_descriptor(target: SteeringTarget) -> dict[str, Any]:
    if isinstance(target, LinearTarget):
        return {"type": "linear", "theta_o": target.theta_o}
    if isinstance(target, FarFieldTarget):
        return {"type": "far_field", "alpha": target.alpha, "beta": target.beta,
                "convention": target.convention}
    if isinstance(target, NearFieldTarget):
        return {"type": "near_field", "point": target.point.tolist()}
    raise ContractError(f"unsupported steering target {target!r}")


def eta(theta: float, layout: ArrayLayout, target: LinearTarget, f: float,
        c: float = SPEED_OF_SOUND, kind: str = "delay_and_sum") -> float:
    """Rejection at one plane-wave angle: ``1 - |v_noise| / |v_signal|``."""
    d = linear_spacing(layout)
    psi = (linear_mic_phases(theta, f, c, d, layout.n_mics)
           - steering_mic_phases(layout, target, f, c))
    return 1.0 - float(amplitude(psi, kind))
