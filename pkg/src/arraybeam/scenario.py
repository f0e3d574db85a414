"""A single beamforming scenario: layout, beamformer, target, tone and field."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any

from ._errors import ParameterError
from .geometry import ArrayLayout
from .metrics import RejectionReport, ResponseMap, rejection_factor, response_map
from .propagation import (
    SPEED_OF_SOUND,
    FarFieldTarget,
    LinearTarget,
    NearFieldTarget,
    SteeringTarget,
)
from .sources import (
    DEFAULT_DOME_RADIUS,
    SourceGrid,
    disk_grid,
    dome_grid,
    sweep_1d,
)

FIELDS = ("sweep1d", "dome", "disk")

DEFAULT_THETA_STEP = math.radians(0.01)
DEFAULT_DOME_STEP = math.radians(0.25)
DEFAULT_DISK_DIVISIONS = 200


@dataclass(frozen=True)
class Scenario:
    """Everything needed to evaluate one response map.

    ``step`` is the grid step in the field's own unit (radians for the sweep
    and the dome, meters for the disk); ``None`` selects the default.
    """

    layout: ArrayLayout
    f: float
    field: str = "dome"
    kind: str = "conventional"
    target: SteeringTarget | None = None
    c: float = SPEED_OF_SOUND
    step: float | None = None
    dome_radius: float = DEFAULT_DOME_RADIUS
    dome_convention: str = "azel"
    plane_wave: bool = False
    Rs: float = 2.0
    Hs: float = 0.1
    disk_scheme: str = "polar"

    def __post_init__(self):
        if self.field not in FIELDS:
            raise ParameterError(f"unknown field {self.field!r}; use {FIELDS}")
        if self.target is None:
            object.__setattr__(self, "target", self.default_target())
        if self.field == "sweep1d" and not isinstance(self.target, LinearTarget):
            raise ParameterError("a 1-D sweep needs a linear steering target")
        if self.field != "sweep1d" and isinstance(self.target, LinearTarget):
            raise ParameterError(f"a linear target cannot steer a {self.field} field")

    def default_target(self) -> SteeringTarget:
        if self.field == "sweep1d":
            return LinearTarget(0.0)
        if self.field == "dome":
            return FarFieldTarget(0.0, 0.0, convention=self.dome_convention)
        return NearFieldTarget(0.0, 0.0, self.Hs)

    @property
    def default_step(self) -> float:
        if self.field == "sweep1d":
            return DEFAULT_THETA_STEP
        if self.field == "dome":
            return DEFAULT_DOME_STEP
        return self.Rs / DEFAULT_DISK_DIVISIONS

    def grid(self, step: float | None = None) -> SourceGrid:
        step = step or self.step or self.default_step
        if self.field == "sweep1d":
            return sweep_1d(step)
        if self.field == "dome":
            return dome_grid(step, step, self.dome_radius, self.dome_convention)
        return disk_grid(self.Rs, self.Hs, step, self.disk_scheme)

    def with_(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def response(self, step: float | None = None,
                 threads: int | None = None) -> ResponseMap:
        return response_map(self.layout, self.kind, self.target, self.grid(step),
                            self.f, self.c, self.plane_wave, threads)

    def report(self, step: float | None = None,
               threads: int | None = None) -> RejectionReport:
        return rejection_factor(self.response(step, threads))

    def rf(self, step: float | None = None, threads: int | None = None) -> float:
        return self.report(step, threads).rf

    def describe(self) -> dict[str, Any]:
        out = {"field": self.field, "f": self.f, "c": self.c, "kind": self.kind,
               "design": self.layout.design}
        if self.field == "dome":
            out.update(dome_radius=self.dome_radius,
                       dome_convention=self.dome_convention,
                       plane_wave=self.plane_wave)
        if self.field == "disk":
            out.update(Rs=self.Rs, Hs=self.Hs, disk_scheme=self.disk_scheme)
        return out
