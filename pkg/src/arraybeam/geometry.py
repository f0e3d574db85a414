"""Microphone layouts: the linear array and the five planar designs.

Every generator returns an :class:`ArrayLayout` holding an ``(N, 3)`` array of
positions in meters with ``z == 0``. Angles inside the generator formulas are
in degrees and are converted to radians only when evaluating trig functions.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np
from scipy.spatial.distance import pdist

from ._errors import GeometryError, ParameterError

FORMAT_TAG = "arraybeam/v1"
COINCIDENT_TOL = 1e-9

DESIGNS = (
    "linear",
    "concentric",
    "four_arm_spiral",
    "archimedean",
    "underbrink",
    "equi_area",
    "custom",
)


class MicPosition(NamedTuple):
    x: float
    y: float
    z: float = 0.0


@dataclass(frozen=True)
class LinearParams:
    N: int
    d: float

    def validate(self) -> None:
        _require(self.N >= 2, "N >= 2")
        _require(self.d > 0, "d > 0")


@dataclass(frozen=True)
class RingParams:
    """Two concentric rings; ``offsets`` rotate each ring (degrees)."""

    N: int
    R1: float
    R2: float
    offsets: tuple[float, float] = (0.0, 0.0)

    def validate(self) -> None:
        _require(self.N >= 2, "N >= 2")
        _require(self.N % 2 == 0, "N must be even")
        _require(0 < self.R1 < self.R2, "0 < R1 < R2")


@dataclass(frozen=True)
class FourArmSpiralParams:
    N: int
    R1: float
    R2: float

    def validate(self) -> None:
        _require(self.N % 4 == 0, "N must be divisible by 4")
        _require(self.N // 4 >= 2, "N/4 >= 2")
        _require(0 < self.R1 < self.R2, "0 < R1 < R2")


@dataclass(frozen=True)
class ArchimedeanParams:
    N: int
    R1: float
    R2: float
    phi: float  # total turn angle, degrees

    def validate(self) -> None:
        _require(self.N >= 2, "N >= 2")
        _require(0 < self.R1 < self.R2, "0 < R1 < R2")
        _require(self.phi > 0, "phi > 0")


@dataclass(frozen=True)
class UnderbrinkParams:
    Na: int
    Nm: int
    R1: float
    R2: float
    nu: float  # spiral angle, radians

    @property
    def N(self) -> int:
        return self.Na * self.Nm

    def validate(self) -> None:
        _require(self.Na >= 1, "Na >= 1")
        _require(self.Nm >= 2, "Nm >= 2")
        _require(0 < self.R1 < self.R2, "0 < R1 < R2")
        _require(0 < self.nu < math.pi / 2, "0 < nu < pi/2")
        _require(1.0 / math.tan(self.nu) != 0.0, "cot(nu) != 0")


@dataclass(frozen=True)
class EquiAreaParams:
    N: int
    N_OR: int
    R: float

    def validate(self) -> None:
        _require(1 <= self.N_OR < self.N, "1 <= N_OR < N")
        _require(self.R > 0, "R > 0")

    def ring_sizes(self) -> tuple[float, float]:
        """Radii ``(s1, s2)`` of the equal circumscribing circles."""
        sin_or = math.sin(math.pi / self.N_OR)
        s1 = self.R * sin_or / (1.0 + sin_or)
        sin_ir = math.sin(math.pi / (self.N - self.N_OR))
        s2 = (self.R - 2.0 * s1) * sin_ir / (1.0 + sin_ir)
        return s1, s2


_PARAM_TYPES = {
    "linear": LinearParams,
    "concentric": RingParams,
    "four_arm_spiral": FourArmSpiralParams,
    "archimedean": ArchimedeanParams,
    "underbrink": UnderbrinkParams,
    "equi_area": EquiAreaParams,
}


def _require(ok: bool, what: str) -> None:
    if not ok:
        raise ParameterError(f"parameter invariant violated: {what}")


@dataclass(frozen=True, eq=False)
class ArrayLayout:
    """Ordered microphone positions plus the record that generated them."""

    positions: np.ndarray
    design: str = "custom"
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        pos = np.array(self.positions, dtype=float)
        if pos.ndim == 1:
            pos = pos.reshape(1, -1)
        if pos.ndim != 2 or pos.shape[0] < 1 or pos.shape[1] not in (2, 3):
            raise GeometryError(
                f"positions must have shape (N, 2) or (N, 3), got {pos.shape}")
        if pos.shape[1] == 2:
            pos = np.column_stack([pos, np.zeros(len(pos))])
        if not np.all(np.isfinite(pos)):
            raise GeometryError("microphone coordinates must be finite")
        if np.any(pos[:, 2] != 0.0):
            raise GeometryError("microphones must lie in the z = 0 plane")
        if len(pos) > 1 and pdist(pos).min() <= COINCIDENT_TOL:
            raise GeometryError("two microphones coincide")
        if self.design not in DESIGNS:
            raise ParameterError(f"unknown design {self.design!r}")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)

    @property
    def n_mics(self) -> int:
        return len(self.positions)

    @property
    def mics(self) -> list[MicPosition]:
        return [MicPosition(*map(float, p)) for p in self.positions]

    @property
    def aperture(self) -> float:
        """Largest distance between any two microphones (0 for one mic)."""
        if self.n_mics < 2:
            return 0.0
        return float(pdist(self.positions).max())

    @property
    def is_linear(self) -> bool:
        return self.design == "linear"

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": FORMAT_TAG,
            "design": self.design,
            "params": self.params,
            "units": "m",
            "mics": self.positions.tolist(),
        }

    def to_json(self, path: str | Path | None = None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "ArrayLayout":
        try:
            mics = doc["mics"]
        except KeyError:
            raise ParameterError("layout document has no 'mics' field") from None
        return cls(np.asarray(mics, dtype=float),
                   design=doc.get("design", "custom"),
                   params=dict(doc.get("params") or {}))

    @classmethod
    def from_json(cls, path: str | Path) -> "ArrayLayout":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _polar(r, deg) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    rad = np.radians(np.asarray(deg, dtype=float))
    return np.column_stack([r * np.cos(rad), r * np.sin(rad), np.zeros(r.shape)])


def _params_dict(params) -> dict[str, Any]:
    out = asdict(params)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in out.items()}


def make_linear(params: LinearParams) -> ArrayLayout:
    """Equispaced line along +x with mic 1 at the origin."""
    params.validate()
    x = np.arange(params.N) * params.d
    pos = np.column_stack([x, np.zeros_like(x), np.zeros_like(x)])
    return ArrayLayout(pos, "linear", _params_dict(params))


def make_concentric(params: RingParams) -> ArrayLayout:
    params.validate()
    k = params.N // 2
    pitch = 360.0 * np.arange(k) / k
    inner = _polar(np.full(k, params.R1), pitch + params.offsets[0])
    outer = _polar(np.full(k, params.R2), pitch + params.offsets[1])
    return ArrayLayout(np.vstack([inner, outer]), "concentric",
                       _params_dict(params))


def make_four_arm_spiral(params: FourArmSpiralParams) -> ArrayLayout:
    params.validate()
    per_arm = params.N // 4
    frac = np.arange(per_arm) / (per_arm - 1)
    r = params.R1 + (params.R2 - params.R1) * frac
    arms = [_polar(r, head + 45.0 * frac) for head in (0.0, 90.0, 180.0, 270.0)]
    return ArrayLayout(np.vstack(arms), "four_arm_spiral", _params_dict(params))


def make_archimedean(params: ArchimedeanParams) -> ArrayLayout:
    params.validate()
    frac = np.arange(params.N) / (params.N - 1)
    r = params.R1 + (params.R2 - params.R1) * frac
    return ArrayLayout(_polar(r, params.phi * frac), "archimedean",
                       _params_dict(params))


def underbrink_radii(Nm: int, R1: float, R2: float) -> np.ndarray:
    """Radii of one arm: ``R1`` then the centres of ``Nm - 1`` equal-area annuli."""
    n = np.arange(2, Nm + 1)
    return np.concatenate([[R1], np.sqrt((2 * n - 3) / (2 * Nm - 3)) * R2])


def make_underbrink(params: UnderbrinkParams) -> ArrayLayout:
    params.validate()
    r = underbrink_radii(params.Nm, params.R1, params.R2)
    cot = 1.0 / math.tan(params.nu)
    spiral = 180.0 * np.log(r / params.R1) / (math.pi * cot)
    arms = [_polar(r, spiral + 360.0 * m / params.Na) for m in range(params.Na)]
    out = _params_dict(params)
    out["N"] = params.N
    return ArrayLayout(np.vstack(arms), "underbrink", out)


def make_equi_area(params: EquiAreaParams) -> ArrayLayout:
    """Two rings whose mics are circumscribed by circles of equal area."""
    params.validate()
    n_or = params.N_OR
    n_ir = params.N - n_or
    _require(n_or >= 2, "N_OR >= 2 (s1 = 0 for a single outer mic)")
    _require(n_ir >= 2, "N - N_OR >= 2 (s2 = 0 for a single inner mic)")
    s1, s2 = params.ring_sizes()
    r_or = params.R - s1
    r_ir = params.R - 2.0 * s1 - s2
    _require(r_ir > 0, "inner ring collapses (R_IR <= 0)")
    outer = _polar(np.full(n_or, r_or), 360.0 * np.arange(n_or) / n_or)
    inner = _polar(np.full(n_ir, r_ir), 360.0 * np.arange(n_ir) / n_ir)
    out = _params_dict(params)
    out.update(s1=s1, s2=s2, R_OR=r_or, R_IR=r_ir)
    return ArrayLayout(np.vstack([outer, inner]), "equi_area", out)


_GENERATORS = {
    "linear": make_linear,
    "concentric": make_concentric,
    "four_arm_spiral": make_four_arm_spiral,
    "archimedean": make_archimedean,
    "underbrink": make_underbrink,
    "equi_area": make_equi_area,
}


def make_layout(design: str, defaults: bool = False, **params) -> ArrayLayout:
    """Build a layout from a design tag and keyword parameters.

    With ``defaults`` any missing parameter takes its reference value from
    ``DEFAULT_PARAMS`` (the 4-mic line or the 16-mic planar designs).

    >>> make_layout("linear", N=2, d=1.0).positions[:, 0].tolist()
    [0.0, 1.0]
    """
    design = design.replace("-", "_")
    if design not in _GENERATORS:
        raise ParameterError(f"unknown design {design!r}")
    cls = _PARAM_TYPES[design]
    known = {k: v for k, v in params.items() if k in cls.__dataclass_fields__}
    if defaults:
        known = {**DEFAULT_PARAMS[design], **known}
    if "offsets" in known:
        known["offsets"] = tuple(known["offsets"])
    try:
        record = cls(**known)
    except TypeError as exc:
        raise ParameterError(f"{design}: {exc}") from None
    return _GENERATORS[design](record)


DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "linear": {"N": 4, "d": 0.2},
    "concentric": {"N": 16, "R1": 0.1, "R2": 0.5},
    "four_arm_spiral": {"N": 16, "R1": 0.1, "R2": 0.5},
    "archimedean": {"N": 16, "R1": 0.1, "R2": 0.5, "phi": 90.0},
    "underbrink": {"Na": 4, "Nm": 4, "R1": 0.1, "R2": 0.5, "nu": 5 * math.pi / 16},
    "equi_area": {"N": 16, "N_OR": 11, "R": 0.5},
}


def table1_layouts() -> dict[str, ArrayLayout]:
    """The five 16-microphone planar designs with their published parameters."""
    return {name: make_layout(name, **params)
            for name, params in DEFAULT_PARAMS.items() if name != "linear"}
