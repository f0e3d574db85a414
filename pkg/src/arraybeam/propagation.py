"""Phase differences seen by the microphones.

Two propagation models are supported: the 1-D plane wave hitting a line of
equispaced microphones, and the 3-D point source whose phase at each mic is
``2*pi*f/c`` times the source-to-mic distance. Far-field directions are the
plane-wave limit of a point source on a large dome.

Phases are never wrapped to ``[0, 2*pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ._errors import ContractError, GeometryError, ParameterError
from .geometry import COINCIDENT_TOL, ArrayLayout

SPEED_OF_SOUND = 343.0
DOME_CONVENTIONS = ("azel", "polar")


def wavenumber(f: float, c: float = SPEED_OF_SOUND) -> float:
    """``2*pi*f/c`` after checking that both are positive."""
    if not f > 0:
        raise ParameterError(f"frequency must be positive, got {f}")
    if not c > 0:
        raise ParameterError(f"speed of sound must be positive, got {c}")
    return 2.0 * math.pi * f / c


def _check_angle(name: str, value: float) -> float:
    value = float(value)
    if not -math.pi / 2 - 1e-12 <= value <= math.pi / 2 + 1e-12:
        raise ParameterError(f"{name} must lie in [-pi/2, pi/2], got {value}")
    return value


@dataclass(frozen=True)
class LinearTarget:
    """Desired plane-wave direction for a line array (radians from broadside)."""

    theta_o: float = 0.0

    def __post_init__(self):
        _check_angle("theta_o", self.theta_o)


@dataclass(frozen=True)
class FarFieldTarget:
    """Desired dome direction.

    With ``radius=None`` the steering phases are the plane-wave limit; with a
    finite radius they are the point-source phases of the dome point itself.
    """

    alpha: float = 0.0
    beta: float = 0.0
    radius: float | None = None
    convention: str = "azel"

    def __post_init__(self):
        _check_angle("alpha", self.alpha)
        _check_angle("beta", self.beta)
        if self.radius is not None and not self.radius > 0:
            raise ParameterError("far-field target radius must be positive")
        if self.convention not in DOME_CONVENTIONS:
            raise ParameterError(f"unknown dome convention {self.convention!r}")

    @property
    def direction(self) -> np.ndarray:
        return dome_direction(self.alpha, self.beta, self.convention)


@dataclass(frozen=True)
class NearFieldTarget:
    """Desired focus point (meters)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.1

    @property
    def point(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


SteeringTarget = Union[LinearTarget, FarFieldTarget, NearFieldTarget]


def dome_direction(alpha, beta, convention: str = "azel") -> np.ndarray:
    """Unit vector(s) pointing from the array centre to dome angle ``(alpha, beta)``.

    ``"azel"``: ``alpha`` swings in the x-z plane, ``beta`` tilts out of it
    towards +y, ``(x, y, z) = (cos b sin a, sin b, cos b cos a)``.
    ``"polar"``: ``alpha`` is the polar angle from +z and ``beta`` the azimuth
    in the array plane, ``(sin a cos b, sin a sin b, cos a)``.

    Both map ``(0, 0)`` to ``+z`` and cover the upper hemisphere once as
    ``alpha, beta`` range over ``[-pi/2, pi/2]``.
    """
    a = np.asarray(alpha, dtype=float)
    b = np.asarray(beta, dtype=float)
    if convention == "azel":
        u = np.stack([np.cos(b) * np.sin(a), np.sin(b) * np.ones_like(a),
                      np.cos(b) * np.cos(a)], axis=-1)
    elif convention == "polar":
        u = np.stack([np.sin(a) * np.cos(b), np.sin(a) * np.sin(b),
                      np.cos(a) * np.ones_like(b)], axis=-1)
    else:
        raise ParameterError(f"unknown dome convention {convention!r}")
    return u


def pairwise(per_mic: np.ndarray) -> np.ndarray:
    """Turn per-mic phases ``p`` into the matrix ``p[..., i] - p[..., j]``."""
    per_mic = np.asarray(per_mic, dtype=float)
    return per_mic[..., :, None] - per_mic[..., None, :]


# -- 1-D plane wave --------------------------------------------------------

def linear_phase(i: int, theta: float, f: float, c: float, d: float) -> float:
    """Phase lag of mic ``i`` (1-based) relative to mic 1 on a line array."""
    if i < 1:
        raise ParameterError("microphone index is 1-based")
    return (i - 1) * wavenumber(f, c) * d * math.sin(theta)


def linear_mic_phases(theta, f: float, c: float, d: float, N: int) -> np.ndarray:
    """Per-mic phases, shape ``theta.shape + (N,)``."""
    k = wavenumber(f, c)
    s = np.sin(np.asarray(theta, dtype=float))
    return k * d * s[..., None] * np.arange(N)


def linear_pairwise_phases(theta: float, f: float, c: float, d: float,
                           N: int) -> np.ndarray:
    if N < 2:
        raise ParameterError("N >= 2")
    idx = np.arange(N)
    return (idx[:, None] - idx[None, :]) * wavenumber(f, c) * d * math.sin(theta)


# -- 3-D point source ------------------------------------------------------

def path_lengths(positions: np.ndarray, sources: np.ndarray) -> np.ndarray:
    """Distances from each source to each mic, shape ``(M, N)``."""
    src = np.atleast_2d(np.asarray(sources, dtype=float))
    diff = src[:, None, :] - positions[None, :, :]
    dist = np.sqrt(np.einsum("mnk,mnk->mn", diff, diff))
    if np.any(dist <= COINCIDENT_TOL):
        raise GeometryError("source point coincides with a microphone")
    return dist


def point_source_mic_phases(layout: ArrayLayout, sources, f: float,
                            c: float = SPEED_OF_SOUND) -> np.ndarray:
    return wavenumber(f, c) * path_lengths(layout.positions, sources)


def plane_wave_mic_phases(layout: ArrayLayout, directions, f: float,
                          c: float = SPEED_OF_SOUND) -> np.ndarray:
    """Far-field limit: path length ``R - p_i . u`` with the constant dropped."""
    u = np.atleast_2d(np.asarray(directions, dtype=float))
    return -wavenumber(f, c) * (u @ layout.positions.T)


def point_source_phases(layout: ArrayLayout, source, f: float,
                        c: float = SPEED_OF_SOUND) -> np.ndarray:
    """``N x N`` matrix ``k * (l_i - l_j)`` for a single source point."""
    return pairwise(point_source_mic_phases(layout, source, f, c)[0])


# -- steering ----------------------------------------------------------------

def steering_mic_phases(layout: ArrayLayout, target: SteeringTarget, f: float,
                        c: float = SPEED_OF_SOUND) -> np.ndarray:
    """Per-mic phases of the desired direction or focus point."""
    if isinstance(target, LinearTarget):
        d = linear_spacing(layout)
        return linear_mic_phases(target.theta_o, f, c, d, layout.n_mics)
    if isinstance(target, NearFieldTarget):
        return point_source_mic_phases(layout, target.point, f, c)[0]
    if isinstance(target, FarFieldTarget):
        if target.radius is None:
            return plane_wave_mic_phases(layout, target.direction, f, c)[0]
        point = target.radius * target.direction
        return point_source_mic_phases(layout, point, f, c)[0]
    raise ContractError(f"unsupported steering target {target!r}")


def steering_phases(layout: ArrayLayout, target: SteeringTarget, f: float,
                    c: float = SPEED_OF_SOUND) -> np.ndarray:
    return pairwise(steering_mic_phases(layout, target, f, c))


def finite_steering_point(target: SteeringTarget) -> np.ndarray:
    """Steering point for routines that need a finite location."""
    if isinstance(target, NearFieldTarget):
        return target.point
    if isinstance(target, FarFieldTarget) and target.radius is not None:
        return target.radius * target.direction
    raise ContractError(f"{type(target).__name__} has no finite location")


def linear_spacing(layout: ArrayLayout) -> float:
    """Spacing of an equispaced line of mics along +x starting at the origin."""
    pos = layout.positions
    if layout.n_mics < 2:
        return 1.0
    x = pos[:, 0]
    d = x[1] - x[0]
    expected = np.arange(layout.n_mics) * d
    if (np.any(pos[:, 1:] != 0.0) or d <= 0
            or not np.allclose(x, expected, rtol=0, atol=1e-12 * max(1.0, abs(x[-1])))):
        raise ContractError(
            "1-D plane-wave model needs an equispaced line of mics along +x")
    return float(d)
