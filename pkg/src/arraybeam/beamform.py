"""Delay-and-sum and conventional beamformer amplitudes.

For unit-amplitude tones the mean of ``N`` sinusoids ``sin(x + psi_i)`` is
again a sinusoid whose amplitude is ``|mean(exp(1j * psi))|``, so no time
sampling is needed. The conventional (pairwise) beamformer sums
``sin(x + psi_i - psi_j)`` over all ``N**2`` pairs; when the offsets come from
per-mic phases this collapses to the squared delay-and-sum amplitude.
"""

from __future__ import annotations

import numpy as np

from ._errors import ContractError, ParameterError
from .geometry import ArrayLayout
from .propagation import (
    SPEED_OF_SOUND,
    FarFieldTarget,
    LinearTarget,
    NearFieldTarget,
    SteeringTarget,
    dome_direction,
    linear_mic_phases,
    linear_spacing,
    plane_wave_mic_phases,
    point_source_mic_phases,
    steering_mic_phases,
)

KINDS = ("delay_and_sum", "conventional")
_ALIASES = {"das": "delay_and_sum", "delay-and-sum": "delay_and_sum",
            "delay_and_sum": "delay_and_sum", "conventional": "conventional",
            "cbf": "conventional"}


def normalize_kind(kind: str) -> str:
    try:
        return _ALIASES[str(kind).lower()]
    except KeyError:
        raise ParameterError(
            f"unknown beamformer kind {kind!r}; expected one of {KINDS}") from None


def das_amplitude(offsets) -> np.ndarray | float:
    """Amplitude of the mean of unit sinusoids with phase offsets ``offsets``.

    The last axis indexes microphones; leading axes are broadcast, so a
    ``(M, N)`` array yields ``M`` amplitudes.
    """
    psi = np.asarray(offsets, dtype=float)
    if psi.ndim == 0 or psi.shape[-1] == 0:
        raise ContractError("need at least one phase offset")
    amp = np.abs(np.exp(1j * psi).mean(axis=-1))
    return float(amp) if amp.ndim == 0 else amp


def conventional_amplitude(offsets, atol: float = 1e-9) -> float:
    """Amplitude of ``(1/N**2) * sum_ij sin(x + D_ij)`` for antisymmetric ``D``.

    Antisymmetry makes the imaginary parts cancel pairwise, leaving
    ``|sum_ij cos(D_ij)| / N**2``.
    """
    delta = np.asarray(offsets, dtype=float)
    if delta.ndim != 2 or delta.shape[0] != delta.shape[1] or delta.shape[0] == 0:
        raise ContractError("conventional offsets must be a non-empty square matrix")
    scale = max(1.0, float(np.abs(delta).max()))
    if not np.allclose(delta, -delta.T, rtol=0.0, atol=atol * scale):
        raise ContractError("conventional offsets must be antisymmetric")
    n = delta.shape[0]
    return float(abs(np.cos(delta).sum()) / n**2)


def conventional_from_mic_offsets(offsets) -> np.ndarray | float:
    """Fast path: pairwise offsets ``psi_i - psi_j`` give ``das_amplitude(psi)**2``."""
    amp = das_amplitude(offsets)
    return amp * amp


def amplitude(offsets, kind: str):
    """Beamformer amplitude from per-mic offsets for either kind."""
    if normalize_kind(kind) == "conventional":
        return conventional_from_mic_offsets(offsets)
    return das_amplitude(offsets)


def signal_amplitude(kind: str) -> float:
    """Amplitude for a source at the steering target; always the normaliser 1."""
    normalize_kind(kind)
    return 1.0


def response_at(layout: ArrayLayout, kind: str, target: SteeringTarget, source,
                f: float, c: float = SPEED_OF_SOUND) -> float:
    """Normalised noise amplitude for a single source.

    ``source`` is an angle (radians) with a :class:`LinearTarget`, a unit
    direction or ``(alpha, beta)`` pair with a plane-wave
    :class:`FarFieldTarget`, and a 3-D point otherwise.
    """
    steer = steering_mic_phases(layout, target, f, c)
    if isinstance(target, LinearTarget):
        if np.size(source) != 1:
            raise ContractError("a line-array target needs a scalar source angle")
        theta = float(np.asarray(source).reshape(()))
        prop = linear_mic_phases(theta, f, c, linear_spacing(layout), layout.n_mics)
    elif isinstance(target, FarFieldTarget) and target.radius is None:
        src = np.asarray(source, dtype=float).reshape(-1)
        if src.size == 2:
            src = dome_direction(src[0], src[1], target.convention)
        prop = plane_wave_mic_phases(layout, src, f, c)[0]
    elif isinstance(target, (FarFieldTarget, NearFieldTarget)):
        src = np.asarray(source, dtype=float).reshape(-1)
        if src.size != 3:
            raise ContractError("a finite steering target needs a 3-D source point")
        prop = point_source_mic_phases(layout, src, f, c)[0]
    else:
        raise ContractError(f"unsupported steering target {target!r}")
    return float(amplitude(prop - steer, kind))
