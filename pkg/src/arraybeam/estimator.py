"""scikit-learn style wrapper around the beamformer response.

``fit`` takes microphone positions, ``transform`` maps source positions to
normalised noise amplitudes and ``score`` returns the rejection factor of a
set of (optionally weighted) source points. Because it follows the estimator
API it can sit in a ``Pipeline`` or be cloned and grid-searched over
``f``, ``kind`` or the steering point.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .beamform import amplitude, normalize_kind
from .geometry import ArrayLayout
from .propagation import (
    SPEED_OF_SOUND,
    plane_wave_mic_phases,
    point_source_mic_phases,
    wavenumber,
)


class ArrayResponse(TransformerMixin, BaseEstimator):
    """Beamformer response of a planar array to point or plane-wave sources.

    Parameters
    ----------
    f : float
        Tone frequency in Hz.
    c : float
        Speed of sound in m/s.
    kind : {"conventional", "delay_and_sum"}
        Beamformer.
    focus : array-like of shape (3,) or None
        Steering point. ``None`` steers a plane wave arriving along
        ``direction``.
    direction : array-like of shape (3,)
        Steering direction used when ``focus`` is None and for plane-wave
        inputs; normalised internally.
    plane_wave : bool
        If True, rows passed to ``transform`` are arrival directions instead
        of source points.

    Attributes
    ----------
    layout_ : ArrayLayout
    n_features_in_ : int
    steer_phases_ : ndarray of shape (n_mics,)
    """

    def __init__(self, f=800.0, c=SPEED_OF_SOUND, kind="conventional",
                 focus=None, direction=(0.0, 0.0, 1.0), plane_wave=False):
        self.f = f
        self.c = c
        self.kind = kind
        self.focus = focus
        self.direction = direction
        self.plane_wave = plane_wave

    def fit(self, X, y=None):
        """Store microphone positions ``X`` of shape (n_mics, 2) or (n_mics, 3)."""
        if isinstance(X, ArrayLayout):
            layout = X
        else:
            X = check_array(X, dtype=float)
            layout = ArrayLayout(X)
        wavenumber(self.f, self.c)
        normalize_kind(self.kind)
        self.layout_ = layout
        self.n_features_in_ = 3
        if self.focus is None:
            self.steer_phases_ = plane_wave_mic_phases(
                layout, self._unit(self.direction), self.f, self.c)[0]
        else:
            point = np.asarray(self.focus, dtype=float).reshape(3)
            self.steer_phases_ = point_source_mic_phases(
                layout, point, self.f, self.c)[0]
        return self

    @staticmethod
    def _unit(v):
        v = np.asarray(v, dtype=float).reshape(-1, 3)
        return v / np.linalg.norm(v, axis=1)[:, None]

    def transform(self, X):
        """Normalised amplitude for each source row, shape (n_sources, 1)."""
        check_is_fitted(self, "layout_")
        X = check_array(X, dtype=float)
        if X.shape[1] != 3:
            raise ValueError(f"expected 3 columns (x, y, z), got {X.shape[1]}")
        if self.plane_wave:
            prop = plane_wave_mic_phases(self.layout_, self._unit(X), self.f, self.c)
        else:
            prop = point_source_mic_phases(self.layout_, X, self.f, self.c)
        values = amplitude(prop - self.steer_phases_, self.kind)
        return np.clip(values, 0.0, 1.0).reshape(-1, 1)

    def score(self, X, y=None, sample_weight=None):
        """Rejection factor ``1 - weighted mean amplitude`` over the rows of ``X``."""
        values = self.transform(X)[:, 0]
        return float(1.0 - np.average(values, weights=sample_weight))
