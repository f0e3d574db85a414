"""Discretised source fields with midpoint quadrature weights.

Each grid stores its nodes in a fixed order together with weights that sum
to one, so the field average of any per-node quantity is ``weights @ values``.
Structured grids also keep ``shape`` and ``image_index`` so that node values
can be laid out as an image for neighbourhood searches.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from ._errors import ParameterError
from .geometry import FORMAT_TAG
from .propagation import DOME_CONVENTIONS, dome_direction

DEFAULT_DOME_RADIUS = 100.0
DISK_SCHEMES = ("polar", "cartesian")


@dataclass(frozen=True, eq=False)
class SourceGrid:
    """Common node container.

    ``coords`` are the grid's own parameters (angles or in-plane positions),
    ``points`` the 3-D source positions (``None`` for the 1-D sweep).
    ``image_index[k]`` is the flat position of node ``k`` in an image of
    shape ``shape``; ``periodic`` flags image axes that wrap around.
    """

    kind: str
    coords: np.ndarray
    weights: np.ndarray
    points: np.ndarray | None
    shape: tuple[int, ...]
    image_index: np.ndarray
    coord_names: tuple[str, ...]
    step: float
    periodic: tuple[bool, ...] = ()
    meta: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.weights)

    def to_image(self, values, fill: float = np.nan) -> np.ndarray:
        img = np.full(int(np.prod(self.shape)), fill, dtype=float)
        img[self.image_index] = values
        return img.reshape(self.shape)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {FORMAT_TAG} grid={self.kind} step={self.step!r}\n")
        writer = csv.writer(buf, lineterminator="\n")
        cols = list(self.coord_names)
        if self.points is not None:
            cols += ["x", "y", "z"]
        writer.writerow(cols + ["weight"])
        for k in range(len(self)):
            row = [repr(float(v)) for v in self.coords[k]]
            if self.points is not None:
                row += [repr(float(v)) for v in self.points[k]]
            writer.writerow(row + [repr(float(self.weights[k]))])
        return buf.getvalue()


def _midpoints(lo: float, hi: float, n: int) -> np.ndarray:
    h = (hi - lo) / n
    return lo + (np.arange(n) + 0.5) * h


def _cells(span: float, step: float, name: str) -> int:
    if not step > 0 or not math.isfinite(step):
        raise ParameterError(f"{name} must be positive, got {step}")
    return max(1, int(round(span / step)))


def sweep_1d(theta_step: float) -> SourceGrid:
    """Midpoint nodes over ``[-pi/2, pi/2]``; weights carry the ``1/pi`` factor."""
    if not theta_step > 0:
        raise ParameterError(f"theta_step must be positive, got {theta_step}")
    if theta_step > math.pi / 2 + 1e-15:
        raise ParameterError("theta_step must not exceed pi/2")
    n = _cells(math.pi, theta_step, "theta_step")
    theta = _midpoints(-math.pi / 2, math.pi / 2, n)
    return SourceGrid(
        kind="sweep1d",
        coords=theta[:, None],
        weights=np.full(n, 1.0 / n),
        points=None,
        shape=(n,),
        image_index=np.arange(n),
        coord_names=("theta",),
        step=math.pi / n,
    )


def dome_grid(alpha_step: float, beta_step: float | None = None,
              radius: float = DEFAULT_DOME_RADIUS,
              convention: str = "azel") -> SourceGrid:
    """Uniform ``(alpha, beta)`` rectangle on the dome, ``1/pi**2`` normalised."""
    beta_step = alpha_step if beta_step is None else beta_step
    if not radius > 0:
        raise ParameterError(f"dome radius must be positive, got {radius}")
    if convention not in DOME_CONVENTIONS:
        raise ParameterError(f"unknown dome convention {convention!r}")
    na = _cells(math.pi, alpha_step, "alpha_step")
    nb = _cells(math.pi, beta_step, "beta_step")
    alpha = _midpoints(-math.pi / 2, math.pi / 2, na)
    beta = _midpoints(-math.pi / 2, math.pi / 2, nb)
    A, B = np.meshgrid(alpha, beta, indexing="ij")
    coords = np.column_stack([A.ravel(), B.ravel()])
    points = radius * dome_direction(coords[:, 0], coords[:, 1], convention)
    m = na * nb
    return SourceGrid(
        kind="dome",
        coords=coords,
        weights=np.full(m, 1.0 / m),
        points=points,
        shape=(na, nb),
        image_index=np.arange(m),
        coord_names=("alpha", "beta"),
        step=math.pi / na,
        meta={"radius": float(radius), "convention": convention,
              "beta_step": math.pi / nb},
    )


def disk_grid(Rs: float, Hs: float, ds: float, scheme: str = "polar") -> SourceGrid:
    """Disk of radius ``Rs`` at height ``Hs`` sampled with pitch ``ds``.

    ``"cartesian"`` keeps the lattice points ``(i*ds, j*ds)`` inside the disk,
    each standing for one ``ds x ds`` cell; the average is over the retained
    cells. ``"polar"`` uses midpoint nodes on a uniform ``(r, angle)``
    rectangle with radial pitch ``ds`` and an even number of angles giving
    arc pitch ``ds`` on the rim, averaged with equal weights (no ``r``
    factor).
    """
    for name, v in (("Rs", Rs), ("Hs", Hs), ("ds", ds)):
        if not v > 0:
            raise ParameterError(f"{name} must be positive, got {v}")
    if ds >= Rs:
        raise ParameterError("ds must be smaller than Rs")
    if scheme == "cartesian":
        half = int(math.floor(Rs / ds + 1e-9))
        axis = np.arange(-half, half + 1) * ds
        X, Y = np.meshgrid(axis, axis, indexing="ij")
        inside = (X**2 + Y**2 <= Rs**2 * (1 + 1e-12)).ravel()
        coords = np.column_stack([X.ravel(), Y.ravel()])[inside]
        shape = (len(axis), len(axis))
        image_index = np.flatnonzero(inside)
        names = ("xs", "ys")
        periodic = (False, False)
        xy = coords
    elif scheme == "polar":
        nr = _cells(Rs, ds, "ds")
        nt = 2 * max(2, int(round(math.pi * Rs / ds)))
        r = _midpoints(0.0, Rs, nr)
        t = _midpoints(-math.pi, math.pi, nt)
        Rg, Tg = np.meshgrid(r, t, indexing="ij")
        coords = np.column_stack([Rg.ravel(), Tg.ravel()])
        shape = (nr, nt)
        image_index = np.arange(nr * nt)
        names = ("r", "angle")
        periodic = (False, True)
        xy = np.column_stack([coords[:, 0] * np.cos(coords[:, 1]),
                              coords[:, 0] * np.sin(coords[:, 1])])
    else:
        raise ParameterError(f"unknown disk scheme {scheme!r}; use {DISK_SCHEMES}")
    m = len(coords)
    points = np.column_stack([xy, np.full(m, float(Hs))])
    meta = {"Rs": float(Rs), "Hs": float(Hs), "scheme": scheme}
    if scheme == "cartesian":
        meta["area"] = m * ds * ds
    return SourceGrid(
        kind="disk",
        coords=coords,
        weights=np.full(m, 1.0 / m),
        points=points,
        shape=shape,
        image_index=image_index,
        coord_names=names,
        step=float(ds),
        periodic=periodic,
        meta=meta,
    )
