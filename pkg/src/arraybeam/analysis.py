"""Grid convergence, the non-dimensional G parameter and G-sweeps.

``G = N f d / c`` collapses the line array's rejection onto a single curve.
For the equi-area array in the near field the same role is played by

    G = (N f R / c) * (a + b log Rs) / sqrt(1 + d_fit Hs**2)

with fitted constants ``(a, b, d_fit)``. Sweeps move along G by varying the
frequency with every other parameter held fixed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from scipy import ndimage, optimize

from ._errors import ContractError, FitError, ParameterError
from ._parallel import ordered_map
from .geometry import FORMAT_TAG, EquiAreaParams, LinearParams, make_equi_area, make_linear
from .metrics import ResponseMap
from .propagation import (
    SPEED_OF_SOUND,
    FarFieldTarget,
    LinearTarget,
    NearFieldTarget,
    SteeringTarget,
    dome_direction,
)
from .scenario import Scenario

DEFAULT_EPS = 1e-3
DEFAULT_SCHEDULE_DEG = (1.0, 0.5, 0.1, 0.05, 0.01, 0.005)
DEFAULT_FIT = (1.0, 2.0, 34.0)
LOG_BASES = {"e": math.log, "10": math.log10}


# -- convergence -------------------------------------------------------------

@dataclass
class ConvergenceStudy:
    schedule: list[float]
    rf: list[float]
    eps: float
    converged_step: float | None
    absolute: bool = False

    @property
    def rp(self) -> list[float]:
        return [100.0 * v for v in self.rf]

    @property
    def changes(self) -> list[float]:
        """Relative (or absolute, when flagged) change for each refinement."""
        out = []
        for prev, cur in zip(self.rf, self.rf[1:]):
            delta = abs(cur - prev)
            out.append(delta if prev == 0 else delta / abs(prev))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {FORMAT_TAG} convergence eps={self.eps!r} "
                  f"converged_step={self.converged_step!r}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step", "rf", "rp", "change"])
        changes = [""] + [repr(v) for v in self.changes]
        for s, rf, ch in zip(self.schedule, self.rf, changes):
            writer.writerow([repr(s), repr(rf), repr(100.0 * rf), ch])
        return buf.getvalue()


def converge_rf(evaluate: Callable[[float], float] | Scenario,
                schedule: Sequence[float], eps: float = DEFAULT_EPS,
                exhaust: bool = False) -> ConvergenceStudy:
    """Refine the grid step until ``|RF_{i+1} - RF_i| / RF_i <= eps``.

    ``evaluate`` maps a step to RF (a :class:`Scenario` is accepted directly).
    With ``exhaust`` the whole schedule is evaluated even after convergence;
    the converged step is still the first one meeting the criterion. A zero
    RF switches that comparison to the absolute change and sets ``absolute``.
    """
    schedule = [float(s) for s in schedule]
    if len(schedule) < 2:
        raise ParameterError("a convergence schedule needs at least two steps")
    if any(b >= a for a, b in zip(schedule, schedule[1:])):
        raise ParameterError("convergence schedule must be strictly decreasing")
    if not eps > 0:
        raise ParameterError("eps must be positive")
    fn = evaluate.rf if isinstance(evaluate, Scenario) else evaluate

    rfs = [fn(schedule[0])]
    converged = None
    absolute = False
    for step in schedule[1:]:
        rfs.append(fn(step))
        prev, cur = rfs[-2], rfs[-1]
        if prev == 0:
            absolute = True
            ok = abs(cur - prev) <= eps
        else:
            ok = abs(cur - prev) / abs(prev) <= eps
        if ok and converged is None:
            converged = step
            if not exhaust:
                break
    return ConvergenceStudy(schedule[:len(rfs)], rfs, eps, converged, absolute)


# -- G parameter ---------------------------------------------------------------

@dataclass(frozen=True)
class FitConstants:
    a_fit: float = DEFAULT_FIT[0]
    b_fit: float = DEFAULT_FIT[1]
    d_fit: float = DEFAULT_FIT[2]
    log_base: str = "10"

    def __post_init__(self):
        if self.log_base not in LOG_BASES:
            raise ParameterError(f"log_base must be one of {tuple(LOG_BASES)}")
        if not all(map(math.isfinite, (self.a_fit, self.b_fit, self.d_fit))):
            raise ParameterError("fit constants must be finite")
        if self.d_fit < 0:
            raise ParameterError("d_fit must be non-negative")

    def shape_factor(self, Rs: float, Hs: float) -> float:
        """``(a + b log Rs) / sqrt(1 + d Hs**2)``."""
        log = LOG_BASES[self.log_base]
        return (self.a_fit + self.b_fit * log(Rs)) / math.sqrt(1.0 + self.d_fit * Hs**2)


def g_linear(N: int, f: float, d: float, c: float = SPEED_OF_SOUND) -> float:
    if min(N, f, d, c) <= 0:
        raise ParameterError("N, f, d and c must all be positive")
    return N * f * d / c


def g_equi_area_near(N: int, f: float, R: float, c: float, Rs: float, Hs: float,
                     fit: FitConstants = FitConstants()) -> float:
    if min(N, f, R, c, Rs) <= 0 or Hs < 0:
        raise ParameterError("N, f, R, c and Rs must be positive and Hs >= 0")
    return N * f * R / c * fit.shape_factor(Rs, Hs)


def fit_g_constants(samples: Iterable[Sequence[float]], log_base: str = "10",
                    d_max: float = 1e4) -> FitConstants:
    """Least-squares ``(a, b, d_fit)`` from ``(N, f, R, c, Rs, Hs, G)`` rows.

    For a fixed ``d_fit`` the residual ``G_model - G`` is linear in ``(a, b)``,
    so the fit is an exact linear solve nested in a bounded 1-D search over
    ``d_fit``.
    """
    rows = np.asarray(list(samples), dtype=float)
    if rows.ndim != 2 or rows.shape[1] != 7:
        raise FitError("samples must be rows of (N, f, R, c, Rs, Hs, G)")
    if len(rows) < 3:
        raise FitError("need at least three samples")
    N, f, R, c, Rs, Hs, G = rows.T
    if np.any(Rs <= 0):
        raise FitError("Rs must be positive")
    if np.ptp(Rs) == 0 or np.ptp(Hs) == 0:
        raise FitError("samples must vary both Rs and Hs")
    if log_base not in LOG_BASES:
        raise FitError(f"log_base must be one of {tuple(LOG_BASES)}")
    log = np.log if log_base == "e" else np.log10
    scale = N * f * R / c
    logR = log(Rs)

    def solve(d):
        w = scale / np.sqrt(1.0 + d * Hs**2)
        A = np.column_stack([w, w * logR])
        coef, *_ = np.linalg.lstsq(A, G, rcond=None)
        return coef, float(np.sum((A @ coef - G) ** 2))

    # coarse log-spaced scan, then bounded refinement around the best node
    grid = np.concatenate([[0.0], np.geomspace(1e-4, d_max, 161)])
    sse = np.array([solve(d)[1] for d in grid])
    k = int(np.argmin(sse))
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, len(grid) - 1)]
    best_d = grid[k]
    if hi > lo:
        res = optimize.minimize_scalar(lambda d: solve(d)[1], bounds=(lo, hi),
                                       method="bounded",
                                       options={"xatol": 1e-10 * max(1.0, hi)})
        if res.fun <= sse[k]:
            best_d = float(res.x)
    (a, b), _ = solve(best_d)
    return FitConstants(float(a), float(b), float(best_d), log_base)


# -- side lobes ------------------------------------------------------------------

def steering_node(rmap: ResponseMap, target: SteeringTarget) -> int:
    """Index of the grid node closest to the steering target."""
    grid = rmap.grid
    if grid.kind == "sweep1d":
        if not isinstance(target, LinearTarget):
            raise ContractError("a 1-D map needs a LinearTarget")
        return int(np.argmin(np.abs(grid.coords[:, 0] - target.theta_o)))
    if isinstance(target, FarFieldTarget):
        u = dome_direction(target.alpha, target.beta, target.convention)
        dirs = grid.points / np.linalg.norm(grid.points, axis=1)[:, None]
        return int(np.argmax(dirs @ u))
    if isinstance(target, NearFieldTarget):
        return int(np.argmin(np.linalg.norm(grid.points - target.point, axis=1)))
    raise ContractError(f"unsupported steering target {target!r}")


def _lobe_labels(rmap: ResponseMap, threshold: float) -> np.ndarray:
    """Connected-component label per node (0 below threshold)."""
    grid = rmap.grid
    mask = grid.to_image(rmap.values >= threshold, fill=0.0) > 0.5
    labels, _ = ndimage.label(mask)  # 4-neighbour / interval connectivity
    for axis, wraps in enumerate(grid.periodic):
        if not wraps:
            continue
        first = np.take(labels, 0, axis=axis).ravel()
        last = np.take(labels, -1, axis=axis).ravel()
        for p, q in zip(first, last):
            if p and q and p != q:
                labels[labels == q] = p
    return labels.ravel()[grid.image_index]


def main_lobe(rmap: ResponseMap, target: SteeringTarget,
              threshold: float = 0.95) -> np.ndarray:
    """Nodes of the connected above-threshold region holding the steering node.

    The steering node itself is always included.
    """
    labels = _lobe_labels(rmap, threshold)
    k = steering_node(rmap, target)
    if labels[k] == 0:
        return np.array([k])
    return np.flatnonzero(labels == labels[k])


def detect_side_lobes(rmap: ResponseMap, target: SteeringTarget,
                      threshold: float = 0.95) -> list[int]:
    """Above-threshold nodes lying outside the main lobe."""
    if not 0 < threshold <= 1:
        raise ParameterError("threshold must lie in (0, 1]")
    labels = _lobe_labels(rmap, threshold)
    k = steering_node(rmap, target)
    main = labels[k]
    hits = (labels > 0) & (labels != main) if main else labels > 0
    hits[k] = False
    return np.flatnonzero(hits).tolist()


# -- G sweeps --------------------------------------------------------------------

@dataclass(frozen=True)
class LinearFamily:
    """Line array swept in frequency at fixed ``N``, ``d``, ``c``."""

    N: int = 4
    d: float = 0.2
    c: float = SPEED_OF_SOUND
    theta_o: float = 0.0
    step: float = math.radians(0.01)
    kind: str = "delay_and_sum"
    name = "linear"

    def frequency(self, g: float) -> float:
        return g * self.c / (self.N * self.d)

    def scenario(self, g: float) -> Scenario:
        layout = make_linear(LinearParams(self.N, self.d))
        return Scenario(layout, self.frequency(g), field="sweep1d", kind=self.kind,
                        target=LinearTarget(self.theta_o), c=self.c, step=self.step)


@dataclass(frozen=True)
class EquiAreaNearFamily:
    """Equi-area array over a near-field disk, swept in frequency."""

    N: int = 16
    N_OR: int = 11
    R: float = 0.5
    c: float = SPEED_OF_SOUND
    Rs: float = 2.0
    Hs: float = 0.1
    fit: FitConstants = FitConstants()
    ds: float | None = None
    disk_scheme: str = "polar"
    kind: str = "conventional"
    name = "equi_area_near"

    def frequency(self, g: float) -> float:
        return g * self.c / (self.N * self.R * self.fit.shape_factor(self.Rs, self.Hs))

    def scenario(self, g: float) -> Scenario:
        layout = make_equi_area(EquiAreaParams(self.N, self.N_OR, self.R))
        return Scenario(layout, self.frequency(g), field="disk", kind=self.kind,
                        target=NearFieldTarget(0.0, 0.0, self.Hs), c=self.c,
                        step=self.ds or self.Rs / 100, Rs=self.Rs, Hs=self.Hs,
                        disk_scheme=self.disk_scheme)


@dataclass
class GSweepResult:
    family: str
    g: np.ndarray
    rp: np.ndarray
    optimum_g: float
    max_rp: float
    side_lobe_g: list[float] = field(default_factory=list)
    peaks_g: list[float] = field(default_factory=list)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# {FORMAT_TAG} gsweep family={self.family}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["g", "rp"])
        for g, rp in zip(self.g, self.rp):
            writer.writerow([repr(float(g)), repr(float(rp))])
        return buf.getvalue()

    def summary(self) -> dict[str, Any]:
        return {"format": FORMAT_TAG, "family": self.family,
                "optimum_g": self.optimum_g, "max_rp": self.max_rp,
                "peaks_g": self.peaks_g, "side_lobe_g": self.side_lobe_g,
                "g_min": float(self.g[0]), "g_max": float(self.g[-1]),
                "points": int(len(self.g))}

    def to_json(self) -> str:
        return json.dumps(self.summary(), indent=2)


def _g_values(g_range: tuple[float, float], g_step: float) -> np.ndarray:
    lo, hi = map(float, g_range)
    if not g_step > 0:
        raise ParameterError("g_step must be positive")
    if not hi > lo or hi <= 0:
        raise ParameterError("empty G range")
    start = max(lo, 0.0)
    n = int(math.floor((hi - start) / g_step + 1e-9))
    g = start + g_step * np.arange(1, n + 1) if start == 0 else \
        start + g_step * np.arange(0, n + 1)
    if len(g) == 0:
        raise ParameterError("empty G range")
    return g


def g_sweep(family, g_range: tuple[float, float], g_step: float = 0.01,
            side_lobe_threshold: float = 0.95, refine: bool = True,
            threads: int | None = None) -> GSweepResult:
    """RP as a function of G, its refined argmax and side-lobe peaks.

    A G of zero is never evaluated (it means zero frequency). Local maxima of
    the sampled curve whose response maps contain an off-target lobe at
    ``side_lobe_threshold`` are reported in ``side_lobe_g``.
    """
    g = _g_values(g_range, g_step)

    def rp_at(gv: float) -> float:
        return 100.0 * family.scenario(gv).rf(threads=1)

    rp = np.array(ordered_map(rp_at, g, threads))
    k = int(np.argmax(rp))
    opt_g, max_rp = float(g[k]), float(rp[k])
    if refine and 0 < k < len(g) - 1:
        res = optimize.minimize_scalar(lambda x: -rp_at(x),
                                       bounds=(g[k - 1], g[k + 1]), method="bounded",
                                       options={"xatol": min(1e-4, g_step / 10)})
        if -res.fun >= max_rp:
            opt_g, max_rp = float(res.x), float(-res.fun)

    interior = np.flatnonzero((rp[1:-1] > rp[:-2]) & (rp[1:-1] >= rp[2:])) + 1
    peaks = [float(g[i]) for i in interior]

    def has_side_lobe(gv: float) -> bool:
        sc = family.scenario(gv)
        rmap = sc.response(threads=1)
        return bool(detect_side_lobes(rmap, sc.target, side_lobe_threshold))

    flags = ordered_map(has_side_lobe, peaks, threads)
    side = [p for p, hit in zip(peaks, flags) if hit]
    return GSweepResult(family.name, g, rp, opt_g, max_rp, side, peaks)


def check_g_invariance(param_sets: Sequence[dict], theta_step: float = math.radians(0.01),
                       kind: str = "delay_and_sum", rtol: float = 1e-9) -> float:
    """Largest pairwise RP difference among line arrays sharing one G.

    Each parameter set holds ``N``, ``f``, ``d`` and optionally ``c`` and
    ``theta_o``.
    """
    if len(param_sets) < 1:
        raise ParameterError("need at least one parameter set")
    gs = [g_linear(p["N"], p["f"], p["d"], p.get("c", SPEED_OF_SOUND))
          for p in param_sets]
    if max(gs) - min(gs) > rtol * max(gs):
        raise ContractError(f"parameter sets do not share one G: {gs}")
    rps = []
    for p in param_sets:
        sc = Scenario(make_linear(LinearParams(p["N"], p["d"])), p["f"],
                      field="sweep1d", kind=kind,
                      target=LinearTarget(p.get("theta_o", 0.0)),
                      c=p.get("c", SPEED_OF_SOUND), step=theta_step)
        rps.append(100.0 * sc.rf())
    return float(max(rps) - min(rps))


def optimum_frequency(make_scenario: Callable[[float], Scenario],
                      f_band: tuple[float, float], f_step: float,
                      threads: int | None = None) -> tuple[float, float]:
    """Frequency maximising RP over ``f_band`` and that maximum RP.

    The band is scanned at ``f_step`` and the best sample refined with a
    bounded scalar search between its neighbours.
    """
    lo, hi = f_band
    if not 0 < lo < hi or not f_step > 0:
        raise ParameterError("need 0 < f_lo < f_hi and a positive f_step")
    fs = np.arange(lo, hi + 0.5 * f_step, f_step)

    def rp_at(f: float) -> float:
        return 100.0 * make_scenario(float(f)).rf(threads=1)

    rp = np.array(ordered_map(rp_at, fs, threads))
    k = int(np.argmax(rp))
    best_f, best_rp = float(fs[k]), float(rp[k])
    a, b = fs[max(k - 1, 0)], fs[min(k + 1, len(fs) - 1)]
    res = optimize.minimize_scalar(lambda f: -rp_at(f), bounds=(a, b),
                                   method="bounded", options={"xatol": 1e-3})
    if -res.fun > best_rp:
        best_f, best_rp = float(res.x), float(-res.fun)
    return best_f, best_rp


def regenerate_g_samples(Rs_values: Sequence[float], Hs_values: Sequence[float],
                         g_opt: float, base: EquiAreaNearFamily = EquiAreaNearFamily(),
                         f_band: tuple[float, float] = (300.0, 2000.0),
                         f_step: float = 20.0,
                         threads: int | None = None) -> list[tuple[float, ...]]:
    """Fit samples ``(N, f_opt, R, c, Rs, Hs, g_opt)`` over an ``(Rs, Hs)`` grid.

    Each row records the RP-maximising frequency for one source disk; the
    target G is the common optimum the fitted expression should reproduce.
    """
    rows = []
    for Rs in Rs_values:
        for Hs in Hs_values:
            fam = replace(base, Rs=float(Rs), Hs=float(Hs))
            layout = fam.scenario(1.0).layout

            def make(f, fam=fam, layout=layout):
                return fam.scenario(1.0).with_(f=f, layout=layout)

            f_opt, _ = optimum_frequency(make, f_band, f_step, threads)
            rows.append((fam.N, f_opt, fam.R, fam.c, float(Rs), float(Hs), float(g_opt)))
    return rows
