"""``arraybeam`` command-line interface.

Exit codes: 0 success, 2 configuration or parameter error, 3 runtime or
numeric error. Scenario options may also come from a YAML file passed with
``--config``; flags given on the command line win over file values.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ._errors import ArraybeamError, FitError
from ._parallel import ordered_map, thread_count
from .analysis import (
    DEFAULT_EPS,
    DEFAULT_SCHEDULE_DEG,
    EquiAreaNearFamily,
    FitConstants,
    LinearFamily,
    converge_rf,
    detect_side_lobes,
    fit_g_constants,
    g_sweep,
    regenerate_g_samples,
)
from .geometry import FORMAT_TAG, ArrayLayout, make_layout, table1_layouts
from .metrics import rejection_factor
from .propagation import FarFieldTarget, LinearTarget, NearFieldTarget
from .scenario import DEFAULT_DISK_DIVISIONS, DEFAULT_DOME_STEP, Scenario

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

TABLE2_FREQUENCIES = (400.0, 800.0, 1200.0)
TABLE2_FIELDS = ("dome", "disk")


class ConfigError(ArraybeamError):
    pass


# -- helpers -------------------------------------------------------------------

def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    doc = yaml.safe_load(p.read_text()) or {}
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a mapping")
    flat: dict[str, Any] = {}
    for key, value in doc.items():
        if isinstance(value, dict):
            for sub, v in value.items():
                flat[sub.replace("-", "_")] = v
        else:
            flat[key.replace("-", "_")] = value
    return flat


def _merged(args: argparse.Namespace) -> dict[str, Any]:
    """Config-file values overridden by explicitly given flags."""
    opts = _load_config(getattr(args, "config", None))
    for key, value in vars(args).items():
        if value is not None:
            opts[key] = value
    return opts


GEOMETRY_KEYS = {"n": "N", "d": "d", "r1": "R1", "r2": "R2", "phi": "phi",
                 "na": "Na", "nm": "Nm", "nu": "nu", "n_or": "N_OR", "r": "R",
                 "offsets": "offsets"}


def _layout_from(opts: dict[str, Any]) -> ArrayLayout:
    if opts.get("layout"):
        path = Path(opts["layout"])
        if not path.exists():
            raise ConfigError(f"layout file not found: {path}")
        return ArrayLayout.from_json(path)
    design = opts.get("design")
    if not design:
        raise ConfigError("give --layout FILE or --design with its parameters")
    params = {GEOMETRY_KEYS[k]: v for k, v in opts.items()
              if k in GEOMETRY_KEYS and v is not None}
    for key in ("N", "Na", "Nm", "N_OR"):
        if key in params:
            params[key] = int(params[key])
    return make_layout(design, defaults=True, **params)


def _scenario_from(opts: dict[str, Any]) -> Scenario:
    layout = _layout_from(opts)
    field = opts.get("field") or ("sweep1d" if layout.is_linear else "dome")
    if opts.get("freq") is None:
        raise ConfigError("--freq is required")
    f = float(opts["freq"])
    c = float(opts.get("c", 343.0))
    kind = opts.get("kind") or ("das" if field == "sweep1d" else "conventional")
    Rs = float(opts.get("rs", 2.0))
    Hs = float(opts.get("hs", 0.1))
    convention = opts.get("dome_convention", "azel")
    if field == "sweep1d":
        target = LinearTarget(math.radians(float(opts.get("theta_o", 0.0))))
        step = opts.get("theta_step")
        step = math.radians(float(step)) if step is not None else None
    elif field == "dome":
        target = FarFieldTarget(math.radians(float(opts.get("alpha_o", 0.0))),
                                math.radians(float(opts.get("beta_o", 0.0))),
                                convention=convention)
        step = opts.get("theta_step")
        step = math.radians(float(step)) if step is not None else None
    elif field == "disk":
        point = opts.get("target") or (0.0, 0.0, Hs)
        target = NearFieldTarget(*map(float, point))
        step = float(opts["ds"]) if opts.get("ds") is not None else None
    else:
        raise ConfigError(f"unknown field {field!r}")
    if layout.is_linear and field != "sweep1d":
        raise ConfigError("a linear layout is evaluated with --field sweep1d")
    if not layout.is_linear and field == "sweep1d" and layout.n_mics > 1:
        raise ConfigError("--field sweep1d needs a linear layout")
    return Scenario(layout, f, field=field, kind=kind, target=target, c=c,
                    step=step, dome_radius=float(opts.get("dome_radius", 100.0)),
                    dome_convention=convention,
                    plane_wave=bool(opts.get("plane_wave", False)),
                    Rs=Rs, Hs=Hs, disk_scheme=opts.get("disk_scheme", "polar"))


def _add_geometry_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("layout parameters")
    g.add_argument("--n", type=int, help="number of microphones")
    g.add_argument("--d", type=float, help="linear spacing (m)")
    g.add_argument("--r1", type=float, help="inner radius (m)")
    g.add_argument("--r2", type=float, help="outer radius (m)")
    g.add_argument("--phi", type=float, help="Archimedean turn angle (deg)")
    g.add_argument("--na", type=int, help="Underbrink arm count")
    g.add_argument("--nm", type=int, help="Underbrink mics per arm")
    g.add_argument("--nu", type=float, help="Underbrink spiral angle (rad)")
    g.add_argument("--n-or", type=int, dest="n_or", help="equi-area outer-ring count")
    g.add_argument("--r", type=float, help="equi-area disk radius (m)")
    g.add_argument("--offsets", type=float, nargs=2,
                   help="concentric ring rotations (deg)")


def _add_scenario_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML scenario file")
    p.add_argument("--layout", help="layout JSON file")
    p.add_argument("--design", help="generate the layout inline from this design")
    _add_geometry_flags(p)
    p.add_argument("--kind", choices=["das", "conventional"])
    p.add_argument("--freq", type=float, help="tone frequency (Hz)")
    p.add_argument("--c", type=float, help="speed of sound (m/s), default 343")
    p.add_argument("--field", choices=["sweep1d", "dome", "disk"])
    p.add_argument("--theta-step", type=float, dest="theta_step",
                   help="angular step (deg) for sweep1d and dome fields")
    p.add_argument("--dome-radius", type=float, dest="dome_radius",
                   help="dome radius (m), default 100")
    p.add_argument("--dome-convention", choices=["azel", "polar"],
                   dest="dome_convention")
    p.add_argument("--plane-wave", action="store_const", const=True,
                   dest="plane_wave", help="analytic plane waves instead of dome points")
    p.add_argument("--rs", type=float, help="source disk radius (m)")
    p.add_argument("--hs", type=float, help="source disk height (m)")
    p.add_argument("--ds", type=float, help="disk grid pitch (m)")
    p.add_argument("--disk-scheme", choices=["polar", "cartesian"], dest="disk_scheme")
    p.add_argument("--theta-o", type=float, dest="theta_o", help="1-D steering angle (deg)")
    p.add_argument("--alpha-o", type=float, dest="alpha_o", help="dome steering alpha (deg)")
    p.add_argument("--beta-o", type=float, dest="beta_o", help="dome steering beta (deg)")
    p.add_argument("--target", type=float, nargs=3, help="near-field focus point (m)")


# -- subcommands -----------------------------------------------------------------

def cmd_geometry(args) -> int:
    opts = _merged(args)
    layout = _layout_from(opts)
    text = layout.to_json() + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"N = {layout.n_mics}  aperture = {layout.aperture:.6g} m",
          file=sys.stdout if args.out else sys.stderr)
    return 0


def cmd_respond(args) -> int:
    opts = _merged(args)
    sc = _scenario_from(opts)
    rmap = sc.response()
    report = rejection_factor(rmap)
    if args.out:
        Path(args.out).write_text(rmap.to_csv())
        report_path = args.report or str(Path(args.out).with_suffix(".json"))
        Path(report_path).write_text(report.to_json() + "\n")
    elif args.report:
        Path(args.report).write_text(report.to_json() + "\n")
    if args.format == "json":
        print(report.to_json())
    else:
        print(f"RP = {report.rp:.4f} %  SNR = {report.snr_db:.4f} dB")
    return 0


def table2_rows(dome_step: float = DEFAULT_DOME_STEP,
                disk_divisions: int = DEFAULT_DISK_DIVISIONS,
                threads: int | None = None, **overrides) -> list[dict[str, Any]]:
    """RP and SNR for the five 16-mic designs, three tones and both fields."""
    layouts = table1_layouts()
    jobs = []
    for field in TABLE2_FIELDS:
        for name, layout in layouts.items():
            for f in TABLE2_FREQUENCIES:
                jobs.append((field, name, layout, f))

    def run(job):
        field, name, layout, f = job
        sc = Scenario(layout, f, field=field, **overrides)
        step = dome_step if field == "dome" else sc.Rs / disk_divisions
        rmap = sc.response(step, threads=1)
        rep = rejection_factor(rmap)
        return {"field": "far" if field == "dome" else "near", "design": name,
                "f": f, "rp": rep.rp, "snr_db": rep.snr_db, "step": step,
                "nodes": len(rmap)}

    return ordered_map(run, jobs, thread_count() if threads is None else threads)


def cmd_table2(args) -> int:
    rows = table2_rows(math.radians(args.dome_step), args.disk_divisions,
                       dome_convention=args.dome_convention,
                       disk_scheme=args.disk_scheme)
    if args.format == "json":
        _emit(json.dumps({"format": FORMAT_TAG, "rows": rows}, indent=2) + "\n",
              args.out)
        return 0
    buf = io.StringIO()
    buf.write(f"# {FORMAT_TAG} table2\n")
    writer = csv.writer(buf, lineterminator="\n")
    cols = ["field", "design", "f", "rp", "snr_db", "step", "nodes"]
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row[c] if isinstance(row[c], str) else repr(row[c])
                         for c in cols])
    _emit(buf.getvalue(), args.out)
    return 0


def _family(args):
    if args.family == "linear":
        return LinearFamily(N=args.n or 4, d=args.d or 0.2, c=args.c or 343.0,
                            step=math.radians(args.theta_step or 0.01))
    fit = FitConstants(*args.fit, log_base=args.log_base)
    Rs = args.rs or 2.0
    return EquiAreaNearFamily(N=args.n or 16, N_OR=args.n_or or 11, R=args.r or 0.5,
                              c=args.c or 343.0, Rs=Rs, Hs=args.hs or 0.1, fit=fit,
                              ds=args.ds or Rs / 100, disk_scheme=args.disk_scheme)


def cmd_gsweep(args) -> int:
    result = g_sweep(_family(args), (args.g_min, args.g_max), args.g_step,
                     refine=not args.no_refine)
    _emit(result.to_csv(), args.out)
    if args.summary:
        Path(args.summary).write_text(result.to_json() + "\n")
    print(f"optimum G = {result.optimum_g:.4f}  max RP = {result.max_rp:.4f} %",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def cmd_converge(args) -> int:
    opts = _merged(args)
    sc = _scenario_from(opts)
    if args.schedule:
        raw = [float(s) for s in args.schedule.split(",") if s.strip()]
    elif sc.field == "disk":
        raw = [sc.Rs / n for n in (25, 50, 100, 200)]
    else:
        raw = list(DEFAULT_SCHEDULE_DEG)
    schedule = raw if sc.field == "disk" else [math.radians(s) for s in raw]
    study = converge_rf(sc, schedule, args.eps, exhaust=args.exhaust)
    text = study.to_csv()
    _emit(text, args.out)
    conv = study.converged_step
    if conv is not None and sc.field != "disk":
        conv = math.degrees(conv)
    print(f"converged step = {conv!r}", file=sys.stderr if args.out in (None, "-")
          else sys.stdout)
    return 0


def cmd_sidelobes(args) -> int:
    opts = _merged(args)
    sc = _scenario_from(opts)
    rmap = sc.response()
    nodes = detect_side_lobes(rmap, sc.target, args.threshold)
    buf = io.StringIO()
    buf.write(f"# {FORMAT_TAG} sidelobes threshold={args.threshold!r}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["node", *rmap.grid.coord_names, "amplitude"])
    for k in nodes:
        writer.writerow([k, *(repr(float(v)) for v in rmap.grid.coords[k]),
                         repr(float(rmap.values[k]))])
    _emit(buf.getvalue(), args.out)
    print(f"side-lobe nodes: {len(nodes)}",
          file=sys.stderr if args.out in (None, "-") else sys.stdout)
    return 0


def cmd_fit_g(args) -> int:
    if args.samples:
        path = Path(args.samples)
        if not path.exists():
            raise ConfigError(f"samples file not found: {path}")
        with path.open() as fh:
            reader = csv.DictReader(line for line in fh if not line.startswith("#"))
            rows = [tuple(float(r[k]) for k in ("N", "f", "R", "c", "Rs", "Hs", "G"))
                    for r in reader]
    else:
        if not (args.rs_values and args.hs_values):
            raise ConfigError("give --samples or both --rs-values and --hs-values")
        rows = regenerate_g_samples(args.rs_values, args.hs_values, args.g_opt,
                                    f_band=(args.f_min, args.f_max), f_step=args.f_step)
    fit = fit_g_constants(rows, log_base=args.log_base)
    doc = {"format": FORMAT_TAG, "a_fit": fit.a_fit, "b_fit": fit.b_fit,
           "d_fit": fit.d_fit, "log_base": fit.log_base,
           "samples": [list(r) for r in rows]}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arraybeam",
        description="Microphone-array geometries, beamformer response maps and "
                    "rejection metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("geometry", help="generate a layout JSON file")
    p.add_argument("design", choices=["linear", "concentric", "four-arm-spiral",
                                      "archimedean", "underbrink", "equi-area"])
    _add_geometry_flags(p)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_geometry)

    p = sub.add_parser("respond", help="response map and rejection report")
    _add_scenario_flags(p)
    p.add_argument("--out", help="response-map CSV path")
    p.add_argument("--report", help="report JSON path (default: --out with .json)")
    p.add_argument("--format", choices=["csv", "json"], default="csv",
                   help="stdout summary style")
    p.set_defaults(func=cmd_respond)

    p = sub.add_parser("table2", help="RP/SNR for five designs x 3 tones x 2 fields")
    p.add_argument("--dome-step", type=float, default=math.degrees(DEFAULT_DOME_STEP),
                   dest="dome_step", help="dome step (deg)")
    p.add_argument("--disk-divisions", type=int, default=DEFAULT_DISK_DIVISIONS,
                   dest="disk_divisions", help="disk pitch is Rs / this")
    p.add_argument("--dome-convention", choices=["azel", "polar"], default="azel",
                   dest="dome_convention")
    p.add_argument("--disk-scheme", choices=["polar", "cartesian"], default="polar",
                   dest="disk_scheme")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("gsweep", help="RP as a function of G")
    p.add_argument("family", choices=["linear", "equi-area-near"])
    p.add_argument("--g-min", type=float, default=0.0, dest="g_min")
    p.add_argument("--g-max", type=float, required=True, dest="g_max")
    p.add_argument("--g-step", type=float, default=0.01, dest="g_step")
    p.add_argument("--no-refine", action="store_true", dest="no_refine")
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--theta-step", type=float, dest="theta_step")
    p.add_argument("--n-or", type=int, dest="n_or")
    p.add_argument("--r", type=float)
    p.add_argument("--rs", type=float)
    p.add_argument("--hs", type=float)
    p.add_argument("--ds", type=float)
    p.add_argument("--disk-scheme", choices=["polar", "cartesian"], default="polar",
                   dest="disk_scheme")
    p.add_argument("--fit", type=float, nargs=3, default=[1.0, 2.0, 34.0],
                   metavar=("A", "B", "D"))
    p.add_argument("--log-base", choices=["10", "e"], default="10", dest="log_base")
    p.add_argument("--out", help="curve CSV path")
    p.add_argument("--summary", help="summary JSON path")
    p.set_defaults(func=cmd_gsweep)

    p = sub.add_parser("converge", help="grid-convergence study")
    _add_scenario_flags(p)
    p.add_argument("--schedule", help="comma-separated steps (deg, or m for disk)")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--exhaust", action="store_true",
                   help="evaluate the whole schedule")
    p.add_argument("--out")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("sidelobes", help="off-target nodes above a gain threshold")
    _add_scenario_flags(p)
    p.add_argument("--threshold", type=float, default=0.95)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sidelobes)

    p = sub.add_parser("fit-g", help="fit the equi-area near-field G constants")
    p.add_argument("--samples", help="CSV with columns N,f,R,c,Rs,Hs,G")
    p.add_argument("--rs-values", type=float, nargs="+", dest="rs_values")
    p.add_argument("--hs-values", type=float, nargs="+", dest="hs_values")
    p.add_argument("--g-opt", type=float, default=26.33, dest="g_opt")
    p.add_argument("--f-min", type=float, default=300.0, dest="f_min")
    p.add_argument("--f-max", type=float, default=2000.0, dest="f_max")
    p.add_argument("--f-step", type=float, default=20.0, dest="f_step")
    p.add_argument("--log-base", choices=["10", "e"], default="10", dest="log_base")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit_g)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FitError as exc:
        print(f"arraybeam: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ArraybeamError, ValueError, KeyError, TypeError) as exc:
        print(f"arraybeam: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, MemoryError) as exc:
        print(f"arraybeam: numeric error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
