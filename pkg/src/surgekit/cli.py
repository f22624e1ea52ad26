"""Command-line front end.

Subcommands: map, stability, simulate, limit-cycle, tune, closedloop,
averaging.  Each accepts ``--scenario`` (shipped catalog name or file
path) plus flag overrides, writes deterministic CSV output, and prints a
short summary.  Exit codes: 0 success, 2 usage, 3 scenario/config
validation, 4 model/runtime failure, 5 I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

import numpy as np

from . import __version__
from .averaging import REPORT_HEADER, grid_points, stability_verdict
from .compressor import PlantState, GreitzerParams, equilibrium_from_throttle, \
    map_pressure_rise
from .csvio import write_rows, write_trajectory
from .errors import ScenarioError, SurgeKitError
from .loop import extract_LT, gain_excursion, simulate_closed_loop, \
    zn_gains
from .odesim import Trajectory, simulate_greitzer, steady_state_of
from .scenario import Scenario, TUNE_RULES, resolve_scenario, shipped_scenarios, \
    validate
from .stability import SCAN_HEADER, detect_limit_cycle, stability_scan, \
    surge_boundary
from .svgplot import Series, render_svg


def _out_dir(args) -> str:
    if args.out_dir:
        return args.out_dir
    return os.environ.get("SURGEKIT_OUT_DIR", ".")


def _csv_path(args, sc: Scenario, suffix: str = "") -> str:
    if args.csv:
        return args.csv
    return os.path.join(_out_dir(args), f"{sc.name}{suffix}.csv")


def _load(args, kind: str) -> Scenario:
    if args.scenario:
        sc = resolve_scenario(args.scenario)
        if sc.kind != kind:
            raise ScenarioError(
                f"scenario {sc.name!r} has kind {sc.kind!r}, "
                f"but was passed to the {kind!r} subcommand")
    else:
        sc = Scenario(name=kind, kind=kind)
    _apply_overrides(sc, args)
    validate(sc)
    return sc


def _apply_overrides(sc: Scenario, args) -> None:
    simple = [("dt", "dt"), ("t_end", "t_end"), ("decimation", "decimation"),
              ("flow", "flow"), ("g", "g"), ("phi0", "phi0"), ("psi0", "psi0"),
              ("perturb_phi", "perturb_phi"), ("perturb_psi", "perturb_psi"),
              ("lo", "stab_lo"), ("hi", "stab_hi"), ("n", "stab_n"),
              ("settle_fraction", "settle_fraction"), ("tol", "cycle_tol"),
              ("L", "tune_L"), ("T", "tune_T"), ("rule", "tune_rule"),
              ("k1_lo", "avg_k1_lo"), ("k1_hi", "avg_k1_hi"),
              ("k2_lo", "avg_k2_lo"), ("k2_hi", "avg_k2_hi"),
              ("grid_n", "avg_n"), ("avg_k3", "avg_k3"),
              ("avg_gamma", "avg_gamma"), ("avg_r", "avg_r")]
    for flag, attr in simple:
        value = getattr(args, flag, None)
        if value is not None:
            setattr(sc, attr, value)
    ctrl = {}
    for flag in ("controller", "kp", "ki", "kd", "k1", "k2", "k3", "gamma",
                 "reference"):
        value = getattr(args, flag, None)
        if value is not None:
            ctrl["kind" if flag == "controller" else flag] = value
    dist = {}
    for flag, name in (("target", "target"), ("dtau", "tau"),
                       ("dinit", "initial")):
        value = getattr(args, flag, None)
        if value is not None:
            dist[name] = value
    try:
        if ctrl:
            sc.controller = dataclasses.replace(sc.controller, **ctrl)
        if dist:
            sc.disturbance = dataclasses.replace(sc.disturbance, **dist)
    except SurgeKitError as err:
        raise ScenarioError(str(err)) from err
    if getattr(args, "observe", False):
        sc.observe = True


def _thin(arr, limit: int = 2000):
    """Stride-decimate a series for plotting; keeps the final sample."""
    n = len(arr)
    stride = max(1, n // limit)
    if stride == 1:
        return arr
    import numpy as _np
    return _np.concatenate([arr[::stride], arr[-1:]])


def _plant_initial(sc: Scenario) -> tuple[PlantState, float]:
    g = sc.throttle()
    if sc.phi0 is not None:
        return PlantState(sc.phi0, sc.psi0), g
    eq = equilibrium_from_throttle(sc.cmap, g)
    return PlantState(eq.phi + sc.perturb_phi, eq.psi + sc.perturb_psi), g


def _run_plant(sc: Scenario) -> Trajectory:
    initial, g = _plant_initial(sc)
    return simulate_greitzer(initial, GreitzerParams(g=g), sc.cmap,
                             dt=sc.resolved_dt(), t_end=sc.resolved_t_end())


def cmd_map(args) -> int:
    sc = _load(args, "map")
    lo = args.lo if args.lo is not None else sc.cmap.domain_lo
    hi = args.hi if args.hi is not None else sc.cmap.domain_hi
    n = args.n if args.n is not None else 201
    if not (lo < hi and n >= 2):
        raise ScenarioError(f"need lo < hi and n >= 2, got ({lo}, {hi}, {n})")
    phis = np.linspace(lo, hi, n)
    psis = np.array([map_pressure_rise(sc.cmap, p) for p in phis])
    path = _csv_path(args, sc)
    write_rows(("phi", "psi_c"), np.column_stack([phis, psis]), path)
    peak = int(np.argmax(psis))
    print(f"map table: {n} points on [{lo:g}, {hi:g}] -> {path}")
    print(f"peak pressure rise {psis[peak]:.9g} at phi = {phis[peak]:.9g}")
    if args.svg:
        render_svg([Series("psi_c", phis, psis)], args.svg,
                   x_label="phi (mass flow)", y_label="psi_c (pressure rise)",
                   title="compressor map")
        print(f"figure -> {args.svg}")
    return 0


def cmd_stability(args) -> int:
    sc = _load(args, "stability")
    rows = stability_scan(sc.cmap, sc.stab_lo, sc.stab_hi, sc.stab_n)
    path = _csv_path(args, sc)
    write_rows(SCAN_HEADER,
               [(r.phi, r.discriminant, r.real_part, r.bendixson_r,
                 r.classification) for r in rows], path)
    boundary = surge_boundary(sc.cmap, lo=sc.stab_lo, hi=sc.stab_hi)
    print(f"stability scan: {sc.stab_n} points on "
          f"[{sc.stab_lo:g}, {sc.stab_hi:g}] -> {path}")
    print(f"surge boundary phi* = {boundary:.9g} "
          "(unstable focus below, stable focus above)")
    if args.svg:
        phis = np.array([r.phi for r in rows])
        render_svg([Series("eigenvalue real part", phis,
                           np.array([r.real_part for r in rows])),
                    Series("divergence indicator", phis,
                           np.array([r.bendixson_r for r in rows]))],
                   args.svg, x_label="phi (mass flow)", y_label="1/time",
                   title="equilibrium stability vs flow")
        print(f"figure -> {args.svg}")
    return 0


def cmd_simulate(args) -> int:
    sc = _load(args, "simulate")
    traj = _run_plant(sc)
    path = _csv_path(args, sc)
    write_trajectory(traj, path, sc.decimation)
    phi = traj.column("phi")
    psi = traj.column("psi")
    print(f"open-loop run: {traj.n_rows} samples, dt={traj.dt:g} -> {path}")
    print(f"final state phi = {phi[-1]:.6g}, psi = {psi[-1]:.6g}")
    window = min(args.ss_window, 0.5 * sc.resolved_t_end())
    ss = steady_state_of(traj, window=window, tol=args.ss_tol)
    if ss is None:
        print(f"no steady state within tol {args.ss_tol:g} over the final "
              f"{window:g} time units")
    else:
        print(f"steady state ({args.ss_tol:g} tol): "
              f"phi = {ss[0]:.6g}, psi = {ss[1]:.6g}")
    if args.svg:
        render_svg([Series("phi", _thin(traj.t), _thin(phi)),
                    Series("psi", _thin(traj.t), _thin(psi))],
                   args.svg, x_label="time", y_label="state",
                   title=f"open-loop transient ({sc.name})")
        print(f"figure -> {args.svg}")
    return 0


def cmd_limit_cycle(args) -> int:
    sc = _load(args, "limit-cycle")
    traj = _run_plant(sc)
    path = _csv_path(args, sc)
    write_trajectory(traj, path, sc.decimation)
    report = detect_limit_cycle(traj, settle_fraction=sc.settle_fraction,
                                tol=sc.cycle_tol)
    print(f"run: {traj.n_rows} samples, dt={traj.dt:g} -> {path}")
    if report.detected:
        print(f"limit cycle detected: amplitude phi = "
              f"{report.amplitude_phi:.6g}, amplitude psi = "
              f"{report.amplitude_psi:.6g}, period = {report.period:.6g}, "
              f"cycles analyzed = {report.cycles_analyzed}")
    else:
        print("no limit cycle detected")
    if args.svg:
        render_svg([Series("orbit", _thin(traj.column("phi"), 5000),
                           _thin(traj.column("psi"), 5000))],
                   args.svg, x_label="phi (mass flow)",
                   y_label="psi (pressure rise)",
                   title=f"phase plane ({sc.name})")
        print(f"figure -> {args.svg}")
    return 0


def cmd_tune(args) -> int:
    if args.step_csv:
        data = np.genfromtxt(args.step_csv, delimiter=",", names=True)
        names = list(data.dtype.names)
        signal = args.signal or names[1]
        traj = Trajectory(float(data["t"][1] - data["t"][0]), names,
                          np.column_stack([data[c] for c in names]))
        L, T = extract_LT(traj, signal, final_value=args.final)
        sc = _load(args, "tune") if args.scenario else Scenario(
            name="tune", kind="tune", tune_L=max(L, 1e-12), tune_T=T,
            tune_rule=args.rule or "PID")
        sc.tune_L, sc.tune_T = L, T
        print(f"tangent fit of {signal!r}: L = {L:.6g}, T = {T:.6g}")
        if L <= 0.0:
            print("dead time is zero: the tuning table needs L > 0; "
                  "pass --L and --T explicitly to override")
            return 0
    else:
        sc = _load(args, "tune")
        L, T = sc.tune_L, sc.tune_T
    gains = zn_gains(L, T, sc.tune_rule)
    print(f"rule {sc.tune_rule}: kp = {gains['kp']:.6g}, "
          f"ti = {gains['ti']:.6g}, td = {gains['td']:.6g}, "
          f"ki = {gains['ki']:.6g}, kd = {gains['kd']:.6g}")
    path = _csv_path(args, sc)
    write_rows(("L", "T", "rule", "kp", "ti", "td", "ki", "kd"),
               [(L, T, sc.tune_rule, gains["kp"], gains["ti"], gains["td"],
                 gains["ki"], gains["kd"])], path)
    print(f"gains -> {path}")
    return 0


def cmd_closedloop(args) -> int:
    sc = _load(args, "closedloop")
    traj = simulate_closed_loop(sc.controller, sc.valve, sc.disturbance,
                                dt=sc.resolved_dt(),
                                t_end=sc.resolved_t_end(),
                                observe=sc.observe, cmap=sc.cmap)
    path = _csv_path(args, sc)
    write_trajectory(traj, path, sc.decimation)
    y = traj.column("y")
    co = traj.column("co")
    r = sc.controller.reference
    boundary = surge_boundary(sc.cmap)
    print(f"closed-loop run ({sc.controller.kind}, gamma = "
          f"{sc.controller.gamma:g}): {traj.n_rows} samples, "
          f"dt={traj.dt:g} -> {path}")
    print(f"terminal flow y = {y[-1]:.6g} (set point {r:g}, "
          f"error {abs(y[-1] - r):.3g})")
    print(f"valve flow range [{co.min():.6g}, {co.max():.6g}], "
          f"gain excursion {gain_excursion(traj):.6g}")
    if y.min() < boundary:
        print(f"WARNING: flow dipped below the surge boundary "
              f"{boundary:.4g} (min y = {y.min():.6g})")
    else:
        print(f"flow stayed above the surge boundary {boundary:.4g} "
              f"(min y = {y.min():.6g})")
    if args.svg:
        tt = _thin(traj.t)
        series = [Series("y (inlet flow)", tt, _thin(y)),
                  Series("ym (reference model)", tt, _thin(traj.column("ym"))),
                  Series("d (disturbance)", tt, _thin(traj.column("d"))),
                  Series("co (valve flow)", tt, _thin(co))]
        render_svg(series, args.svg, x_label="time (s)", y_label="flow",
                   title=f"closed loop ({sc.name})")
        print(f"figure -> {args.svg}")
    if args.svg_params:
        series = [Series(n, _thin(traj.t), _thin(traj.column(n)))
                  for n in ("k1", "k2", "k3")]
        render_svg(series, args.svg_params, x_label="time (s)",
                   y_label="controller gain",
                   title=f"adaptive gains ({sc.name})")
        print(f"figure -> {args.svg_params}")
    return 0


def cmd_averaging(args) -> int:
    sc = _load(args, "averaging")
    points = grid_points(sc.avg_k1_lo, sc.avg_k1_hi, sc.avg_k2_lo,
                         sc.avg_k2_hi, sc.avg_n, k3=sc.avg_k3, r=sc.avg_r,
                         gamma=sc.avg_gamma)
    rows = stability_verdict(points)
    path = _csv_path(args, sc)
    write_rows(REPORT_HEADER,
               [(w.point.k1, w.point.k2, w.point.k3, w.point.gamma,
                 w.point.r, *w.eigenvalues, w.verdict) for w in rows], path)
    lam_max = max(max(w.eigenvalues) for w in rows)
    n_stable = sum(w.verdict == "stable" for w in rows)
    print(f"averaged-dynamics grid {sc.avg_n}x{sc.avg_n} "
          f"(gamma = {sc.avg_gamma:g}, r = {sc.avg_r:g}) -> {path}")
    print(f"{n_stable}/{len(rows)} points stable; "
          f"largest eigenvalue {lam_max:.3g}")
    print("note: eigenvalues come from the numeric eigensolve of the "
          "analytic Jacobian (two exact zeros plus the singular-block "
          "trace); commonly quoted closed-form expressions for the nonzero "
          "eigenvalue do not match direct differentiation and are not used.")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surgekit",
        description="Compressor surge stability analysis and anti-surge "
                    "control simulation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", help="shipped scenario name or file path")
        p.add_argument("--out-dir", help="output directory "
                       "(default: $SURGEKIT_OUT_DIR or '.')")
        p.add_argument("--csv", help="explicit CSV output path")
        p.add_argument("--decimation", type=int,
                       help="record every Nth sample in the CSV")

    p = sub.add_parser("map", help="tabulate the compressor map")
    common(p)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("stability", help="scan equilibrium stability vs flow")
    common(p)
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--svg")
    p.set_defaults(func=cmd_stability)

    def plant_flags(p):
        p.add_argument("--flow", type=float,
                       help="equilibrium flow; sets the throttle parameter")
        p.add_argument("--g", type=float, help="throttle parameter directly")
        p.add_argument("--phi0", type=float)
        p.add_argument("--psi0", type=float)
        p.add_argument("--perturb-phi", dest="perturb_phi", type=float)
        p.add_argument("--perturb-psi", dest="perturb_psi", type=float)
        p.add_argument("--dt", type=float)
        p.add_argument("--t-end", dest="t_end", type=float)
        p.add_argument("--svg")

    p = sub.add_parser("simulate", help="open-loop surge-model run")
    common(p)
    plant_flags(p)
    p.add_argument("--ss-window", dest="ss_window", type=float, default=5.0)
    p.add_argument("--ss-tol", dest="ss_tol", type=float, default=1e-3)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("limit-cycle",
                       help="open-loop run plus limit-cycle detection")
    common(p)
    plant_flags(p)
    p.add_argument("--settle-fraction", dest="settle_fraction", type=float)
    p.add_argument("--tol", type=float)
    p.set_defaults(func=cmd_limit_cycle)

    p = sub.add_parser("tune", help="tangent tuning rule gains")
    common(p)
    p.add_argument("--L", type=float, help="dead time")
    p.add_argument("--T", type=float, help="time constant")
    p.add_argument("--rule", choices=TUNE_RULES)
    p.add_argument("--step-csv", dest="step_csv",
                   help="extract L and T from a step-response trajectory CSV")
    p.add_argument("--signal", help="column to fit (default: first signal)")
    p.add_argument("--final", type=float,
                   help="known final value of the step response")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("closedloop", help="closed-loop anti-surge run")
    common(p)
    p.add_argument("--controller", choices=("fixed-pd", "fixed-pid",
                                            "adaptive"))
    for flag in ("kp", "ki", "kd", "k1", "k2", "k3", "gamma", "reference",
                 "target", "dtau", "dinit"):
        p.add_argument(f"--{flag}", type=float)
    p.add_argument("--observe", action="store_true",
                   help="append side-by-side compressor states phi, psi")
    p.add_argument("--dt", type=float)
    p.add_argument("--t-end", dest="t_end", type=float)
    p.add_argument("--svg")
    p.add_argument("--svg-params", dest="svg_params")
    p.set_defaults(func=cmd_closedloop)

    p = sub.add_parser("averaging",
                       help="stability grid of the averaged adaptation")
    common(p)
    p.add_argument("--k1-lo", dest="k1_lo", type=float)
    p.add_argument("--k1-hi", dest="k1_hi", type=float)
    p.add_argument("--k2-lo", dest="k2_lo", type=float)
    p.add_argument("--k2-hi", dest="k2_hi", type=float)
    p.add_argument("--grid-n", dest="grid_n", type=int)
    p.add_argument("--avg-k3", dest="avg_k3", type=float)
    p.add_argument("--avg-gamma", dest="avg_gamma", type=float)
    p.add_argument("--avg-r", dest="avg_r", type=float)
    p.set_defaults(func=cmd_averaging)

    p = sub.add_parser("scenarios", help="list shipped scenario files")
    p.set_defaults(func=lambda args: _cmd_scenarios())
    return parser


def _cmd_scenarios() -> int:
    for name in shipped_scenarios():
        sc = resolve_scenario(name)
        print(f"{name:8s} {sc.kind}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except SurgeKitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 4
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
