"""Command-line orchestration: classify, run, check, plot, oracle.

Artifacts go to $KRFLOW_OUTDIR/<scenario name>/ (current directory by default):
a fixed-schema CSV time series, a run manifest, the raw sampled states, JSON
check reports and static SVG plots.  Exit codes: 0 success, 1 check failure,
2 positivity breakdown, 3 config error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import cohomology, svgplot, verify
from .config import (
    ConfigError,
    build_scenario,
    config_digest,
    load_config,
    load_phi,
    print_config,
)
from .flow import FlowState, Trajectory, run, homogeneous_oracle, shift_solution
from .geometry import HermitianMatrixField, PositivityError, ScalarField, hessian_matrix
from .verify import CSV_COLUMNS

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_POSITIVITY = 2
EXIT_CONFIG = 3

FLOAT_FMT = "%.12e"


def _outdir(name):
    base = os.environ.get("KRFLOW_OUTDIR", ".")
    path = os.path.join(base, name)
    os.makedirs(path, exist_ok=True)
    return path


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_timeseries(path, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([FLOAT_FMT % v for v in row.csv_values()])


def read_timeseries(path):
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        missing = [c for c in CSV_COLUMNS if c not in header]
        if missing:
            raise ConfigError(f"time series {path} lacks columns {missing}")
        cols = {name: [] for name in header}
        for line in reader:
            for name, value in zip(header, line):
                cols[name].append(float(value))
    return {name: np.array(vals) for name, vals in cols.items()}


def write_states(path, trajectory):
    sc = trajectory.scenario
    np.savez_compressed(
        path,
        t=trajectory.times,
        u=np.stack([s.u.values for s in trajectory.states]),
        udot=np.stack([s.u_dot.values for s in trajectory.states]),
        termination=np.array(trajectory.termination),
        config_json=np.array(_embedded_config_json(trajectory)),
    )


def _embedded_config_json(trajectory):
    cfg = trajectory.stats.get("config_json")
    if cfg is None:
        raise ValueError("trajectory was not built from a config")
    return cfg


def load_states(run_dir):
    """Rebuild a Trajectory from a stored run directory.

    The metric is recomputed from the stored potentials; the stored cached RHS
    is kept as-is, which is what lets the volume-identity check expose a
    tampered or inconsistent trajectory.
    """
    path = os.path.join(run_dir, "states.npz")
    try:
        data = np.load(path, allow_pickle=False)
    except OSError as exc:
        raise ConfigError(f"cannot load stored run: {exc}") from None
    from .config import parse_config  # local import to avoid cycle at module load

    cfg = parse_config(str(data["config_json"]), source=path)
    scenario = build_scenario(cfg, base_dir=run_dir)
    states = []
    for t, u, udot in zip(data["t"], data["u"], data["udot"]):
        g = scenario.class_at(float(t)) + hessian_matrix(scenario.grid, u)
        states.append(FlowState(float(t),
                                ScalarField(scenario.grid, u),
                                ScalarField(scenario.grid, udot),
                                HermitianMatrixField(scenario.grid, g)))
    return Trajectory(scenario, tuple(states), str(data["termination"]),
                      {"config_json": str(data["config_json"])})


# -- subcommands -----------------------------------------------------------------


def cmd_classify(args):
    cfg = load_config(args.config)
    scenario = build_scenario(cfg, base_dir=os.path.dirname(args.config) or ".")
    L, w0 = scenario.L, scenario.omega0
    T = cohomology.singularity_time(L, w0)
    nef = L.is_nef()
    k = cohomology.collapse_order(L, w0) if nef else None
    vp = cohomology.volume_polynomial(L, w0)
    report = {
        "name": cfg.name,
        "n": cfg.n,
        "T": None if math.isinf(T) else T,
        "T_is_infinite": math.isinf(T),
        "k": k,
        "volume_polynomial": list(vp.coefficients),
        "L_kahler": L.is_kahler(),
        "L_nef": nef,
        "omega0_volume": w0.volume(),
    }
    out = _outdir(cfg.name)
    _write_json(os.path.join(out, "classify.json"), report)
    print(f"scenario {cfg.name}: T = {'inf' if math.isinf(T) else f'{T:.12f}'}, "
          f"k = {k}, L kahler = {report['L_kahler']}, L nef = {nef}")
    print(f"volume polynomial coefficients: {vp.coefficients}")
    return EXIT_OK


def _run_from_config(cfg, base_dir, backend=None):
    if backend is not None and backend != cfg.backend:
        from dataclasses import replace
        cfg = replace(cfg, backend=backend)
    scenario = build_scenario(cfg, base_dir=base_dir)
    trajectory = run(scenario)
    stats = dict(trajectory.stats)
    stats["config_json"] = print_config(cfg)
    trajectory = Trajectory(scenario, trajectory.states, trajectory.termination, stats)
    return cfg, trajectory


def cmd_run(args):
    cfg = load_config(args.config)
    cfg, trajectory = _run_from_config(cfg, os.path.dirname(args.config) or ".",
                                       backend=args.backend)
    rows = verify.trajectory_diagnostics(trajectory)
    out = _outdir(cfg.name)
    write_timeseries(os.path.join(out, "timeseries.csv"), rows)
    write_states(os.path.join(out, "states.npz"), trajectory)
    manifest = {
        "name": cfg.name,
        "config_sha256": config_digest(cfg),
        "backend": cfg.backend,
        "termination": trajectory.termination,
        "samples": len(trajectory.states),
        "accepted_steps": trajectory.stats.get("accepted_steps"),
        "rejected_steps": trajectory.stats.get("rejected_steps"),
        "rhs_evaluations": trajectory.stats.get("rhs_evaluations"),
        "wall_time_seconds": trajectory.stats.get("wall_time"),
    }
    _write_json(os.path.join(out, "manifest.json"), manifest)
    print(f"run {cfg.name}: {trajectory.termination}, {len(trajectory.states)} samples "
          f"-> {out}")
    if trajectory.termination != "completed":
        return EXIT_POSITIVITY
    return EXIT_OK


def _checks_for(cfg, scenario, base_dir):
    if cfg.checks is None:
        return None, None, 0.1
    names = []
    phi = None
    epsilon = 0.1
    for spec in cfg.checks:
        names.append(spec.name)
        if spec.phi_file is not None:
            phi = load_phi(spec, scenario, base_dir)
        if spec.epsilon is not None:
            epsilon = spec.epsilon
    return names, phi, epsilon


def cmd_check(args):
    if args.from_run:
        trajectory = load_states(args.from_run)
        from .config import parse_config
        cfg = parse_config(trajectory.stats["config_json"], source=args.from_run)
        base_dir = args.from_run
    else:
        cfg = load_config(args.config)
        base_dir = os.path.dirname(args.config) or "."
        cfg, trajectory = _run_from_config(cfg, base_dir)
    names, phi, epsilon = _checks_for(cfg, trajectory.scenario, base_dir)
    report = verify.run_checks(trajectory, checks=names, phi=phi, epsilon=epsilon)
    out = _outdir(cfg.name)
    _write_json(os.path.join(out, "checks.json"), report.to_dict())
    for r in report.results:
        margin = "" if r.worst_margin is None else f" worst_margin={r.worst_margin:.6e}"
        print(f"[{r.verdict:12s}] {r.name}{margin}")
        if r.verdict == "violated":
            print(f"  *** VIOLATED: {r.name}: {r.anchor}")
            print("  *** this is counterexample-grade; check solver health first")
    print(f"report -> {os.path.join(out, 'checks.json')}")
    return EXIT_OK if report.all_pass else EXIT_CHECK_FAILED


def cmd_plot(args):
    run_dir = args.run_dir
    csv_path = os.path.join(run_dir, "timeseries.csv")
    if not os.path.exists(csv_path):
        raise ConfigError(f"no time series at {csv_path}")
    cols = read_timeseries(csv_path)
    t = cols["t"]
    k = None
    manifest_path = os.path.join(run_dir, "manifest.json")
    states_path = os.path.join(run_dir, "states.npz")
    if os.path.exists(states_path):
        try:
            k = load_states(run_dir).k
        except (ConfigError, ValueError):
            k = None

    series_u = [("mean_u", t, cols["mean_u"]),
                ("max_u", t, cols["max_u"]),
                ("min_u", t, cols["min_u"])]
    dashed = ()
    if k:
        sel = t >= t[-1] - 4.0
        c = float(np.mean(cols["mean_u"][sel] + k * t[sel]))
        series_u.append((f"-{k}*t+c fit", t, -k * t + c))
        dashed = (f"-{k}*t+c fit",)
    svgplot.line_plot(os.path.join(run_dir, "potential.svg"),
                      "potential along the flow", "t", "u", series_u, dashed=dashed)
    svgplot.line_plot(os.path.join(run_dir, "volume.svg"),
                      "volume collapse", "t", "volume",
                      [("class_volume", t, cols["class_volume"]),
                       ("volume_integral", t, cols["volume_integral"])],
                      logy=True)
    svgplot.line_plot(os.path.join(run_dir, "margins.svg"),
                      "estimate margins", "t", "scaled quantity",
                      [("exp(t)*(uddot+udot)_max", t,
                        np.exp(t) * cols["uddot_plus_udot_max"]),
                       ("exp(t/2)*max_udot", t, np.exp(0.5 * t) * cols["max_udot"]),
                       ("thm13_min", t, cols["thm13_min"])])
    print(f"plots -> {run_dir}/potential.svg volume.svg margins.svg")
    return EXIT_OK


def cmd_oracle(args):
    cfg = load_config(args.config)
    scenario = build_scenario(cfg, base_dir=os.path.dirname(args.config) or ".")
    if float(np.ptp(scenario.rho.values)) != 0.0:
        raise ConfigError("oracle requires a spatially constant density")
    k = scenario.collapse_order()
    if k is None:
        raise ConfigError("oracle requires a nef L")
    if args.times:
        try:
            times = [float(x) for x in args.times.split(",")]
        except ValueError:
            raise ConfigError(f"bad --times list: {args.times!r}") from None
    else:
        times = list(np.arange(0.0, cfg.t_max + 1e-9, max(cfg.sample_dt, 0.25)))
    rho_const = float(scenario.rho.values.flat[0]) if scenario.rho.values.size \
        else float(scenario.rho.values)
    table = homogeneous_oracle(scenario.L, scenario.omega0, rho_const, k,
                               scenario.gauge, times)
    print(f"{'t':>10s} {'u':>18s} {'f':>18s} {'v':>18s}")
    for t, u, f, v in zip(table.t, table.u, table.f, table.v):
        print(f"{t:10.4f} {u:18.10e} {f:18.10e} {v:18.10e}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser():
    parser = _Parser(prog="krflow",
                     description="torus-model potential flow laboratory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="class-level report: T, k, volume polynomial")
    p.add_argument("config")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("run", help="integrate a scenario and write artifacts")
    p.add_argument("config")
    p.add_argument("--backend", choices=("spectral", "fd4"), default=None)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("check", help="verify the estimate suite over a trajectory")
    p.add_argument("config", nargs="?")
    p.add_argument("--from-run", default=None, metavar="DIR",
                   help="use a stored run directory instead of re-running")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("plot", help="render SVG plots from a run directory")
    p.add_argument("run_dir")
    p.set_defaults(fn=cmd_plot)

    p = sub.add_parser("oracle", help="closed-form/quadrature table for constant data")
    p.add_argument("config")
    p.add_argument("--times", default=None, help="comma-separated sample times")
    p.set_defaults(fn=cmd_oracle)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.fn is cmd_check and not args.from_run and not args.config:
            raise ConfigError("check needs a config or --from-run DIR")
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PositivityError as exc:
        print(f"positivity breakdown: {exc}", file=sys.stderr)
        return EXIT_POSITIVITY


if __name__ == "__main__":
    sys.exit(main())
