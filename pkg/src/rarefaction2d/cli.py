"""Command-line harness: ``rarefaction2d <command> --config FILE --out DIR``.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 failed check.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import __version__, analysis, checks, config, exactwave, fields, geometry, profiles, solver, transform
from .errors import ConfigError, HyperbolicityViolated, RarefactionError
from .fields import Field2D, Grid2D
from .norms import norm_label

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4
# geometric time knots for interpolating viscous-profile boundary data
BOUNDARY_KNOT_RATIO = 0.005


class CheckFailed(Exception):
    pass


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return str(v)


class Output:
    """Writes every artefact under one directory with a common CSV header."""

    def __init__(self, root, cfg, command):
        self.root = root
        self.header = f"# rarefaction2d {__version__}\n# config {cfg.digest()}\n# command {command}\n"
        os.makedirs(root, exist_ok=True)

    def path(self, name):
        return os.path.join(self.root, name)

    def csv(self, name, columns, rows):
        with open(self.path(name), "w", newline="\n") as fh:
            fh.write(self.header)
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(v) for v in row) + "\n")

    def text(self, name, text):
        with open(self.path(name), "w", newline="\n") as fh:
            fh.write(text)

    def field(self, stem, field, fmt):
        if fmt == "csv":
            self.text(stem + ".csv", fields.field_to_csv(field, self.header.rstrip("\n").replace("# ", "")))
        else:
            fields.dump_field(field, self.path(stem + ".f2d"))


def _time_tag(t):
    return format(float(t), "g").replace(".", "p")


def write_report(out, rep, plots=False):
    """``<name>.csv`` rows, fits, checks and a plain-text summary."""
    out.csv(f"{rep.name}.csv", ("t", "norm_name", "p", "value"), rep.rows)
    out.csv(
        f"{rep.name}_fits.csv",
        ("name", "exponent", "intercept", "r2", "t_lo", "t_hi", "log_power"),
        [
            (k, f.exponent, f.intercept, f.r2, f.window[0], f.window[1], "" if f.log_power is None else f.log_power)
            for k, f in rep.fits.items()
        ],
    )
    out.csv(f"{rep.name}_checks.csv", ("check", "passed"), list(rep.checks.items()))
    lines = [f"{rep.name}: {'PASS' if rep.passed else 'FAIL'}"]
    lines += [f"  check {k}: {'pass' if v else 'FAIL'}" for k, v in rep.checks.items()]
    lines += [f"  fit {k}: exponent {f.exponent:.4f} (r2 {f.r2:.4f})" for k, f in rep.fits.items()]
    lines += [f"  {k} = {_fmt(v)}" for k, v in sorted(rep.info.items())]
    summary = "\n".join(lines) + "\n"
    out.text(f"{rep.name}_summary.txt", summary)
    sys.stdout.write(summary)
    if plots and rep.series:
        from .plotting import decay_plot

        by_name = {f"{s.label}_L{norm_label(s.p)}": (s.label, s.p) for s in rep.series}
        fits = {by_name[k]: f for k, f in rep.fits.items() if k in by_name}
        decay_plot(out.path(f"{rep.name}.svg"), rep.series, fits, title=rep.name)
    if not rep.passed:
        raise CheckFailed(", ".join(k for k, v in rep.checks.items() if not v))


def _grid(cfg):
    return Grid2D(cfg["grid.x_lo"], cfg["grid.x_hi"], cfg["grid.n1"], cfg["grid.y_lo"], cfg["grid.y_hi"], cfg["grid.n2"])


def _perturbation(cfg):
    amp = cfg["perturbation.amplitude"]
    if amp == 0.0:
        return None
    return (amp, (cfg["perturbation.center_x"], cfg["perturbation.center_y"]), cfg["perturbation.radius"])


# ---------------------------------------------------------------------------
# commands


def cmd_construct(cfg, out, args):
    data = cfg.riemann()
    grid = _grid(cfg)
    X, Y = grid.mesh()
    z = geometry.Z(data.curve, X, Y)
    rows = []
    for t in cfg["construct.times"]:
        u = exactwave.wave_from_Z(data, t, z)
        out.field(f"wave_t{_time_tag(t)}", Field2D(grid, t, u), cfg["output.format"])
        region = np.asarray(exactwave.classify_region_by_Z(data, t, X, Y, z))
        rows.append((t, float(u.min()), float(u.max()), int((region < 0).sum()), int((region == 0).sum()), int((region > 0).sum())))
    out.csv("construct.csv", ("t", "u_min", "u_max", "n_minus", "n_fan", "n_plus"), rows)


def cmd_profile(cfg, out, args):
    data = cfg.riemann()
    params = profiles.ProfileParams(data.u_minus, data.u_plus)
    n_xi, n_eta = cfg["profile.n_xi"], cfg["profile.n_eta"]
    grid = lambda t: profiles.default_decay_grid(params, data.curve, t, n_xi, n_eta)  # noqa: E731
    rep = analysis.experiment_profile_decay(params, data.curve, cfg["profile.times"], grid)
    span = transform.support_interval(data.curve)
    lo, hi = (-5.0, 5.0) if span is None or not np.all(np.isfinite(span)) else (span[0] - 1.0, span[1] + 1.0)
    xi = np.linspace(lo, hi, 201)
    c = transform.eval_KAB(data.curve, xi)
    out.csv("coefficients.csv", ("xi", "K", "A", "B", "Kprime"), zip(xi, c.K, c.A, c.B, c.Kprime))
    write_report(out, rep, args.plots)


def cmd_simulate(cfg, out, args):
    data = cfg.riemann()
    grid = _grid(cfg)
    params = profiles.ProfileParams(data.u_minus, data.u_plus)
    coords = cfg["solver.coords"]
    t0 = cfg["solver.start_time"]
    end = cfg["solver.end_time"]
    if not end > t0:
        raise ConfigError("solver.end_time", "must exceed solver.start_time")
    snaps = tuple(t for t in cfg["solver.snapshots"] if t0 < t <= end) or (end,)
    boundary_mode = cfg["solver.boundary"]
    if "solver.boundary" not in cfg.explicit and coords == "transformed":
        boundary_mode = "viscous-profile"
    run_cfg = solver.SolverConfig(
        scheme=cfg["solver.scheme"],
        cfl=cfg["solver.cfl"],
        boundary=boundary_mode,
        end_time=end,
        snapshot_times=snaps,
        advection=cfg["solver.advection"],
        mixed_stencil=cfg["solver.mixed_stencil"],
        workers=args.workers,
        check_max_principle=True,
    )
    X1, X2 = grid.mesh()
    pert = _perturbation(cfg)
    if coords == "original":
        if boundary_mode != "exact-wave":
            raise ConfigError("solver.boundary", "original coordinates use exact-wave boundary data")
        z = geometry.Z(data.curve, X1, X2)
        base = profiles.w0(params, z) if t0 == 0.0 else exactwave.wave_from_Z(data, t0, z)
        sim = solver.Simulation.original(grid, solver.exact_wave_boundary(grid, data), run_cfg)
        reference = lambda t: exactwave.wave_from_Z(data, t, z)  # noqa: E731
        ref_name = "exact_wave"
    else:
        if boundary_mode != "viscous-profile":
            raise ConfigError("solver.boundary", "transformed coordinates use viscous-profile boundary data")
        xi, eta = grid.axis1(), grid.axis2()
        base = profiles.w0(params, X2) if t0 == 0.0 else profiles.profile_on_grid(params, t0, xi, eta, data.curve, False)
        bnd = solver.viscous_profile_boundary(grid, params, data.curve, knot_ratio=BOUNDARY_KNOT_RATIO)
        sim = solver.Simulation.transformed(grid, data.curve, bnd, run_cfg)
        reference = lambda t: profiles.profile_on_grid(params, t, xi, eta, data.curve, False)  # noqa: E731
        ref_name = "viscous_profile"
    u0 = base if pert is None else base + solver.bump(X1, X2, pert[0], pert[1], pert[2])
    res = solver.run(sim, Field2D(grid, t0, u0), run_cfg, reference=reference, norms=((math.inf,), (2.0,)))
    for f in res.snapshots:
        out.field(f"u_t{_time_tag(f.t)}", f, cfg["output.format"])
    rows = []
    for s in res.series.values():
        rows.extend((t, f"u_minus_{ref_name}", norm_label(s.p), v) for t, v in zip(s.t, s.values))
    rows.sort(key=lambda r: (r[0], r[2]))
    out.csv("simulate.csv", ("t", "norm_name", "p", "value"), rows)
    out.csv(
        "simulate_info.csv",
        ("key", "value"),
        [("steps", res.steps), ("dt", res.dt_max), ("max_principle_violation", res.max_principle_violation)],
    )
    if res.max_principle_violation > 1e-12:
        raise CheckFailed(f"maximum principle violated by {res.max_principle_violation:.3g}")


def cmd_decay(cfg, out, args):
    data = cfg.riemann()
    spec = analysis.MainRunSpec(
        half_width=cfg["decay.half_width"],
        n=cfg["decay.n"],
        times=cfg["decay.times"],
        perturbation=_perturbation(cfg),
        advection=cfg["solver.advection"],
        cfl=cfg["solver.cfl"],
        workers=args.workers,
    )
    rep = analysis.experiment_stability_decay(data, spec, doubling=cfg["decay.doubling"])
    write_report(out, rep, args.plots)


def cmd_compare_curves(cfg, out, args):
    d1 = cfg.riemann("curve")
    d2 = cfg.riemann("curve2")
    rep = analysis.experiment_curve_stability(d1, d2, cfg["compare.times"], cfg["compare.n"])
    write_report(out, rep, args.plots)


def cmd_verify(cfg, out, args):
    data = cfg.riemann()
    results = checks.run_suite(data, cfg["verify.samples"], cfg["seed"], cfg["verify.tamper"])
    out.csv("verify.csv", ("check", "passed", "value", "limit"), [(r.name, r.passed, r.value, r.limit) for r in results])
    for r in results:
        print(f"{'pass' if r.passed else 'FAIL'}  {r.name}  {r.value:.3e} (limit {r.limit:.1e})")
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise CheckFailed(", ".join(failed))


COMMANDS = {
    "construct": (cmd_construct, ("curve", "riemann")),
    "profile": (cmd_profile, ("curve", "riemann")),
    "simulate": (cmd_simulate, ("curve", "riemann")),
    "decay": (cmd_decay, ("curve", "riemann")),
    "compare-curves": (cmd_compare_curves, ("curve", "curve2", "riemann")),
    "verify": (cmd_verify, ("curve", "riemann")),
}


def build_parser():
    p = argparse.ArgumentParser(prog="rarefaction2d", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"rarefaction2d {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="flat key = value configuration file")
        sp.add_argument("--out", default="out", help="output directory")
        sp.add_argument("--workers", type=int, default=1, help="solver threads (results do not depend on it)")
        sp.add_argument("--plots", action="store_true", help="also write SVG decay plots")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    fn, require = COMMANDS[args.command]
    try:
        if args.workers < 1:
            raise ConfigError("--workers", "must be at least 1")
        cfg = config.load(args.config, require)
        cfg.riemann()
        if "curve2" in require:
            cfg.riemann("curve2")
        out = Output(args.out, cfg, args.command)
        fn(cfg, out, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HyperbolicityViolated as exc:
        print(f"config error: curve: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailed as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (RarefactionError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
