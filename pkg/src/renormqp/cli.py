"""Command line front end: ``renormqp <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import scipy

from . import __version__, kernels
from .config import RenormConfig, load_config
from .errors import ConfigError, RenormError, VerificationFailed
from .families import FLM, load_family, slopes, superstable_alpha, write_slopes_csv
from .renorm1d import dr_spectrum, load_fixed_point, save_fixed_point, solve_fixed_point

FIXED_POINT = "fixed_point.json"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(f"{self.prog}: {message}")


def _fmt(x):
    return format(float(x), ".17g")


class Run:
    """Collects outputs and writes ``manifest_<command>.json`` next to them."""

    def __init__(self, command, cfg, out):
        self.command = command
        self.cfg = cfg
        self.out = Path(out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.outputs = []
        self.t0 = time.perf_counter()

    def path(self, name):
        self.outputs.append(name)
        return self.out / name

    def finish(self):
        manifest = {
            "command": self.command,
            "config": self.cfg.to_dict(),
            "outputs": self.outputs,
            "wall_time": time.perf_counter() - self.t0,
            "versions": {
                "renormqp": __version__,
                "numpy": np.__version__,
                "scipy": scipy.__version__,
                "kernels": kernels.BACKEND,
            },
        }
        (self.out / f"manifest_{self.command}.json").write_text(json.dumps(manifest, indent=1) + "\n")


def _config(args) -> RenormConfig:
    return load_config(args.config) if args.config else RenormConfig()


def _jobs(args):
    env = os.environ.get("RENORM_QP_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ConfigError(f"RENORM_QP_JOBS must be an integer, got {env!r}") from exc
    return args.jobs or os.cpu_count() or 1


def _family(args):
    return load_family(args.family) if getattr(args, "family", None) else FLM


def _fixed_point(args):
    return load_fixed_point(Path(args.out) / FIXED_POINT)


def cmd_fixed_point(args):
    cfg = _config(args)
    run = Run("fixed-point", cfg, args.out)
    res = solve_fixed_point(None, cfg)
    save_fixed_point(res, cfg, run.path(FIXED_POINT))
    run.finish()
    print(f"a = {res.a:.17g}")
    print(f"residual = {res.residual:.3e}")
    print(f"iterations = {res.iterations}")
    return 0


def cmd_spectrum(args):
    from .qp import on_disc, spectrum_sweep

    cfg = _config(args)
    if args.top < 1:
        raise ConfigError("--top must be at least 1")
    if args.omega_grid < 1:
        raise ConfigError("--omega-grid must be at least 1")
    fp = _fixed_point(args)
    run = Run("spectrum", cfg, args.out)
    if args.one_dim:
        ev = dr_spectrum(fp.phi, cfg)[: args.top]
        with open(run.path("spectrum_1d.csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["j", "re_lambda", "im_lambda"])
            for j, lam in enumerate(ev, 1):
                w.writerow([j, _fmt(lam.real), _fmt(lam.imag)])
        print(f"leading eigenvalue = {ev[0].real:.12g}")
    else:
        psi = on_disc(fp.phi, cfg.disc, cfg.n_x)
        grid = np.arange(args.omega_grid) / args.omega_grid
        sweep = spectrum_sweep(psi, grid, cfg, top=args.top, jobs=_jobs(args))
        sweep.write_csv(run.path("spectrum_sweep.csv"))
        print(f"{len(grid)} omega values, {args.top} eigenvalues each; {len(sweep.crossings)} crossings flagged")
    run.finish()
    return 0


def cmd_superstable(args):
    cfg = _config(args)
    run = Run("superstable", cfg, args.out)
    al = [superstable_alpha(n) for n in range(args.n_max + 2)]
    with open(run.path("superstable.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "alpha_n", "ratio"])
        for n in range(args.n_max + 1):
            ratio = (al[n] - al[n - 1]) / (al[n + 1] - al[n]) if n >= 1 else float("nan")
            w.writerow([n, _fmt(al[n]), _fmt(ratio)])
            print(f"n={n} alpha={al[n]:.15f} ratio={ratio:.8f}")
    run.finish()
    return 0


def _unforced_v0(cfg):
    from .analytic import AnalyticMap1D, ModePair
    from .renorm1d import even_domain

    z = AnalyticMap1D(even_domain(cfg), np.zeros(cfg.n_x + 1))
    return ModePair(z, z, 1)


def cmd_slopes(args):
    cfg = _config(args)
    _fixed_point(args)
    fam = _family(args)
    run = Run("slopes", cfg, args.out)
    v0 = _unforced_v0(cfg) if args.unforced else None
    results = [slopes(n, cfg.omega, fam, cfg, v0=v0) for n in range(1, args.n_max + 1)]
    write_slopes_csv(results, run.path("slopes.csv"))
    run.finish()
    for r in results:
        print(f"n={r.n} alpha_n={r.alpha_n:.15f} slope+={r.slope_plus:.12g} slope-={r.slope_minus:.12g}")
    return 0


def default_eps_ladder(n, eps0=1e-5):
    """Ratio-two ladder; smaller for deeper levels, where the curves bend faster."""
    e = eps0 * 4.0 ** -max(0, n - 3)
    return (e, e / 2, e / 4)


def _trace(task):
    n, omega, forcing, which, eps_list, cfg = task
    from .dynamics import extrapolate, trace_boundary
    from .families import NormalizedFamily

    pts = trace_boundary(n, omega, NormalizedFamily(forcing), eps_list, which, cfg)
    a0, slope = extrapolate(pts)
    return n, which, pts, a0, slope


def cmd_verify(args):
    from .dynamics import write_boundary_csv

    cfg = _config(args)
    _fixed_point(args)
    fam = _family(args)
    run = Run("verify", cfg, args.out)
    formula = {n: slopes(n, cfg.omega, fam, cfg) for n in range(1, args.n_max + 1)}
    tasks = [(n, cfg.omega, fam.forcing, which, default_eps_ladder(n, args.eps0), cfg)
             for n in formula for which in ("plus", "minus")]
    jobs = _jobs(args)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            traced = list(ex.map(_trace, tasks))
    else:
        traced = [_trace(t) for t in tasks]
    dyn = {}
    for n, which, pts, a0, slope in traced:
        write_boundary_csv(pts, run.path(f"boundary_n{n}_{which}.csv"))
        dyn[n, which] = (slope, a0)
    worst = 0.0
    header = ["n", "slope_formula_plus", "slope_dynamics_plus", "rel_err_plus",
              "slope_formula_minus", "slope_dynamics_minus", "rel_err_minus",
              "alpha_n", "intercept_err_plus", "intercept_err_minus"]
    with open(run.path("verify.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        print(" ".join(f"{h:>22s}" for h in header))
        for n, r in formula.items():
            sp, ap = dyn[n, "plus"]
            sm, am = dyn[n, "minus"]
            ep = abs(sp - r.slope_plus) / abs(r.slope_plus)
            em = abs(sm - r.slope_minus) / abs(r.slope_minus)
            worst = max(worst, ep, em)
            row = [r.slope_plus, sp, ep, r.slope_minus, sm, em, r.alpha_n, ap - r.alpha_n, am - r.alpha_n]
            w.writerow([n] + [_fmt(x) for x in row])
            print(f"{n:>22d} " + " ".join(f"{x:>22.12g}" for x in row))
    run.finish()
    if worst > args.tol:
        raise VerificationFailed(f"largest relative slope error {worst:.3g} exceeds {args.tol}")
    return 0


def cmd_scan(args):
    from .dynamics import scan, write_scan_csv

    cfg = _config(args)
    fam = _family(args)
    run = Run("scan", cfg, args.out)
    alphas = np.linspace(args.alpha_min, args.alpha_max, args.alpha_steps)
    epss = np.linspace(args.eps_min, args.eps_max, args.eps_steps)
    pts = scan(args.n, cfg.omega, alphas, epss, fam, cfg)
    write_scan_csv(pts, run.path("scan.csv"))
    run.finish()
    counts = {}
    for p in pts:
        counts[p.classification] = counts.get(p.classification, 0) + 1
    print(", ".join(f"{k}: {v}" for k, v in sorted(counts.items())))
    return 0


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON config file (see --print-default-config)")
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--jobs", type=int, default=None, help="worker count (default: logical cores; RENORM_QP_JOBS overrides)")

    p = _Parser(prog="renormqp", description="Quasi-periodic doubling renormalization toolkit.")
    p.add_argument("--print-default-config", action="store_true", help="print the default config as JSON and exit")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("fixed-point", parents=[common], help="solve for the 1-D fixed point")
    s.set_defaults(func=cmd_fixed_point)

    s = sub.add_parser("spectrum", parents=[common], help="spectra of L_omega over an omega grid")
    s.add_argument("--omega-grid", type=int, default=64, help="number of equispaced omega values in [0, 1)")
    s.add_argument("--top", type=int, default=12, help="eigenvalues kept per omega")
    s.add_argument("--one-dim", action="store_true", help="emit the spectrum of DR at the fixed point instead")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("superstable", parents=[common], help="superstable parameters of the logistic map")
    s.add_argument("--n-max", type=int, default=8)
    s.set_defaults(func=cmd_superstable)

    s = sub.add_parser("slopes", parents=[common], help="slopes of the reducibility-loss curves from the formulas")
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--unforced", action="store_true", help="use a zero forcing direction (slopes vanish)")
    s.add_argument("--family", help="family.json descriptor (default: multiplicative FLM)")
    s.set_defaults(func=cmd_slopes)

    s = sub.add_parser("verify", parents=[common], help="compare formula slopes with traced boundaries")
    s.add_argument("--n-max", type=int, default=3)
    s.add_argument("--tol", type=float, default=0.05, help="largest accepted relative slope error")
    s.add_argument("--eps0", type=float, default=1e-5, help="largest eps of the ladder (levels <= 3)")
    s.add_argument("--family", help="family.json descriptor (default: multiplicative FLM)")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", parents=[common], help="classify an (alpha, eps) grid by the indicator sign pattern")
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--alpha-min", type=float, default=3.2)
    s.add_argument("--alpha-max", type=float, default=3.27)
    s.add_argument("--alpha-steps", type=int, default=15)
    s.add_argument("--eps-min", type=float, default=0.0)
    s.add_argument("--eps-max", type=float, default=0.01)
    s.add_argument("--eps-steps", type=int, default=5)
    s.add_argument("--family", help="family.json descriptor (default: multiplicative FLM)")
    s.set_defaults(func=cmd_scan)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.print_default_config:
            print(json.dumps(RenormConfig().to_dict(), indent=1))
            return 0
        if not getattr(args, "func", None):
            parser.print_help()
            return 0
        return args.func(args)
    except RenormError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
