"""Command line entry point: ``kinchar <subcommand> [--config PATH] [--out DIR]``."""

import argparse
import io
import os
import sys

import numpy as np

from . import acceptance
from . import bobylev as bb
from . import diagnostics as dg
from . import kernels as kn
from . import momentkit as mk
from .bobylev import write_rows
from .charfun import (CharFun, charfun_eval, delta_k, diff_coeffs, norm_alpha, norm_Mk,
                      norm_Mtilde, QuadratureError)
from .config import ConfigError, RunConfig


def _emit(out_dir, name, header, rows, stdout):
    """Write ``name`` under ``out_dir`` (or to stdout when no directory is set)."""
    if out_dir is None:
        buf = io.StringIO()
        write_rows(buf, header, rows)
        stdout.write(buf.getvalue())
        return None
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    write_rows(path, header, rows)
    return path


def cmd_coeffs(args, cfg, stdout):
    c = diff_coeffs(args.k)
    rows = [(args.k, j, float(v)) for j, v in enumerate(c.as_array())]
    _emit(args.out, f"coeffs_k{args.k}.csv", ("k", "j", "c"), rows, stdout)
    return 0


def cmd_charfun(args, cfg, stdout):
    F = cfg.measure()
    phi = CharFun.from_measure(F)
    diag = cfg.diagnostic()
    k = diag["k"]
    d = F.dim
    unit = np.eye(d)
    rows = []
    for r in cfg["charfun.radii"]:
        for i, e in enumerate(unit):
            xi = r * e
            val = complex(charfun_eval(F, xi[None, :])[0])
            rows.append((r, i + 1, val.real, val.imag, float(delta_k(phi, k, xi[None, :])[0])))
    _emit(args.out, "charfun.csv", ("radius", "axis", "re_phi", "im_phi", f"delta_{k}"), rows, stdout)
    grid, quad = cfg.grid(), cfg.quad()
    one = CharFun.one(d)
    norms = []
    for b in diag["betas"]:
        norms.append(("sup_beta", "", "", b, norm_alpha(phi, one, b, grid), ""))
    for a in diag["alphas"]:
        v, info = norm_Mk(phi, one, k, a, quad=quad, full_output=True)
        norms.append(("M_k", k, a, "", v, info["est_error"]))
        if 0 < a < 2:
            v, info = norm_Mtilde(phi, one, a, quad=quad, full_output=True)
            norms.append(("M_tilde", "", a, "", v, info["est_error"]))
    _emit(args.out, "norms.csv", ("name", "k", "alpha", "beta", "value", "est_error"), norms,
          stdout)
    return 0


def cmd_moments(args, cfg, stdout):
    F = cfg.measure()
    diag = cfg.diagnostic()
    rows, ok = [], True
    for a in diag["alphas"]:
        for rep in mk.moment_bound_reports(F, diag["k"], a, diag["radii"], cfg.quad()):
            rows.append(rep.row())
            ok &= rep.holds
    _emit(args.out, "moments.csv", mk.REPORT_HEADER, rows, stdout)
    return 0 if ok else 1


def cmd_lambda(args, cfg, stdout):
    B = cfg.kernel()
    rows = []
    for b in cfg["lambda.betas"]:
        try:
            val, info = kn.lambda_beta(B, b, full_output=True)
            bound = info.get("remainder_bound", abs(info["remainder"]))
            rows.append((b, val, bound, info["ill_conditioned"]))
        except kn.KernelError:
            rows.append((b, float("inf"), float("inf"), True))
    _emit(args.out, "lambda.csv", ("beta", "lambda", "remainder_bound", "ill_conditioned"),
          rows, stdout)
    return 0


def _solve(cfg):
    return bb.solve(cfg.initial(), cfg.kernel(), cfg.solver())


def cmd_solve(args, cfg, stdout):
    traj = _solve(cfg)
    _emit(args.out, "trajectory.csv", bb.TRAJECTORY_HEADER, traj.conserved_table(), stdout)
    if cfg["solver.dump"]:
        if args.out is None:
            raise ConfigError("'solver.dump' needs --out or output.dir")
        bb.write_states(os.path.join(args.out, "states.bin"), traj)
    return 0


def cmd_diagnose(args, cfg, stdout):
    diag = cfg.diagnostic()
    B = cfg.kernel()
    scfg = cfg.solver()
    path = cfg["diagnostic.trajectory"]
    if path:
        times, states = bb.read_states(path, scfg.interp_order)
        traj = bb.Trajectory(times=times, states=tuple(states), config=scfg, kernel=B)
        F0 = None
    else:
        F0 = cfg.initial()
        traj = bb.solve(F0, B, scfg)
    reports = []
    for b in diag["betas"]:
        reports.append(dg.continuity_beta_check(traj, b, B, tol=diag["tol"]))
    for a in diag["alphas"]:
        if diag["k"] >= 2:
            reports.append(dg.continuity_Mk_check(traj, diag["k"], a, cfg.quad(), F0=F0))
    _emit(args.out, "diagnostics.csv", dg.REPORT_HEADER,
          [row for rep in reports for row in rep.rows()], stdout)
    ok = all(rep.passed for rep in reports if rep.check == "continuity_beta")
    ok &= all(rep.extra.get("stable", True) and rep.extra["finite"]
              for rep in reports if rep.check == "continuity_Mk")
    return 0 if ok else 1


def cmd_verify(args, cfg, stdout):
    seed = args.seed if args.seed is not None else acceptance.DEFAULT_SEED
    results = acceptance.run_all(seed=seed, echo=lambda s: print(s, file=stdout, flush=True))
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria passed", file=stdout)
    if args.out is not None:
        _emit(args.out, "acceptance.csv", ("criterion", "title", "pass", "detail"),
              [(r.number, r.title, r.passed, r.detail.replace(",", ";")) for r in results],
              stdout)
    return 0 if n_pass == len(results) else 1


COMMANDS = {
    "coeffs": cmd_coeffs,
    "charfun": cmd_charfun,
    "moments": cmd_moments,
    "lambda": cmd_lambda,
    "solve": cmd_solve,
    "diagnose": cmd_diagnose,
    "verify": cmd_verify,
}


def build_parser():
    p = argparse.ArgumentParser(prog="kinchar", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat 'section.key = value' file")
    common.add_argument("--out", help="output directory (default: stdout or output.dir)")
    common.add_argument("--threads", type=int, help="numba worker threads")
    common.add_argument("--seed", type=int, help="seed for the randomized acceptance inputs")
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("coeffs", parents=[common], help="difference coefficients c_{k,j}")
    c.add_argument("k", type=int)
    for name, text in (("charfun", "characteristic function, Delta^k and norms"),
                       ("moments", "moment bound reports"),
                       ("lambda", "lambda_beta table"),
                       ("solve", "integrate the equation and write the trajectory"),
                       ("diagnose", "continuity checks along a trajectory"),
                       ("verify", "run the acceptance suite")):
        sub.add_parser(name, parents=[common], help=text)
    return p


def main(argv=None, stdout=None):
    stdout = stdout or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_file(args.config) if args.config else RunConfig.default()
        if args.out is None and cfg["output.dir"] != ".":
            args.out = cfg["output.dir"]
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be positive")
            import numba
            numba.set_num_threads(min(args.threads, numba.config.NUMBA_NUM_THREADS))
        if args.command == "coeffs" and not 1 <= args.k <= 16:
            raise ConfigError("k must lie in 1..16")
        return COMMANDS[args.command](args, cfg, stdout)
    except (ConfigError, bb.StabilityError, kn.KernelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuadratureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
