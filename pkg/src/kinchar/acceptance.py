"""Acceptance suite shared by ``kinchar verify`` and the pytest wrapper.

Each criterion is a function returning a :class:`Result`; :func:`run_all`
executes them in order and :func:`summary_line` formats one line each.
"""

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import bobylev as bb
from . import diagnostics as dg
from . import kernels as kn
from . import measures as ms
from . import momentkit as mk
from .charfun import CharFun, delta_k, delta_k_direct, diff_coeffs, dis_k_alpha_beta

DEFAULT_SEED = 20240601


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    data: dict = field(default_factory=dict)


def summary_line(res):
    flag = "PASS" if res.passed else "FAIL"
    return f"[{flag}] C{res.number:<2d} {res.title}: {res.detail} ({res.elapsed:.2f} s)"


def _timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.elapsed = time.perf_counter() - t0
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ---------------------------------------------------------------- fixtures


def random_measure(rng, d, max_atoms=8, scale=1.0, centered=True):
    n = int(rng.integers(1, max_atoms + 1))
    pts = rng.normal(scale=scale, size=(n, d))
    w = rng.dirichlet(np.ones(n))
    F = ms.make_measure(d, pts, w)
    return ms.center(F) if centered and n > 1 else F


@lru_cache(maxsize=None)
def identity_measures(seed=DEFAULT_SEED, count=10):
    """Ten centred random measures per dimension, shared by C3 and C4."""
    rng = np.random.default_rng(seed)
    out = {}
    for d in (1, 3):
        meas = []
        while len(meas) < count:
            F = random_measure(rng, d)
            if not ms.is_single_dirac(F):
                meas.append(F)
        out[d] = tuple(meas)
    return out


def cutoff_kernels():
    """Kernels used by the dynamical criteria, normalised to unit total rate."""
    return {
        "constant": kn.normalized(kn.constant(1.0)),
        "grazing(nu=0.5, theta_min=1e-2)": kn.normalized(kn.grazing(0.5, theta_min=1e-2)),
    }


def two_point_datum():
    """Rotational average of the zero-mean pair at +-e1 (unit energy)."""
    return bb.isotropic_average(ms.symmetric_pair([1.0, 0.0, 0.0]))


# ---------------------------------------------------------------- criteria


@_timed
def c1_coefficients(seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed)
    x = rng.uniform(-10, 10, 1000)
    worst = 0.0
    for k in range(1, 17):
        c = diff_coeffs(k).as_array()
        j = np.arange(k + 1)
        lhs = np.cos(np.outer(x, j)) @ c
        worst = max(worst, float(np.max(np.abs(lhs - np.sin(x / 2) ** (2 * k)))))
    spots = (np.allclose(diff_coeffs(1).as_array(), [0.5, -0.5], atol=0, rtol=1e-15)
             and np.allclose(diff_coeffs(2).as_array(), [0.375, -0.5, 0.125], atol=0, rtol=1e-15))
    ok = worst <= 1e-12 and spots
    return Result(1, "coefficient identity", ok,
                  f"max error {worst:.2e} <= 1e-12, spot values {'ok' if spots else 'WRONG'}",
                  data=dict(max_error=worst))


@_timed
def c2_dual_delta(seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for m in range(50):
        d = (1, 3)[m % 2]
        F = random_measure(rng, d, centered=False)
        phi = CharFun.from_measure(F)
        xi = rng.normal(scale=3.0, size=(20, d))
        for k in (1, 2, 3):
            diff = np.abs(delta_k(phi, k, xi) - delta_k_direct(F, k, xi))
            worst = max(worst, float(diff.max()))
    return Result(2, "dual Delta^k formulas", worst <= 1e-12, f"max |difference| {worst:.2e} <= 1e-12",
                  data=dict(max_error=worst))


@_timed
def c3_identity(seed=DEFAULT_SEED):
    alphas = (0.0, 0.5, 1.5)
    worst, count = 0.0, 0
    for d, meas in identity_measures(seed).items():
        for F in meas:
            for k in (2, 3):
                lhs, rhs = mk.fourier_moment_identity(F, k, alphas)
                rel = np.abs(lhs - rhs) / np.maximum(rhs, 1e-12)
                worst = max(worst, float(rel.max()))
                count += rel.size
    return Result(3, "Fourier-moment identity", worst <= 1e-2,
                  f"{count} cases, max relative error {worst:.2e} <= 1e-2",
                  data=dict(max_rel=worst))


@_timed
def c4_tail_bound(seed=DEFAULT_SEED):
    quad = None
    violations, count, tightest = 0, 0, np.inf
    rel_tol = 5e-3  # quadrature tolerance, applied to the bound only
    for d, meas in identity_measures(seed).items():
        for F in meas:
            phi = CharFun.from_measure(F)
            for k in (2, 3):
                for alpha in (0.0, 0.5, 1.5):
                    p = 2 * k - 2 + alpha
                    for R in (0.5, 1.0, 2.0):
                        brute = mk.brute_tail_moment(F, p, R)
                        bound = mk.tail_moment_bound(phi, k, alpha, R, quad)
                        count += 1
                        if brute > bound * (1 + rel_tol):
                            violations += 1
                        if brute > 0:
                            tightest = min(tightest, bound / brute)
    return Result(4, "tail moment bound", violations == 0,
                  f"{violations} violations in {count} cases, min bound/brute {tightest:.3f}",
                  data=dict(violations=violations, min_ratio=tightest))


@_timed
def c5_lambda_index():
    lam = {name: kn.lambda_beta(B, 2.0) for name, B in
           (("constant", kn.constant(1.0)), ("grazing", kn.grazing(0.5)))}
    lam_ok = all(abs(v) <= 1e-12 for v in lam.values())
    mismatches = []
    for nu in (0.5, 1.0, 1.5):
        for a0 in (0.75, 1.25):
            finite, _ = kn.integrability_index(kn.grazing(nu), a0)
            if finite != (nu < a0):
                mismatches.append((nu, a0))
    ok = lam_ok and not mismatches
    return Result(5, "lambda_2 = 0 and integrability index", ok,
                  "lambda_2 " + ", ".join(f"{k} {v:.1e}" for k, v in lam.items())
                  + f"; index mismatches {len(mismatches)}/6",
                  data=dict(lambda2=lam, mismatches=mismatches))


@_timed
def c6_gaussian_stationarity(seed=DEFAULT_SEED):
    rng = np.random.default_rng(seed + 6)
    iso_worst = grid_worst = 0.0
    for B in cutoff_kernels().values():
        cfg = bb.SolverConfig()
        lam = bb.stability_rate(B, cfg)
        r = bb.radial_grid(cfg)
        for a in (0.1, 1.0, 10.0):
            rhs = bb.collision_rhs_iso(lambda x, a=a: np.exp(-a * x * x), r, B, cfg)
            iso_worst = max(iso_worst, float(np.max(np.abs(rhs))) / lam)
    B = cutoff_kernels()["constant"]
    lam = bb.stability_rate(B, bb.SolverConfig())
    for a in (0.1, 1.0, 10.0):
        # the cube is scaled with the Gaussian width, which leaves the
        # relative interpolation error unchanged
        xm = 4.5 / np.sqrt(a)
        cfg = bb.SolverConfig(mode="grid3d", N=121, xi_max=xm, interp_order="cubic")
        st = bb.init_from_measure(CharFun.gaussian(a), cfg)
        pts = st.nodes()
        r = np.linalg.norm(pts, axis=1) * np.sqrt(a)
        # every node near the origin, where the error peaks, plus a random sample
        near = pts[r <= 0.5]
        ball = pts[(r > 0.5) & (r <= 4.5)]
        pts = np.vstack([near, ball[rng.choice(len(ball), 2000, replace=False)]])
        rhs = bb.collision_rhs_3d(st, pts, B, cfg)
        grid_worst = max(grid_worst, float(np.max(np.abs(rhs))) / lam)
    ok = iso_worst <= 1e-10 and grid_worst <= 1e-4
    return Result(6, "Gaussian stationarity", ok,
                  f"isotropic {iso_worst:.1e} <= 1e-10, grid3d {grid_worst:.1e} <= 1e-4 (x Lambda)",
                  data=dict(iso=iso_worst, grid=grid_worst))


@_timed
def c7_conservation():
    B = cutoff_kernels()["constant"]
    traj = bb.solve(two_point_datum(), B, bb.SolverConfig())
    table = traj.conserved_table()
    e0 = table[0][5]
    drift = max(abs(row[5] - e0) / e0 for row in table)
    mom = max(float(np.linalg.norm(row[2:5])) for row in table)
    mass_exact = all(row[1] == 1.0 for row in table)
    ok = drift <= 5e-3 and mom <= 1e-6 and mass_exact
    return Result(7, "conservation", ok,
                  f"energy drift {drift:.1e} <= 5e-3, |momentum| {mom:.1e} <= 1e-6, "
                  f"mass exactly 1: {mass_exact}",
                  data=dict(drift=drift, momentum=mom, mass_exact=mass_exact))


@_timed
def c8_continuity():
    phi0 = two_point_datum()
    worst, failed, factor2 = 0.0, [], None
    for name, B in cutoff_kernels().items():
        traj = bb.solve(phi0, B, bb.SolverConfig())
        for beta in (1.0, 1.5, 2.0):
            rep = dg.continuity_beta_check(traj, beta)
            worst = max(worst, rep.ratio)
            if not rep.passed:
                failed.append((name, beta))
            if beta == 2.0:
                factor2 = rep.extra["rate_factor"] if factor2 is None else max(
                    factor2, rep.extra["rate_factor"])
    ok = not failed and factor2 == 1.0
    return Result(8, "continuity bound", ok,
                  f"36 pairs x 6 cases, worst lhs/rhs {worst:.3f}, beta=2 rate factor {factor2}",
                  data=dict(worst=worst, failed=failed))


@_timed
def c9_lipschitz_quotient():
    phi0 = two_point_datum()
    B = cutoff_kernels()["constant"]
    traj = bb.solve(phi0, B, bb.SolverConfig())
    changes, maxima, ok = {}, {}, True
    for alpha in (0.0, 0.5):
        rep = dg.continuity_Mk_check(traj, 2, alpha, F0=phi0)
        changes[alpha] = rep.extra["relative_change"]
        maxima[alpha] = rep.extra["max_quotient"]
        ok &= rep.extra["finite"] and rep.extra["stable"]
    return Result(9, "M^alpha_k Lipschitz quotient", bool(ok),
                  ", ".join(f"alpha={a}: max {maxima[a]:.4f}, change {changes[a]:.1e}"
                            for a in maxima),
                  data=dict(changes=changes, maxima=maxima))


def cross_mode_ladder(levels=((17, 8, 4), (33, 16, 8), (65, 32, 16), (129, 32, 16)),
                      order="cubic"):
    """Relative disagreement of the two RHS modes on an isotropic datum."""
    B = cutoff_kernels()["constant"]
    phi0 = two_point_datum()
    dirs = bb._radial_probe_directions()
    radii = np.linspace(0.5, 7.5, 15)
    pts = (radii[None, :, None] * dirs[:, None, :]).reshape(-1, 3)

    def profile(r):
        return np.sinc(np.asarray(r) / np.pi)
    ref = bb.collision_rhs_iso(profile, np.linalg.norm(pts, axis=1), B,
                               bb.SolverConfig(theta_nodes=16))
    errs = []
    for N, az, tn in levels:
        cfg = bb.SolverConfig(mode="grid3d", N=N, azimuth_nodes=az, theta_nodes=tn,
                              interp_order=order)
        st = bb.init_from_measure(phi0, cfg)
        r3 = bb.collision_rhs_3d(st, pts, B, cfg)
        errs.append(float(np.max(np.abs(r3 - ref)) / np.max(np.abs(ref))))
    return errs


def cutoff_ladder(cutoffs=(1e-2, 1e-3, 1e-4), K=0.01, dt=0.02):
    B = kn.grazing(0.5, K=K)
    phi0 = two_point_datum()
    ends = [bb.solve(phi0, B, bb.SolverConfig(dt=dt, theta_min=tm)).final() for tm in cutoffs]
    return [bb.max_norm_difference(a, b) for a, b in zip(ends[:-1], ends[1:])]


@_timed
def c10_self_convergence():
    phi0 = two_point_datum()
    B = cutoff_kernels()["constant"]
    study = dg.convergence_study(phi0, B, bb.SolverConfig(dt=0.125), ladder=(1, 2, 4))
    order = study["order"]
    cross = cross_mode_ladder()
    cross_ok = all(b < a for a, b in zip(cross[:-1], cross[1:]))
    ladder = cutoff_ladder()
    factors = [a / b for a, b in zip(ladder[:-1], ladder[1:])]
    ok = abs(order - 4.0) <= 0.3 and cross_ok and all(f >= 2 for f in factors)
    return Result(10, "solver self-convergence", ok,
                  f"temporal order {order:.2f}; cross-mode "
                  + " > ".join(f"{e:.1e}" for e in cross)
                  + "; cutoff ladder factors " + ", ".join(f"{f:.1f}" for f in factors),
                  data=dict(order=order, cross=cross, cutoff=ladder, study=study))


def escaping_mass_distances(ns=(1, 2, 4, 8, 16, 32, 64), k=2, alpha=0.5, beta=1.0):
    """``dis_{k,alpha,beta}`` from ``delta_0`` of mass escaping to ``+-n e1``."""
    one = CharFun.one(3)
    out = []
    for n in ns:
        F = ms.make_measure(3, [[0, 0, 0], [n, 0, 0], [-n, 0, 0]],
                            [1 - 1 / n, 0.5 / n, 0.5 / n])
        out.append(dis_k_alpha_beta(CharFun.from_measure(F), one, k, alpha, beta))
    return out


@_timed
def c11_weak_convergence(ns=(1, 2, 4, 8, 16, 32, 64)):
    F = ms.symmetric_pair([1.0, 0.0, 0.0])
    seq = [ms.symmetric_pair([1.0 + 1.0 / n, 0.0, 0.0]) for n in ns]
    rep = mk.weak_convergence_check(seq, F, lambda v: np.sum(v * v, axis=1), 2, 0.5, 1.0,
                                    growth_constant=1.0)
    d_end, g_end = rep["distance"][-1], rep["gap"][-1]
    ok = (rep["distance_monotone"] and rep["gap_monotone"]
          and d_end < 1e-3 and g_end < 1e-3)
    return Result(11, "weak convergence with moments", bool(ok),
                  f"monotone: distance {rep['distance_monotone']}, gap {rep['gap_monotone']}; "
                  f"at n={ns[-1]}: distance {d_end:.2e}, gap {g_end:.2e} (target < 1e-3)",
                  data=rep)


CRITERIA = (c1_coefficients, c2_dual_delta, c3_identity, c4_tail_bound, c5_lambda_index,
            c6_gaussian_stationarity, c7_conservation, c8_continuity, c9_lipschitz_quotient,
            c10_self_convergence, c11_weak_convergence)

SEEDED = {c1_coefficients, c2_dual_delta, c3_identity, c4_tail_bound, c6_gaussian_stationarity}


def run_all(seed=DEFAULT_SEED, only=None, echo=None):
    out = []
    for fn in CRITERIA:
        if only and fn.__name__ not in only:
            continue
        res = fn(seed) if fn in SEEDED else fn()
        if echo:
            echo(summary_line(res))
        out.append(res)
    return out
