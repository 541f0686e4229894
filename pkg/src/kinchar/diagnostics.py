"""Checks of the quantitative continuity estimates along computed trajectories."""

from dataclasses import dataclass, field, replace
from itertools import combinations

import numpy as np

from .bobylev import (CharFunGrid3D, RadialCharFun, effective_kernel, max_norm_difference,
                      solve, write_rows)
from .charfun import norm_Mk
from .kernels import lambda_beta
from .momentkit import total_moment_bound

REPORT_HEADER = ("check", "k", "alpha", "beta", "s", "t", "lhs", "rhs", "ratio", "pass")
DEFAULT_TOL = 0.05


@dataclass(frozen=True)
class ContinuityReport:
    """Per-pair comparisons plus the worst pair.

    ``ratio`` is ``max lhs / rhs`` over the pairs and ``passed`` holds when
    every pair satisfies ``lhs <= rhs * (1 + tol)``.
    """

    check: str
    k: object
    alpha: object
    beta: object
    pairs: tuple
    lhs: np.ndarray
    rhs: np.ndarray
    tol: float
    extra: dict = field(default_factory=dict)

    @property
    def ratios(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(self.rhs > 0, self.lhs / self.rhs, np.where(self.lhs > 0, np.inf, 0.0))
        return r

    @property
    def pair_pass(self):
        return self.lhs <= self.rhs * (1 + self.tol)

    @property
    def worst(self):
        return int(np.argmax(self.ratios))

    @property
    def measured_lhs(self):
        return float(self.lhs[self.worst])

    @property
    def bound_rhs(self):
        return float(self.rhs[self.worst])

    @property
    def ratio(self):
        return float(self.ratios[self.worst])

    @property
    def passed(self):
        return bool(np.all(self.pair_pass))

    def rows(self):
        blank = lambda x: "" if x is None else x
        return [(self.check, blank(self.k), blank(self.alpha), blank(self.beta), s, t,
                 float(l), float(r), float(q), bool(ok))
                for (s, t), l, r, q, ok in zip(self.pairs, self.lhs, self.rhs,
                                               self.ratios, self.pair_pass)]


def write_reports(path_or_file, reports):
    rows = [row for rep in reports for row in rep.rows()]
    write_rows(path_or_file, REPORT_HEADER, rows)


def time_pairs(times):
    """All ``(i, j)`` with ``i < j`` over the output times."""
    return list(combinations(range(len(times)), 2))


def _sup_weights(state, beta, grid):
    """Node values and ``|xi|^-beta`` weights of a state, skipping ``xi = 0``.

    ``grid`` optionally limits the nodes to ``|xi| <= grid``.
    """
    if isinstance(state, RadialCharFun):
        r = state.r_grid
    elif isinstance(state, CharFunGrid3D):
        ax = state.axis
        r = np.sqrt(ax[:, None, None] ** 2 + ax[None, :, None] ** 2
                    + ax[None, None, :] ** 2).ravel()
    else:
        raise TypeError("expected a solver state")
    keep = r > 0
    if grid is not None:
        keep &= r <= grid
    return keep, r[keep] ** (-beta)


def grid_beta_norm(a, b, beta, grid=None):
    """``sup |a - b| / |xi|^beta`` over the shared solver grid."""
    keep, w = _sup_weights(a, beta, grid)
    diff = np.abs(np.ravel(a.values) - np.ravel(b.values))[keep]
    return float(np.max(diff * w))


def grid_beta_seed(state, beta, grid=None):
    """``sup |1 - phi| / |xi|^beta`` on the solver grid."""
    keep, w = _sup_weights(state, beta, grid)
    return float(np.max(np.abs(1.0 - np.ravel(state.values))[keep] * w))


def rate_factor(B, beta, T, cfg=None):
    """``exp(lambda_beta T)`` for the kernel the solver actually used."""
    if beta == 2:
        return 1.0  # the bracket vanishes identically
    return float(np.exp(lambda_beta(effective_kernel(B, cfg), beta) * T))


def continuity_beta_check(traj, beta, B=None, grid=None, tol=DEFAULT_TOL):
    """Compare ``||phi(t) - phi(s)||_beta`` against ``|t-s| e^{lambda_beta T} ||1-phi_0||_beta``.

    Both sides are sup norms over the solver's own nodes (optionally limited to
    ``|xi| <= grid``), so the comparison is internally consistent. Raises
    :class:`~kinchar.kernels.KernelError` when ``lambda_beta`` diverges.
    """
    if not 0 < beta <= 2:
        raise ValueError("beta must lie in (0, 2]")
    B = traj.kernel if B is None else B
    T = float(traj.times[-1])
    factor = rate_factor(B, beta, T, traj.config)
    seed = grid_beta_seed(traj.states[0], beta, grid)
    pairs, lhs, rhs = [], [], []
    for i, j in time_pairs(traj.times):
        s, t = float(traj.times[i]), float(traj.times[j])
        pairs.append((s, t))
        lhs.append(grid_beta_norm(traj.states[j], traj.states[i], beta, grid))
        rhs.append((t - s) * factor * seed)
    return ContinuityReport("continuity_beta", None, None, beta, tuple(pairs),
                            np.array(lhs), np.array(rhs), tol,
                            dict(rate_factor=factor, seed_norm=seed, T=T))


def moment_trace(traj, k, alpha, quad=None):
    """``(t, m(t))`` with ``m`` the Fourier-side moment of each state.

    The integral covers the resolved ball of each state; ``domain`` in the
    returned info dict records its radius.
    """
    out, domains = [], []
    for t, st in zip(traj.times, traj.states):
        m, info = total_moment_bound(st.charfun(), k, alpha, quad, full_output=True)
        out.append((float(t), float(m)))
        domains.append(info["domain"])
    return out, dict(domain=min(domains))


def lipschitz_quotients(traj, k, alpha, quad=None):
    """Empirical ``||phi(t)-phi(s)||_{M^alpha_k} / (|t-s| sup m)`` over all pairs."""
    trace, _ = moment_trace(traj, k, alpha, quad)
    m_sup = max(m for _, m in trace)
    if not np.isfinite(m_sup) or m_sup <= 0:
        raise ValueError("moment trace is not finite and positive")
    funs = [st.charfun() for st in traj.states]
    pairs, q = [], []
    for i, j in time_pairs(traj.times):
        s, t = float(traj.times[i]), float(traj.times[j])
        pairs.append((s, t))
        q.append(norm_Mk(funs[j], funs[i], k, alpha, quad=quad) / ((t - s) * m_sup))
    return tuple(pairs), np.array(q), m_sup


def continuity_Mk_check(traj, k, alpha, quad=None, refined=None, tol=0.10, F0=None):
    """Report the empirical Lipschitz quotients and their refinement stability.

    ``refined`` is the same problem integrated with half the step; when it
    is omitted and ``F0`` is given the run is repeated with ``dt / 2``.

    Returns
    -------
    ContinuityReport
        ``lhs`` holds the quotients, ``rhs`` is the refined maximum, so the
        report passes when every quotient stays within ``1 + tol`` of it.
        ``extra`` records ``max_quotient``, ``refined_max`` and
        ``relative_change``, and ``stable`` (change ``<= tol``).
    """
    pairs, q, m_sup = lipschitz_quotients(traj, k, alpha, quad)
    qmax = float(np.max(q))
    if refined is None and F0 is not None:
        cfg = replace(traj.config, dt=traj.dt_used / 2)
        refined = solve(F0, traj.kernel, cfg)
    extra = dict(max_quotient=qmax, moment_sup=m_sup, finite=bool(np.isfinite(qmax)))
    if refined is not None:
        _, q2, _ = lipschitz_quotients(refined, k, alpha, quad)
        q2max = float(np.max(q2))
        change = abs(qmax - q2max) / max(q2max, np.finfo(float).tiny) if q2max > 0 else (
            0.0 if qmax == 0 else np.inf)
        extra.update(refined_max=q2max, relative_change=change, stable=bool(change <= tol))
        bound = np.full(len(q), q2max)
    else:
        bound = np.full(len(q), np.inf)
    return ContinuityReport("continuity_Mk", k, alpha, None, pairs, q, bound, tol, extra)


# ---------------------------------------------------------------- convergence


def observed_order(d_coarse, d_fine, ratio=2.0):
    """Order from two successive solution differences.

    With solutions ``u_h, u_{h/r}, u_{h/r^2}`` and ``d_coarse = |u_h - u_{h/r}|``,
    ``d_fine = |u_{h/r} - u_{h/r^2}|`` the order is ``log(d_coarse/d_fine)/log r``.
    """
    if d_coarse <= 0 or d_fine <= 0:
        return np.nan
    return float(np.log(d_coarse / d_fine) / np.log(ratio))


def convergence_study(F0, B, cfg, ladder=(1, 2, 4, 8), parameter="dt"):
    """Observed orders of convergence under successive refinement.

    ``parameter`` is ``"dt"`` (divide the step), ``"theta"`` (multiply the
    theta order) or ``"grid"`` (refine the spatial grid, isotropic mode only,
    compared on the coarse nodes). The ladder needs at least three levels.

    Returns
    -------
    dict
        ``differences`` between successive end states, ``orders`` from
        consecutive difference ratios, and ``order`` with ``order_range``
        (min, max of the observed orders) as a crude confidence band.
    """
    if len(ladder) < 3:
        raise ValueError("need at least three refinement levels")
    ends = []
    for f in ladder:
        if parameter == "dt":
            c = replace(cfg, dt=cfg.dt / f)
        elif parameter == "theta":
            c = replace(cfg, theta_nodes=cfg.theta_nodes * f)
        elif parameter == "grid":
            if cfg.mode != "isotropic":
                raise ValueError("grid refinement study is implemented for the radial mode")
            c = replace(cfg, N=(cfg.N - 1) * f + 1)
        else:
            raise ValueError(f"unknown parameter {parameter!r}")
        ends.append((f, solve(F0, B, c).final()))
    diffs = []
    for (f1, a), (f2, b) in zip(ends[:-1], ends[1:]):
        if parameter == "grid":
            diffs.append(float(np.max(np.abs(a.values[::f1] - b.values[::f2]))))
        else:
            diffs.append(max_norm_difference(a, b))
    ratios = [ladder[i + 1] / ladder[i] for i in range(len(ladder) - 1)]
    orders = [observed_order(diffs[i], diffs[i + 1], ratios[i + 1])
              for i in range(len(diffs) - 1)]
    finite = [o for o in orders if np.isfinite(o)]
    return dict(parameter=parameter, ladder=tuple(ladder), differences=diffs,
                orders=orders, order=finite[-1] if finite else np.nan,
                order_range=(min(finite), max(finite)) if finite else (np.nan, np.nan))
