"""Time integration of the Fourier-side Boltzmann equation for Maxwellian
molecules.

Two modes share the same angular quadrature. ``isotropic`` evolves a radial
profile ``psi(r)`` with the sphere integral reduced to a single polar angle.
``grid3d`` evolves complex values on a uniform cube and integrates over the
full collision sphere with numba kernels.
"""

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from . import _grid3d
from .charfun import CharFun, DomainError, as_charfun, charfun_eval
from .kernels import KernelError, b_eval, symmetrize, total_rate
from .measures import DiscreteMeasure
from .quadrature import graded_edges_down, panel_rule

MODES = ("isotropic", "grid3d")
STABILITY_LIMIT = 0.5
RADIAL_TOL = 1e-10
TAIL_POWER = 2
TAIL_RADIUS_FRACTION = 0.5
DUMP_MAGIC = b"KCHR"


class StabilityError(RuntimeError):
    """Raised when ``dt * Lambda`` exceeds the explicit stability limit."""


@dataclass(frozen=True)
class SolverConfig:
    """Solver parameters.

    ``xi_max``, ``N`` and ``interp_order`` default per mode: radial grid of
    512 points up to 40 with cubic interpolation, or a 33^3 cube of half
    width 8 with trilinear interpolation. ``dt`` is an upper bound; it is
    shortened so that an integer number of steps fits between outputs.
    """

    T: float = 1.0
    dt: float = 0.05
    mode: str = "isotropic"
    theta_nodes: int = 8
    azimuth_nodes: int = 16
    theta_min: float = 0.0
    interp_order: str = None
    xi_max: float = None
    N: int = None
    theta_ratio: float = 2.0
    output_times: int = 9
    allow_unstable: bool = False
    fd_order: int = 2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        iso = self.mode == "isotropic"
        if self.interp_order is None:
            object.__setattr__(self, "interp_order", "cubic" if iso else "linear")
        if self.xi_max is None:
            object.__setattr__(self, "xi_max", 40.0 if iso else 8.0)
        if self.N is None:
            object.__setattr__(self, "N", 512 if iso else 33)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.T >= 0:
            raise ValueError("T must be nonnegative")
        if self.interp_order not in ("linear", "cubic"):
            raise ValueError("interp_order must be 'linear' or 'cubic'")
        if not self.xi_max > 0:
            raise ValueError("xi_max must be positive")
        if iso and self.N < 4:
            raise ValueError("radial grid needs at least 4 points")
        if not iso and (self.N % 2 == 0 or self.N < 5):
            raise ValueError("N must be odd (and >= 5) so that xi = 0 is a node")
        if self.theta_nodes < 1 or self.azimuth_nodes < 1:
            raise ValueError("quadrature orders must be positive")
        if self.theta_min < 0 or self.theta_min >= np.pi / 2:
            raise ValueError("theta_min must lie in [0, pi/2)")
        if self.theta_ratio <= 1:
            raise ValueError("theta_ratio must exceed 1")
        if self.output_times < 2:
            raise ValueError("need at least two output times")
        if self.fd_order not in (2, 4):
            raise ValueError("fd_order must be 2 or 4")


# ---------------------------------------------------------------- states


class RadialCharFun:
    """Radial profile ``psi`` on a uniform grid ``r_i = i h``.

    Off-grid values use piecewise polynomials in ``s = r^2`` (4-point
    Lagrange for ``cubic``, 2-point for ``linear``), which keeps the profile
    smooth and even across the origin.
    """

    def __init__(self, r_grid, values, interp_order="cubic"):
        r = np.asarray(r_grid, dtype=float)
        v = np.asarray(values, dtype=float)
        if r.ndim != 1 or r.shape != v.shape or r.size < 4:
            raise ValueError("r_grid and values must be matching 1D arrays (>= 4 points)")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise ValueError("r_grid must be increasing and start at 0")
        h = r[1]
        if not np.allclose(np.diff(r), h, rtol=1e-9, atol=0.0):
            raise ValueError("r_grid must be uniform")
        self.r_grid = r
        self.values = v
        self.h = float(h)
        self.interp_order = interp_order
        self.r_grid.setflags(write=False)
        self.values.setflags(write=False)

    @property
    def r_max(self):
        return float(self.r_grid[-1])

    def __repr__(self):
        return f"RadialCharFun(n={self.r_grid.size}, r_max={self.r_max:g})"

    def __call__(self, r):
        r = np.abs(np.asarray(r, dtype=float))
        if np.any(r > self.r_max * (1 + 1e-12)):
            raise DomainError(f"radius beyond the grid extent {self.r_max:g}")
        idx, w = radial_weights(r.ravel(), self.h, self.r_grid.size, self.interp_order)
        return np.sum(self.values[idx] * w, axis=1).reshape(r.shape)

    def charfun(self, dim=3):
        """``phi(xi) = psi(|xi|)`` as a :class:`CharFun` on the grid ball."""
        def f(xi):
            return self(np.linalg.norm(xi, axis=-1)).astype(complex)
        out = CharFun(f, dim, domain=self.r_max, name="radial state")
        out.radial = True
        return out

    def with_values(self, values):
        return RadialCharFun(self.r_grid, values, self.interp_order)


class CharFunGrid3D:
    """Complex values on the cube ``[-xi_max, xi_max]^3`` with ``N`` nodes per axis."""

    def __init__(self, xi_max, values, interp_order="linear"):
        v = np.ascontiguousarray(values, dtype=complex)
        if v.ndim != 3 or len(set(v.shape)) != 1 or v.shape[0] % 2 == 0:
            raise ValueError("values must be an N x N x N array with N odd")
        self.xi_max = float(xi_max)
        self.values = v
        self.interp_order = interp_order
        self.values.setflags(write=False)

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def h(self):
        return 2.0 * self.xi_max / (self.N - 1)

    @property
    def axis(self):
        return np.linspace(-self.xi_max, self.xi_max, self.N)

    @property
    def center(self):
        return self.N // 2

    def __repr__(self):
        return f"CharFunGrid3D(N={self.N}, xi_max={self.xi_max:g})"

    def nodes(self):
        """All grid nodes as an ``(N^3, 3)`` array in C order."""
        ax = self.axis
        X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
        return np.stack([X.ravel(), Y.ravel(), Z.ravel()], axis=1)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        pts = np.ascontiguousarray(xi.reshape(-1, 3))
        if np.any(np.abs(pts) > self.xi_max * (1 + 1e-12)):
            raise DomainError(f"point outside the grid cube of half width {self.xi_max:g}")
        out = _grid3d.interp_many(self.values, pts, self.xi_max, _order_code(self.interp_order))
        return out.reshape(xi.shape[:-1])

    def charfun(self):
        """Interpolating :class:`CharFun`, defined on the inscribed ball."""
        return CharFun(self, 3, domain=self.xi_max, name="grid state")

    def with_values(self, values):
        return CharFunGrid3D(self.xi_max, values, self.interp_order)


def _order_code(order):
    return 1 if order == "linear" else 3


def radial_weights(r, h, n, order="cubic"):
    """Stencil indices and weights for interpolation in ``s = r^2``.

    Returns arrays of shape ``(m, 2)`` or ``(m, 4)``.
    """
    r = np.asarray(r, dtype=float)
    s = r * r
    j = np.floor(r / h).astype(np.int64)
    if order == "linear":
        i0 = np.clip(j, 0, n - 2)
        idx = i0[:, None] + np.arange(2)
        sn = (idx * h) ** 2
        t = (s - sn[:, 0]) / (sn[:, 1] - sn[:, 0])
        return idx, np.stack([1.0 - t, t], axis=1)
    i0 = np.clip(j - 1, 0, n - 4)
    idx = i0[:, None] + np.arange(4)
    sn = (idx * h) ** 2
    w = np.ones((r.size, 4))
    for m in range(4):
        for l in range(4):
            if l != m:
                w[:, m] *= (s - sn[:, l]) / (sn[:, m] - sn[:, l])
    return idx, w


def radial_grid(cfg):
    return np.linspace(0.0, cfg.xi_max, cfg.N)


# ---------------------------------------------------------------- initial data


def isotropic_average(F):
    """Profile of the rotational average of ``F`` in three dimensions.

    The average of ``delta_v`` over rotations has characteristic function
    ``sin(r|v|) / (r|v|)``; returns a :class:`CharFun`.
    """
    if F.dim != 3:
        raise ValueError("rotational averages are taken in three dimensions")
    speeds = np.linalg.norm(F.points, axis=1)
    w = F.weights

    def f(xi):
        r = np.linalg.norm(np.asarray(xi, dtype=float), axis=-1)
        return (np.sinc(np.multiply.outer(r, speeds) / np.pi) @ w).astype(complex)
    out = CharFun(f, 3, name="rotational average")
    out.radial = True
    return out


def _radial_probe_directions():
    d = np.array([[0, 0, 1], [1, 0, 0], [0, 1, 0], [1, 1, 1], [1, -2, 0.5],
                  [-0.3, 0.8, -1.1], [2, -1, -1]], dtype=float)
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def _radial_profile(phi, r):
    """Sample ``phi`` along several directions and check it is radial and real."""
    dirs = _radial_probe_directions()
    vals = np.stack([phi(np.outer(r, e)) for e in dirs])
    spread = np.max(np.abs(vals - vals[0]))
    if spread > RADIAL_TOL or np.max(np.abs(vals[0].imag)) > RADIAL_TOL:
        raise ValueError(
            f"initial datum is not isotropic (directional spread {spread:.3g}); "
            "use mode='grid3d' or isotropic_average()")
    return vals[0].real


def init_from_measure(F, cfg):
    """Sample the initial characteristic function on the solver grid.

    ``F`` is a :class:`DiscreteMeasure` or any analytic initial datum
    accepted by :func:`as_charfun` (a :class:`CharFun` in three dimensions).
    """
    phi = as_charfun(F, 3)
    if phi.dim != 3:
        raise ValueError("the solver works in three dimensions")
    if cfg.mode == "isotropic":
        r = radial_grid(cfg)
        if phi.domain < cfg.xi_max:
            raise DomainError("initial datum not defined on the whole radial grid")
        psi = _radial_profile(phi, r)
        psi[0] = 1.0
        return RadialCharFun(r, psi, cfg.interp_order)
    ax = np.linspace(-cfg.xi_max, cfg.xi_max, cfg.N)
    X, Y, Z = np.meshgrid(ax, ax, ax, indexing="ij")
    pts = np.stack([X, Y, Z], axis=-1)
    if isinstance(F, DiscreteMeasure):
        vals = charfun_eval(F, pts)
    else:
        if np.isfinite(phi.domain) and phi.domain < np.sqrt(3) * cfg.xi_max:
            raise DomainError("initial datum not defined on the whole grid cube")
        vals = phi(pts)
    vals = np.asarray(vals, dtype=complex)
    c = cfg.N // 2
    vals[c, c, c] = 1.0
    return CharFunGrid3D(cfg.xi_max, vals, cfg.interp_order)


# ---------------------------------------------------------------- quadrature


def effective_kernel(B, cfg=None):
    """Half-domain kernel with the configured cutoff applied."""
    Bh = symmetrize(B)
    if cfg is not None and cfg.theta_min > max(Bh.theta_min, 0.0):
        Bh = Bh.with_cutoff(cfg.theta_min)
    return Bh


def collision_theta_rule(B, cfg=None):
    """Theta nodes and weights ``w_q b(theta_q) sin(theta_q)``.

    Singular kernels use panels graded geometrically from ``pi/2`` down to
    the cutoff; bounded kernels use two uniform panels on ``[0, theta_max]``.
    """
    cfg = cfg or SolverConfig()
    Bh = effective_kernel(B, cfg)
    lo = Bh.theta_min
    if Bh.singular:
        raise KernelError("singular kernel needs a positive theta_min for the solver")
    if lo > 0:
        edges = graded_edges_down(lo, Bh.theta_max, cfg.theta_ratio)
    else:
        edges = np.linspace(0.0, Bh.theta_max, 3)
    t, w = panel_rule(edges, cfg.theta_nodes)
    return t, w * b_eval(Bh, t) * np.sin(t)


def stability_rate(B, cfg):
    return total_rate(effective_kernel(B, cfg))


# ---------------------------------------------------------------- right-hand sides


def collision_rhs_iso(psi, r, B, cfg=None, rule=None):
    """Collision operator of a radial profile at radii ``r``.

    ``psi`` may be a :class:`RadialCharFun` or a vectorized callable of the
    radius (an analytic profile).
    """
    t, wb = rule if rule is not None else collision_theta_rule(B, cfg)
    r = np.asarray(r, dtype=float)
    flat = r.ravel()
    if isinstance(psi, RadialCharFun) and np.any(flat > psi.r_max * (1 + 1e-12)):
        raise DomainError("radius beyond the grid extent")
    c, s = np.cos(0.5 * t), np.sin(0.5 * t)
    plus = psi(np.outer(flat, c))
    minus = psi(np.outer(flat, s))
    base = psi(flat)
    gain = (plus * minus) @ wb
    out = 2.0 * np.pi * (gain - base * wb.sum())
    return out.reshape(r.shape)


class _IsoOperator:
    """Sparse interpolation matrices for the grid-node RHS."""

    def __init__(self, r_grid, order, rule):
        t, wb = rule
        n = r_grid.size
        h = r_grid[1]
        self.wb = wb
        self.wsum = wb.sum()
        self.n, self.q = n, t.size
        self.P_plus = self._matrix(np.outer(r_grid, np.cos(0.5 * t)).ravel(), h, n, order)
        self.P_minus = self._matrix(np.outer(r_grid, np.sin(0.5 * t)).ravel(), h, n, order)

    @staticmethod
    def _matrix(radii, h, n, order):
        idx, w = radial_weights(radii, h, n, order)
        rows = np.repeat(np.arange(radii.size), idx.shape[1])
        return sparse.csr_matrix((w.ravel(), (rows, idx.ravel())), shape=(radii.size, n))

    def __call__(self, v):
        plus = (self.P_plus @ v).reshape(self.n, self.q)
        minus = (self.P_minus @ v).reshape(self.n, self.q)
        return 2.0 * np.pi * ((plus * minus) @ self.wb - v * self.wsum)


def collision_rhs_3d(phi, xi, B, cfg=None, rule=None):
    """Collision operator of a grid state at points ``xi`` (shape ``(..., 3)``)."""
    cfg = cfg or SolverConfig(mode="grid3d")
    t, wb = rule if rule is not None else collision_theta_rule(B, cfg)
    xi = np.asarray(xi, dtype=float)
    pts = np.ascontiguousarray(xi.reshape(-1, 3))
    if np.any(np.linalg.norm(pts, axis=1) > phi.xi_max * (1 + 1e-12)):
        raise DomainError("|xi| must not exceed xi_max")
    out = _grid3d.collision_sum(phi.values, pts, phi.xi_max, t, wb,
                                cfg.azimuth_nodes, _order_code(phi.interp_order))
    return out.reshape(xi.shape[:-1])


class _GridOperator:
    def __init__(self, state, cfg, rule):
        self.t, self.wb = rule
        self.cfg = cfg
        self.xi_max = state.xi_max
        self.order = _order_code(state.interp_order)
        nodes = state.nodes()
        # node m mirrors to M - 1 - m, so half the cube (plus the centre) suffices
        self.half = nodes.shape[0] // 2 + 1
        self.points = np.ascontiguousarray(nodes[: self.half])
        self.shape = state.values.shape

    def __call__(self, v):
        part = _grid3d.collision_sum(v, self.points, self.xi_max, self.t, self.wb,
                                     self.cfg.azimuth_nodes, self.order)
        out = np.empty(2 * self.half - 1, dtype=complex)
        out[: self.half] = part
        out[self.half:] = np.conj(part[: self.half - 1][::-1])
        return out.reshape(self.shape)


def _operator(state, B, cfg):
    rule = collision_theta_rule(B, cfg)
    if isinstance(state, RadialCharFun):
        return _IsoOperator(state.r_grid, state.interp_order, rule)
    return _GridOperator(state, cfg, rule)


# ---------------------------------------------------------------- time stepping


def check_stability(B, cfg, dt=None):
    dt = cfg.dt if dt is None else dt
    lam = stability_rate(B, cfg)
    if not np.isfinite(lam):
        raise StabilityError("kernel has infinite total rate; set theta_min > 0")
    if dt * lam > STABILITY_LIMIT and not cfg.allow_unstable:
        raise StabilityError(
            f"dt*Lambda = {dt * lam:.4g} exceeds {STABILITY_LIMIT} "
            f"(Lambda = {lam:.4g}); reduce dt or set allow_unstable")
    return lam


def _pin(v, state):
    v = np.array(v, copy=True)
    if isinstance(state, RadialCharFun):
        v[0] = 1.0
    else:
        c = state.center
        v[c, c, c] = 1.0
    return v


def _rk4(op, v, dt):
    k1 = op(v)
    k2 = op(v + 0.5 * dt * k1)
    k3 = op(v + 0.5 * dt * k2)
    k4 = op(v + dt * k3)
    return v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(state, B, cfg, dt=None, _op=None):
    """Advance one classical 4-stage Runge-Kutta step and re-pin ``phi(0) = 1``."""
    dt = cfg.dt if dt is None else dt
    check_stability(B, cfg, dt)
    op = _op if _op is not None else _operator(state, B, cfg)
    return state.with_values(_pin(_rk4(op, state.values, dt), state))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple
    config: SolverConfig
    kernel: object = None
    dt_used: float = None
    rate: float = None
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, i):
        return self.times[i], self.states[i]

    @property
    def mode(self):
        return self.config.mode

    def final(self):
        return self.states[-1]

    def conserved_table(self):
        rows = []
        for t, st in zip(self.times, self.states):
            mass, mom, energy = conserved_quantities(st, self.config.fd_order)
            rows.append((float(t), mass, *mom, energy, sup_abs(st), tail_decay_proxy(st)))
        return rows

    def write_csv(self, path):
        write_rows(path, TRAJECTORY_HEADER, self.conserved_table())

    def dump(self, path):
        write_states(path, self)


def output_schedule(cfg):
    """Output times and the common step size (at most ``cfg.dt``)."""
    times = np.linspace(0.0, cfg.T, cfg.output_times)
    if cfg.T == 0:
        return times, 0, cfg.dt
    interval = cfg.T / (cfg.output_times - 1)
    n_sub = max(1, int(np.ceil(interval / cfg.dt * (1 - 1e-12))))
    return times, n_sub, interval / n_sub


def solve(F0, B, cfg):
    """Integrate from ``F0`` (measure or analytic initial datum) to ``cfg.T``."""
    times, n_sub, dt = output_schedule(cfg)
    lam = check_stability(B, cfg, dt)
    state = F0 if isinstance(F0, (RadialCharFun, CharFunGrid3D)) else init_from_measure(F0, cfg)
    op = _operator(state, B, cfg)
    states = [state]
    v = state.values
    for _ in range(len(times) - 1):
        for _ in range(n_sub):
            v = _pin(_rk4(op, v, dt), state)
        states.append(state.with_values(v))
    return Trajectory(times=times, states=tuple(states), config=cfg, kernel=B,
                      dt_used=dt, rate=lam)


# ---------------------------------------------------------------- observables


def conserved_quantities(state, fd_order=2):
    """Mass, momentum and energy read off finite differences at ``xi = 0``.

    ``fd_order=2`` uses the central stencils; ``4`` the 5-point ones.
    """
    if isinstance(state, RadialCharFun):
        v, h = state.values, state.h
        if fd_order == 2:
            d2 = 2.0 * (v[1] - v[0]) / h**2
        else:
            d2 = (16.0 * (v[1] - v[0]) - (v[2] - v[0])) / (6.0 * h**2)
        return float(v[0]), np.zeros(3), float(-3.0 * d2)
    v, h, c = state.values, state.h, state.center
    mom = np.empty(3)
    energy = 0.0
    for axis in range(3):
        def at(j, axis=axis):
            idx = [c, c, c]
            idx[axis] += j
            return v[tuple(idx)]
        if fd_order == 2:
            d1 = (at(1) - at(-1)) / (2 * h)
            d2 = (at(1) + at(-1) - 2 * at(0)) / h**2
        else:
            d1 = (8 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12 * h)
            d2 = (16 * (at(1) + at(-1)) - (at(2) + at(-2)) - 30 * at(0)) / (12 * h**2)
        mom[axis] = -d1.imag
        energy -= d2.real
    return float(v[c, c, c].real), mom, float(energy)


def sup_abs(state):
    return float(np.max(np.abs(state.values)))


def tail_decay_proxy(state, power=TAIL_POWER, fraction=TAIL_RADIUS_FRACTION):
    """``max |xi|^power |phi|`` over the shell ``|xi| ~ fraction * extent``."""
    if isinstance(state, RadialCharFun):
        r0 = fraction * state.r_max
        i = int(round(r0 / state.h))
        return float(state.r_grid[i] ** power * abs(state.values[i]))
    r0 = fraction * state.xi_max
    ax = state.axis
    R = np.sqrt(ax[:, None, None] ** 2 + ax[None, :, None] ** 2 + ax[None, None, :] ** 2)
    shell = np.abs(R - r0) <= 0.5 * state.h
    return float(np.max(R[shell] ** power * np.abs(state.values[shell])))


def max_norm_difference(a, b):
    """Grid max-norm difference of two states on the same grid."""
    if a.values.shape != b.values.shape:
        raise ValueError("states live on different grids")
    return float(np.max(np.abs(a.values - b.values)))


# ---------------------------------------------------------------- output

TRAJECTORY_HEADER = ("t", "mass", "momentum_x", "momentum_y", "momentum_z",
                     "energy", "sup_abs_phi", "tail_decay_proxy")


def format_value(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_rows(path_or_file, header, rows):
    """CSV with a one-line header and 17 significant digits."""
    lines = [",".join(header)]
    lines += [",".join(format_value(x) for x in row) for row in rows]
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", newline="\n") as fh:
            fh.write(text)


def write_states(path, traj):
    """Binary dump of all states.

    Layout (little-endian): 4-byte magic ``KCHR``; uint32 mode (0 isotropic,
    1 grid3d); uint32 size (radial points or N); float64 ``xi_max``; uint32
    number of states. Each state follows as float64 ``t`` and its values:
    ``size`` reals in isotropic mode, ``N^3`` complex values stored as
    interleaved (re, im) pairs in C order in grid mode.
    """
    mode = 0 if traj.mode == "isotropic" else 1
    first = traj.states[0]
    size = first.r_grid.size if mode == 0 else first.N
    xi_max = first.r_max if mode == 0 else first.xi_max
    with open(path, "wb") as fh:
        fh.write(DUMP_MAGIC)
        fh.write(struct.pack("<IIdI", mode, size, xi_max, len(traj.states)))
        for t, st in zip(traj.times, traj.states):
            fh.write(struct.pack("<d", float(t)))
            vals = st.values if mode == 0 else st.values.view(np.float64)
            fh.write(np.ascontiguousarray(vals, dtype="<f8").tobytes())


def read_states(path, interp_order=None):
    """Inverse of :func:`write_states`; returns ``(times, states)``."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != DUMP_MAGIC:
        raise ValueError("not a state dump")
    mode, size, xi_max, count = struct.unpack_from("<IIdI", data, 4)
    off = 4 + struct.calcsize("<IIdI")
    per = size if mode == 0 else 2 * size**3
    times, states = [], []
    for _ in range(count):
        (t,) = struct.unpack_from("<d", data, off)
        off += 8
        arr = np.frombuffer(data, dtype="<f8", count=per, offset=off).copy()
        off += 8 * per
        times.append(t)
        if mode == 0:
            states.append(RadialCharFun(np.linspace(0, xi_max, size), arr,
                                        interp_order or "cubic"))
        else:
            states.append(CharFunGrid3D(xi_max, arr.view(complex).reshape(size, size, size),
                                        interp_order or "linear"))
    return np.array(times), states
