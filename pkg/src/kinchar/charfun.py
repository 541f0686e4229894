"""Characteristic functions, symmetric difference operators and the norms
built from them.

A :class:`CharFun` wraps any evaluator ``xi -> phi(xi)``. The difference
operator of order ``k`` is

    Delta^k phi(xi) = sum_{j=0}^{k} c_{k,j} Re phi(j xi)
                    = int sin^{2k}(v . xi / 2) dF(v),

with ``c_{k,j}`` the cosine coefficients of ``sin^{2k}(x/2)``.
"""

from dataclasses import dataclass, replace
from functools import lru_cache
from math import comb

import numpy as np

from .quadrature import GridSpec, QuadSpec, panel_rule, sphere_area, sphere_rule

MAX_K = 16


class QuadratureError(RuntimeError):
    """Two refinement levels of an integral disagree beyond tolerance."""


class DomainError(ValueError):
    """Evaluation requested outside the valid domain of a grid-backed CharFun."""


@dataclass(frozen=True)
class DifferenceCoefficients:
    k: int
    c: tuple

    def __iter__(self):
        return iter(self.c)

    def as_array(self):
        return np.array(self.c)


@lru_cache(maxsize=None)
def diff_coeffs(k):
    """Closed-form cosine coefficients of ``sin^{2k}(x/2)``.

    ``c_{k,0} = binom(2k, k) / 4^k`` and
    ``c_{k,j} = (-1)^j binom(2k, k+j) / 2^{2k-1}`` for ``1 <= j <= k``.
    The integer ratios are rounded once, so every entry is exact to the last
    bit for ``k <= 16``.
    """
    if int(k) != k or not 1 <= k <= MAX_K:
        raise ValueError(f"k must be an integer in [1, {MAX_K}], got {k}")
    k = int(k)
    c = [comb(2 * k, k) / 4**k]
    c += [(-1) ** j * comb(2 * k, k + j) / 2 ** (2 * k - 1) for j in range(1, k + 1)]
    return DifferenceCoefficients(k, tuple(c))


class CharFun:
    """A characteristic function ``phi: R^d -> C``.

    Parameters
    ----------
    func : callable
        Maps an array of shape ``(m, d)`` to ``m`` complex values.
    dim : int
    domain : float
        Radius of the ball on which ``func`` may be evaluated; ``inf`` for
        analytic functions. Grid-backed functions refuse to extrapolate.
    """

    def __init__(self, func, dim, domain=np.inf, name=None):
        self._func = func
        self.dim = int(dim)
        self.domain = float(domain)
        self.name = name or getattr(func, "__name__", "phi")
        self.measure = None
        self.is_one = False

    exact_delta = False
    radial = False  # phi depends on |xi| only

    def __repr__(self):
        return f"CharFun({self.name!r}, dim={self.dim}, domain={self.domain})"

    def _check(self, xi):
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.dim:
            raise ValueError(f"expected points of dimension {self.dim}, got {xi.shape}")
        if np.isfinite(self.domain):
            r = np.linalg.norm(xi.reshape(-1, self.dim), axis=1)
            if r.size and r.max() > self.domain * (1 + 1e-12):
                raise DomainError(
                    f"|xi| = {r.max():.6g} outside the resolved domain {self.domain:.6g}")
        return xi

    def __call__(self, xi):
        xi = self._check(xi)
        shape = xi.shape[:-1]
        out = self._func(xi.reshape(-1, self.dim))
        return np.asarray(out, dtype=complex).reshape(shape)

    def real_multiples(self, xi, k):
        """``Re phi(j xi)`` for ``j = 0..k``, stacked along the first axis."""
        xi = np.asarray(xi, dtype=float)
        self._check(k * xi)
        flat = xi.reshape(-1, self.dim)
        out = np.empty((k + 1, flat.shape[0]))
        out[0] = 1.0
        for j in range(1, k + 1):
            out[j] = np.real(self._func(j * flat))
        return out.reshape((k + 1,) + xi.shape[:-1])

    def delta(self, xi, k):
        """``Delta^k phi`` at the points ``xi`` (shape ``(m, d)``)."""
        c = diff_coeffs(k).as_array()
        return np.tensordot(c, self.real_multiples(xi, k), axes=(0, 0))

    @classmethod
    def from_measure(cls, F):
        pts, w = F.points, F.weights

        def phi(xi):
            return np.exp(-1j * (xi @ pts.T)) @ w

        out = _MeasureCharFun(phi, F.dim, name="measure")
        out.measure = F
        return out

    @classmethod
    def one(cls, dim):
        """Characteristic function of ``delta_0``."""
        out = cls(lambda xi: np.ones(xi.shape[0], dtype=complex), dim, name="one")
        out.is_one = True
        out.radial = True
        return out

    @classmethod
    def gaussian(cls, a, dim=3):
        """``exp(-a |xi|^2)``, the centred Gaussian with energy ``2 a d``."""
        def phi(xi):
            return np.exp(-a * np.einsum("ij,ij->i", xi, xi)).astype(complex)
        out = cls(phi, dim, name=f"gaussian(a={a})")
        out.radial = True
        return out


class _MeasureCharFun(CharFun):
    # sine form: no cancellation near xi = 0
    exact_delta = True

    def delta(self, xi, k):
        return delta_k_direct(self.measure, k, xi)

    def real_multiples(self, xi, k):
        xi = np.asarray(xi, dtype=float)
        self._check(xi)
        flat = xi.reshape(-1, self.dim)
        x = flat @ self.measure.points.T
        out = np.empty((k + 1, flat.shape[0]))
        out[0] = 1.0
        c_prev = np.ones_like(x)
        c_cur = np.cos(x)
        w = self.measure.weights
        out[1] = c_cur @ w
        for j in range(2, k + 1):
            c_prev, c_cur = c_cur, 2.0 * np.cos(x) * c_cur - c_prev
            out[j] = c_cur @ w
        return out.reshape((k + 1,) + xi.shape[:-1])


def as_charfun(obj, dim=None):
    """Coerce a DiscreteMeasure, CharFun or the scalar 1 to a CharFun."""
    if isinstance(obj, CharFun):
        return obj
    if hasattr(obj, "points") and hasattr(obj, "weights"):
        return CharFun.from_measure(obj)
    if np.isscalar(obj) and obj == 1:
        if dim is None:
            raise ValueError("dimension required to build the constant CharFun")
        return CharFun.one(dim)
    raise TypeError(f"cannot interpret {obj!r} as a characteristic function")


def charfun_eval(F, xi):
    """``phi_F(xi) = sum_i w_i exp(-i v_i . xi)``; ``xi`` may be batched."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != F.dim:
        raise ValueError(f"xi has dimension {xi.shape[-1]}, measure has {F.dim}")
    val = np.exp(-1j * (xi @ F.points.T)) @ F.weights
    return complex(val) if val.ndim == 0 else val


def delta_k(phi, k, xi):
    """``sum_j c_{k,j} Re phi(j xi)`` for a CharFun (or measure)."""
    phi = as_charfun(phi)
    c = diff_coeffs(k).as_array()
    re = phi.real_multiples(xi, k)
    out = np.tensordot(c, re, axes=(0, 0))
    return float(out) if out.ndim == 0 else out


def delta_k_direct(F, k, xi):
    """``sum_i w_i sin^{2k}(v_i . xi / 2)``."""
    diff_coeffs(k)
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != F.dim:
        raise ValueError(f"xi has dimension {xi.shape[-1]}, measure has {F.dim}")
    s = np.sin(0.5 * (xi @ F.points.T)) ** (2 * k)
    out = s @ F.weights
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# sup-type norms

def _grid_points(grid, d):
    if grid is None:
        grid = GridSpec()
    if isinstance(grid, GridSpec):
        return grid.points(d)
    pts = np.asarray(grid, dtype=float).reshape(-1, d)
    return pts


def norm_alpha(phi, psi, alpha, grid=None, full_output=False):
    """Grid supremum of ``|phi - psi| / |xi|^alpha``.

    The result is a lower bound of the supremum over ``R^d``. Points with
    ``xi = 0`` or outside either function's domain are skipped.
    """
    if not 0 < alpha <= 2:
        raise ValueError("alpha must lie in (0, 2]")
    phi = as_charfun(phi, getattr(psi, "dim", None))
    psi = as_charfun(psi, phi.dim)
    pts = _grid_points(grid, phi.dim)
    r = np.linalg.norm(pts, axis=1)
    limit = min(phi.domain, psi.domain)
    keep = (r > 0) & (r <= limit * (1 + 1e-12))
    if not np.any(keep):
        raise ValueError("empty grid for norm_alpha")
    pts, r = pts[keep], r[keep]
    q = np.abs(phi(pts) - psi(pts)) / r**alpha
    i = int(np.argmax(q))
    value = float(q[i])
    if full_output:
        return value, dict(argmax=pts[i], points=len(r), domain=limit)
    return value


# --------------------------------------------------------------------------
# integral norms

def _power_head(r0, f0, r1, f1, lo):
    """Integral over ``[0, lo]`` of the power law through two samples."""
    if f0 <= 0 or f1 <= 0:
        return 0.0
    s = np.log(f1 / f0) / np.log(r1 / r0)
    if s <= -1:
        raise QuadratureError("integrand not integrable at the origin")
    return f0 / r0**s * lo ** (s + 1) / (s + 1)


def _sphere_profile(g, d, radii, quad, chunk_points=262144, radial=False):
    if radial:
        dirs = np.eye(d)[:1]
        wdirs = np.array([sphere_area(d)])
    else:
        dirs, wdirs = sphere_rule(d, quad.sphere_nodes_polar, quad.sphere_nodes_azimuth)
    m = len(wdirs)
    step = max(1, chunk_points // m)
    out = np.empty(len(radii))
    for i0 in range(0, len(radii), step):
        r = radii[i0:i0 + step]
        pts = (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)
        out[i0:i0 + len(r)] = np.asarray(g(pts)).reshape(len(r), m) @ wdirs
    return out


def _integrate_once(g, d, p, quad, upper, tail, noise, radial=False):
    """One quadrature level; ``p`` may be an array of exponents."""
    hi = quad.radial_max if upper is None else upper
    edges = quad.radial_edges(hi)
    r, w = panel_rule(edges, quad.panel_order)
    S = _sphere_profile(g, d, r, quad, radial=radial)
    lo = edges[0]
    if noise > 0:
        # nodes where the profile sits at the rounding floor are replaced by
        # the power law through the first two trustworthy nodes
        floor = 1e4 * noise * sphere_area(d)
        good = np.nonzero(S > floor)[0]
        if good.size >= 2 and good[0] > 0:
            i0 = good[0]
            i1 = min(i0 + quad.panel_order, len(r) - 1)
            s = np.log(S[i1] / S[i0]) / np.log(r[i1] / r[i0])
            S = S.copy()
            S[:i0] = S[i0] * (r[:i0] / r[i0]) ** s
    p = np.atleast_1d(np.asarray(p, dtype=float))
    values = np.empty(p.shape)
    uncs = np.zeros(p.shape)
    if tail:
        outer = r >= 0.75 * hi
        half = r >= 0.5 * hi
        a_outer = np.average(S[outer], weights=w[outer])
        a_half = np.average(S[half], weights=w[half])
    for n, pn in enumerate(p):
        f = S * r ** (-1.0 - pn)
        values[n] = w @ f + _power_head(r[0], f[0], r[1], f[1], lo)
        if tail:
            values[n] += a_outer * hi ** (-pn) / pn
            uncs[n] = abs(a_outer - a_half) * hi ** (-pn) / pn
    return values, uncs, hi


def radial_integral(g, d, p, quad=None, upper=None, tail=True, abs_floor=1e-10, noise=0.0,
                    radial=False):
    """``int_{|xi| <= upper} g(xi) / |xi|^{d+p} dxi`` by graded product quadrature.

    With ``upper=None`` the integral runs over ``R^d``: the mesh stops at
    ``quad.radial_max`` and the remainder is extrapolated from the mean of
    the angular profile over the outer quarter of the mesh. ``noise`` is the
    absolute rounding floor of ``g``; profile values below it (near the
    origin) are replaced by a fitted power law. ``p`` may be a sequence, in
    which case one angular profile serves every exponent and arrays are
    returned. ``radial=True`` declares ``g`` rotation invariant, so one
    direction replaces the sphere rule.

    Returns
    -------
    value : float or ndarray
    info : dict
        ``est_error`` (level difference plus tail uncertainty), ``coarse``,
        ``radius`` (last resolved radius).

    Raises
    ------
    QuadratureError
        If the two refinement levels disagree by more than ``quad.rel_tol``.
    """
    quad = quad or QuadSpec()
    scalar = np.ndim(p) == 0
    tail = tail and upper is None
    fine, unc, hi = _integrate_once(g, d, p, quad, upper, tail, noise, radial)
    coarse, _, _ = _integrate_once(g, d, p, quad.coarsened(), upper, tail, noise, radial)
    diff = np.abs(fine - coarse)
    bad = diff > quad.rel_tol * np.maximum(np.abs(fine), abs_floor)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise QuadratureError(
            f"refinement levels disagree: {fine[i]:.10g} vs {coarse[i]:.10g}")
    err = diff + unc
    if scalar:
        return float(fine[0]), dict(est_error=float(err[0]), coarse=float(coarse[0]), radius=hi)
    return fine, dict(est_error=err, coarse=coarse, radius=hi)


def _resolved_upper(limit, quad):
    if np.isfinite(limit) and limit < quad.radial_max:
        return limit
    return None


def norm_Mk(phi, psi, k, alpha, d=None, quad=None, full_output=False):
    """``int |Delta^k phi - Delta^k psi| / |xi|^{d+2k-2+alpha} dxi``.

    For grid-backed functions the integral is taken over the ball where
    ``Delta^k`` can be evaluated and the outer remainder is extrapolated.
    """
    if not 0 <= alpha < 2 or k + alpha <= 1:
        raise ValueError("need alpha in [0, 2) and k + alpha > 1")
    phi = as_charfun(phi, d or getattr(psi, "dim", None))
    psi = as_charfun(psi, phi.dim)
    d = phi.dim if d is None else d
    if d != phi.dim or d != psi.dim:
        raise ValueError("dimension mismatch")
    quad = quad or QuadSpec()
    p = 2 * k - 2 + alpha

    def g(x):
        return np.abs(phi.delta(x, k) - psi.delta(x, k))

    noise = 0.0 if phi.exact_delta and psi.exact_delta else _delta_noise(k)

    radial = phi.radial and psi.radial
    limit = min(phi.domain, psi.domain) / k
    upper = _resolved_upper(limit, quad)
    if upper is None:
        value, info = radial_integral(g, d, p, quad, noise=noise, radial=radial)
    else:
        value, info = _extrapolated(g, d, p, quad, upper, noise=noise, radial=radial)
    info["domain"] = limit
    return (value, info) if full_output else value


def _delta_noise(k):
    # rounding floor of the alternating cosine sum for |phi| <= 1
    return 64 * np.finfo(float).eps * float(np.abs(diff_coeffs(k).as_array()).sum())


def _extrapolated(g, d, p, quad, upper, **kwargs):
    # keep the panel width of ``quad`` while shrinking the mesh to the ball
    n = max(8, int(round(quad.radial_points * upper / quad.radial_max)))
    return radial_integral(g, d, p, replace(quad, radial_max=upper, radial_points=n), **kwargs)


def norm_Mtilde(phi, psi, alpha, d=None, quad=None, full_output=False):
    """``int |Re phi - Re psi| / |xi|^{d+alpha} dxi``."""
    if not 0 < alpha < 2:
        raise ValueError("alpha must lie in (0, 2)")
    phi = as_charfun(phi, d or getattr(psi, "dim", None))
    psi = as_charfun(psi, phi.dim)
    d = phi.dim if d is None else d
    quad = quad or QuadSpec()

    def g(x):
        return 2.0 * np.abs(phi.delta(x, 1) - psi.delta(x, 1))

    noise = 0.0 if phi.exact_delta and psi.exact_delta else 2 * _delta_noise(1)
    radial = phi.radial and psi.radial
    limit = min(phi.domain, psi.domain)
    upper = _resolved_upper(limit, quad)
    if upper is None:
        value, info = radial_integral(g, d, alpha, quad, noise=noise, radial=radial)
    else:
        value, info = _extrapolated(g, d, alpha, quad, upper, noise=noise, radial=radial)
    info["domain"] = limit
    return (value, info) if full_output else value


def dis_k_alpha_beta(phi, psi, k, alpha, beta, grid=None, quad=None):
    """``||phi - psi||_{M^alpha_k} + ||phi - psi||_beta``."""
    if k == 1 and not 0 < beta < alpha:
        raise ValueError("k = 1 requires 0 < beta < alpha")
    if k >= 2 and not 0 < beta < 2:
        raise ValueError("k >= 2 requires 0 < beta < 2")
    return norm_Mk(phi, psi, k, alpha, quad=quad) + norm_alpha(phi, psi, beta, grid)


def dis_alpha_beta_eps(phi, psi, alpha, beta, eps, grid=None, quad=None):
    """``||phi - psi||_{M~alpha} + ||phi - psi||_beta + ||phi - psi||_beta^eps``."""
    if not 0 < beta < alpha < 2 or not 0 < eps < 1:
        raise ValueError("need 0 < beta < alpha < 2 and 0 < eps < 1")
    sup = norm_alpha(phi, psi, beta, grid)
    return norm_Mtilde(phi, psi, alpha, quad=quad) + sup + sup**eps
