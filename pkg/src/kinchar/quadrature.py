"""Quadrature building blocks: graded radial meshes and sphere rules.

Everything here returns plain ``(nodes, weights)`` arrays so that the
callers can vectorize integrands over the full tensor product.
"""

from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.special import gamma


@lru_cache(maxsize=None)
def _gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_rule(edges, order):
    """Composite Gauss-Legendre rule on consecutive panels.

    Parameters
    ----------
    edges : array_like
        Increasing panel boundaries.
    order : int
        Number of Gauss points per panel.

    Returns
    -------
    nodes, weights : ndarray
    """
    edges = np.asarray(edges, dtype=float)
    x, w = _gauss_legendre(order)
    a = edges[:-1, None]
    b = edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + half * (1.0 + x[None, :])).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def graded_edges(lo, hi, ratio, max_width=None):
    """Panel edges on ``[lo, hi]`` refined geometrically toward ``lo``.

    Panel widths grow by ``ratio`` starting from a first panel of width
    ``lo * (ratio - 1)``; once the width would exceed ``max_width`` the
    remaining interval is split uniformly.
    """
    if not lo > 0 or not hi > lo:
        raise ValueError("need 0 < lo < hi")
    if ratio <= 1.0:
        raise ValueError("grading ratio must exceed 1")
    if max_width is None:
        max_width = np.inf
    edges = [lo]
    x = lo
    while True:
        step = x * (ratio - 1.0)
        if step >= max_width or x + step >= hi:
            break
        x += step
        edges.append(x)
    if hi > edges[-1]:
        n_uniform = int(np.ceil((hi - edges[-1]) / max_width)) if np.isfinite(max_width) else 1
        edges.extend(np.linspace(edges[-1], hi, n_uniform + 1)[1:])
    return np.asarray(edges)


def graded_edges_down(lo, hi, ratio):
    """Panel edges on ``[lo, hi]`` anchored at ``hi`` and shrinking toward ``lo``.

    Edges are ``hi / ratio**i``; the last panel is truncated at ``lo``.
    Meshes for different ``lo`` sharing ``hi`` and ``ratio`` are nested.
    """
    if not 0 < lo < hi:
        raise ValueError("need 0 < lo < hi")
    n = int(np.floor(np.log(hi / lo) / np.log(ratio)))
    edges = hi / ratio ** np.arange(n + 1)
    if edges[-1] > lo * (1.0 + 1e-12):
        edges = np.append(edges, lo)
    else:
        edges[-1] = lo
    return edges[::-1].copy()


def sphere_area(d):
    """Surface measure of the unit sphere ``S^{d-1}``."""
    return 2.0 * np.pi ** (d / 2.0) / gamma(d / 2.0)


def sphere_rule(d, n_polar=24, n_azimuth=48):
    """Quadrature rule on ``S^{d-1}`` for ``d`` in {1, 2, 3}.

    ``d = 1`` gives the two points ``{-1, +1}``; ``d = 2`` a uniform rule on
    the circle with ``n_azimuth`` nodes; ``d = 3`` a product of
    Gauss-Legendre in ``cos(theta)`` and a uniform azimuthal rule.

    Returns
    -------
    directions : ndarray, shape (m, d)
    weights : ndarray, shape (m,)
        Weights sum to the sphere area.
    """
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if d == 2:
        t = 2.0 * np.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
        dirs = np.column_stack([np.cos(t), np.sin(t)])
        return dirs, np.full(n_azimuth, 2.0 * np.pi / n_azimuth)
    if d == 3:
        u, wu = _gauss_legendre(n_polar)
        t = 2.0 * np.pi * (np.arange(n_azimuth) + 0.5) / n_azimuth
        s = np.sqrt(1.0 - u**2)
        dirs = np.column_stack([
            np.repeat(s, n_azimuth) * np.tile(np.cos(t), n_polar),
            np.repeat(s, n_azimuth) * np.tile(np.sin(t), n_polar),
            np.repeat(u, n_azimuth),
        ])
        weights = np.repeat(wu, n_azimuth) * (2.0 * np.pi / n_azimuth)
        return dirs, weights
    raise NotImplementedError("sphere rules are provided for d <= 3")


@dataclass(frozen=True)
class QuadSpec:
    """Parameters of the radial x spherical product quadrature.

    The radial mesh is geometric from ``radial_min`` with ratio
    ``grading_ratio`` until panels reach the uniform width
    ``radial_max / radial_points``, then uniform up to ``radial_max``.
    Beyond ``radial_max`` a tail is added analytically.
    """

    radial_min: float = 1e-6
    radial_max: float = 40.0
    radial_points: int = 160
    grading_ratio: float = 1.15
    panel_order: int = 8
    sphere_nodes_polar: int = 32
    sphere_nodes_azimuth: int = 64
    rel_tol: float = 5e-3

    def __post_init__(self):
        if not 0 < self.radial_min < self.radial_max:
            raise ValueError("QuadSpec needs 0 < radial_min < radial_max")
        if self.radial_points < 1 or self.panel_order < 1:
            raise ValueError("QuadSpec needs positive radial_points and panel_order")
        if self.grading_ratio <= 1.0:
            raise ValueError("QuadSpec.grading_ratio must exceed 1")

    def radial_edges(self, upper=None):
        hi = self.radial_max if upper is None else upper
        width = self.radial_max / self.radial_points
        lo = min(self.radial_min, 0.5 * hi)
        return graded_edges(lo, hi, self.grading_ratio, max_width=width)

    def radial_rule(self, upper=None):
        return panel_rule(self.radial_edges(upper), self.panel_order)

    def coarsened(self):
        """Cheaper companion rule used for the two-level convergence check."""
        return replace(
            self,
            panel_order=max(2, self.panel_order // 2 + 1),
            sphere_nodes_polar=max(2, (2 * self.sphere_nodes_polar) // 3),
            sphere_nodes_azimuth=max(4, (2 * self.sphere_nodes_azimuth) // 3),
        )


def _default_directions_3d():
    dirs = []
    for v in np.ndindex(3, 3, 3):
        v = np.array(v) - 1.0
        if np.any(v):
            dirs.append(v / np.linalg.norm(v))
    return np.array(dirs)


@dataclass(frozen=True)
class GridSpec:
    """Sample set for sup-type norms: log-spaced radii times directions."""

    radial_min: float = 1e-6
    radial_max: float = 1e3
    radial_points: int = 400
    directions: tuple = None

    def points(self, d):
        radii = np.geomspace(self.radial_min, self.radial_max, self.radial_points)
        if self.directions is not None:
            dirs = np.asarray(self.directions, dtype=float).reshape(-1, d)
            dirs = dirs / np.linalg.norm(dirs, axis=1, keepdims=True)
        elif d == 1:
            dirs = np.array([[1.0], [-1.0]])
        elif d == 3:
            dirs = _default_directions_3d()
        else:
            dirs = np.eye(d)
            dirs = np.vstack([dirs, -dirs])
        return (radii[:, None, None] * dirs[None, :, :]).reshape(-1, d)
