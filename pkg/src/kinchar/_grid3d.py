"""Numba kernels for the 3D grid mode: interpolation and the collision sum."""

import numba as nb
import numpy as np


@nb.njit(cache=True, inline="always")
def _axis_linear(x, n):
    i = int(np.floor(x))
    if i < 0:
        i = 0
    elif i > n - 2:
        i = n - 2
    t = x - i
    return i, 1.0 - t, t


@nb.njit(cache=True)
def interp_point(values, x, y, z, order):
    """Interpolate at fractional index coordinates ``(x, y, z)``."""
    n = values.shape[0]
    x = min(max(x, 0.0), n - 1.0)
    y = min(max(y, 0.0), n - 1.0)
    z = min(max(z, 0.0), n - 1.0)
    if order == 1:
        i, a0, a1 = _axis_linear(x, n)
        j, b0, b1 = _axis_linear(y, n)
        k, c0, c1 = _axis_linear(z, n)
        return (a0 * (b0 * (c0 * values[i, j, k] + c1 * values[i, j, k + 1])
                      + b1 * (c0 * values[i, j + 1, k] + c1 * values[i, j + 1, k + 1]))
                + a1 * (b0 * (c0 * values[i + 1, j, k] + c1 * values[i + 1, j, k + 1])
                        + b1 * (c0 * values[i + 1, j + 1, k] + c1 * values[i + 1, j + 1, k + 1])))
    wx = np.empty(4)
    wy = np.empty(4)
    wz = np.empty(4)
    i = _lagrange4(x, n, wx)
    j = _lagrange4(y, n, wy)
    k = _lagrange4(z, n, wz)
    acc = 0.0 * values[0, 0, 0]
    for a in range(4):
        sa = 0.0 * values[0, 0, 0]
        for b in range(4):
            sb = 0.0 * values[0, 0, 0]
            for c in range(4):
                sb += wz[c] * values[i + a, j + b, k + c]
            sa += wy[b] * sb
        acc += wx[a] * sa
    return acc


@nb.njit(cache=True, inline="always")
def _lagrange4(x, n, w):
    i = int(np.floor(x)) - 1
    if i < 0:
        i = 0
    elif i > n - 4:
        i = n - 4
    t = x - i
    w[0] = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0
    w[1] = t * (t - 2.0) * (t - 3.0) / 2.0
    w[2] = -t * (t - 1.0) * (t - 3.0) / 2.0
    w[3] = t * (t - 1.0) * (t - 2.0) / 6.0
    return i


@nb.njit(cache=True)
def interp_many(values, points, xi_max, order):
    n = values.shape[0]
    h = 2.0 * xi_max / (n - 1)
    out = np.empty(points.shape[0], dtype=values.dtype)
    for m in range(points.shape[0]):
        out[m] = interp_point(values, (points[m, 0] + xi_max) / h,
                              (points[m, 1] + xi_max) / h,
                              (points[m, 2] + xi_max) / h, order)
    return out


@nb.njit(cache=True)
def collision_sum(values, points, xi_max, theta, wtheta, n_azimuth, order):
    """``sum_{theta, azimuth} w b sin(theta) [phi(xi+) phi(xi-) - phi(xi)]``
    at each row of ``points``; ``wtheta`` already carries ``b sin(theta)``
    and the theta weights, the azimuthal weight is added here."""
    n = values.shape[0]
    h = 2.0 * xi_max / (n - 1)
    dphi = 2.0 * np.pi / n_azimuth
    cosa = np.empty(n_azimuth)
    sina = np.empty(n_azimuth)
    for a in range(n_azimuth):
        ang = (a + 0.5) * dphi
        cosa[a] = np.cos(ang)
        sina[a] = np.sin(ang)
    wsum = 0.0
    for q in range(theta.shape[0]):
        wsum += wtheta[q]
    out = np.zeros(points.shape[0], dtype=values.dtype)
    for m in range(points.shape[0]):
        px, py, pz = points[m, 0], points[m, 1], points[m, 2]
        r = np.sqrt(px * px + py * py + pz * pz)
        if r == 0.0:
            continue
        nx, ny, nz = px / r, py / r, pz / r
        # orthonormal frame around n
        if abs(nx) < 0.9:
            ax, ay, az = 1.0, 0.0, 0.0
        else:
            ax, ay, az = 0.0, 1.0, 0.0
        dot = ax * nx + ay * ny + az * nz
        e1x, e1y, e1z = ax - dot * nx, ay - dot * ny, az - dot * nz
        l1 = np.sqrt(e1x * e1x + e1y * e1y + e1z * e1z)
        e1x, e1y, e1z = e1x / l1, e1y / l1, e1z / l1
        e2x = ny * e1z - nz * e1y
        e2y = nz * e1x - nx * e1z
        e2z = nx * e1y - ny * e1x
        phi0 = interp_point(values, (px + xi_max) / h, (py + xi_max) / h,
                            (pz + xi_max) / h, order)
        gain = 0.0 * phi0
        for q in range(theta.shape[0]):
            ct = np.cos(theta[q])
            st = np.sin(theta[q])
            acc = 0.0 * phi0
            for a in range(n_azimuth):
                sx = ct * nx + st * (cosa[a] * e1x + sina[a] * e2x)
                sy = ct * ny + st * (cosa[a] * e1y + sina[a] * e2y)
                sz = ct * nz + st * (cosa[a] * e1z + sina[a] * e2z)
                hx, hy, hz = 0.5 * px, 0.5 * py, 0.5 * pz
                qx, qy, qz = 0.5 * r * sx, 0.5 * r * sy, 0.5 * r * sz
                fp = interp_point(values, (hx + qx + xi_max) / h, (hy + qy + xi_max) / h,
                                  (hz + qz + xi_max) / h, order)
                fm = interp_point(values, (hx - qx + xi_max) / h, (hy - qy + xi_max) / h,
                                  (hz - qz + xi_max) / h, order)
                acc += fp * fm
            gain += wtheta[q] * acc * dphi
        out[m] = gain - 2.0 * np.pi * wsum * phi0
    return out
