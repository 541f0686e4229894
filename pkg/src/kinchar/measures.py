"""Finitely supported probability measures on R^d."""

from dataclasses import dataclass

import numpy as np


class MeasureError(ValueError):
    """Raised for malformed measure data."""


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """Probability measure ``sum_i w_i delta_{v_i}``.

    Build instances with :func:`make_measure`, which normalizes weights and
    merges duplicate atoms; the constructor itself does not validate.
    """

    points: np.ndarray
    weights: np.ndarray

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def size(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"DiscreteMeasure(dim={self.dim}, atoms={self.size})"


def make_measure(dim, points, weights):
    """Validate, normalize and deduplicate atoms into a DiscreteMeasure.

    Duplicate points are detected by exact coordinate equality and merged
    by adding their weights. Zero-weight atoms are dropped.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(1, -1)
    w = np.asarray(weights, dtype=float).ravel()
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise MeasureError(f"points must have shape (n, {dim}), got {pts.shape}")
    if pts.shape[0] != w.shape[0]:
        raise MeasureError("points and weights differ in length")
    if w.size == 0:
        raise MeasureError("empty support")
    if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(w)):
        raise MeasureError("non-finite coordinates or weights")
    if np.any(w < 0):
        raise MeasureError("negative weight")
    total = w.sum()
    if total <= 0:
        raise MeasureError("all weights are zero")

    keep = w > 0
    pts, w = pts[keep], w[keep]
    # +0.0 folds -0.0 into 0.0 so the two compare as the same atom
    uniq, inverse = np.unique(pts + 0.0, axis=0, return_inverse=True)
    merged = np.zeros(uniq.shape[0])
    np.add.at(merged, inverse.ravel(), w)
    total = merged.sum()
    if abs(total - 1.0) > 4 * np.finfo(float).eps:
        merged /= total
    uniq.setflags(write=False)
    merged.setflags(write=False)
    return DiscreteMeasure(uniq, merged)


def dirac(point):
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return make_measure(point.size, point[None, :], [1.0])


def symmetric_pair(point):
    """The measure ``(delta_v + delta_{-v}) / 2``."""
    point = np.atleast_1d(np.asarray(point, dtype=float))
    return make_measure(point.size, np.vstack([point, -point]), [0.5, 0.5])


def moment(F, p):
    """Absolute moment ``sum_i w_i |v_i|^p`` with the convention ``0**0 = 1``."""
    if p < 0:
        raise ValueError("moment order must be nonnegative")
    r = np.linalg.norm(F.points, axis=1)
    if p == 0:
        return float(F.weights.sum())
    return float(np.dot(F.weights, r**p))


def mean(F):
    return F.weights @ F.points


def center(F):
    """Translate ``F`` so that its mean vanishes."""
    shifted = F.points - mean(F)
    c = F.weights @ shifted
    # one correction pass absorbs the rounding of the first subtraction
    shifted = shifted - c
    return make_measure(F.dim, shifted, F.weights)


def membership(F, k, alpha, atol=1e-12):
    """Check ``F`` against the moment class of order ``2k - 2 + alpha``.

    Returns
    -------
    ok : bool
    report : dict
        ``order``, ``moment``, ``mean_norm``, ``needs_zero_mean`` and a
        list ``failed`` naming the violated conditions.
    """
    if k < 1 or not 0 <= alpha < 2:
        raise ValueError("need integer k >= 1 and alpha in [0, 2)")
    if k + alpha <= 1:
        raise ValueError("need k + alpha > 1")
    order = 2 * k - 2 + alpha
    m = moment(F, order)
    mu = float(np.linalg.norm(mean(F)))
    needs_zero_mean = order >= 1
    failed = []
    if not np.isfinite(m):
        failed.append("moment")
    if needs_zero_mean and mu > atol * max(1.0, moment(F, 1)):
        failed.append("mean")
    report = dict(order=order, moment=m, mean_norm=mu,
                  needs_zero_mean=needs_zero_mean, failed=failed)
    return not failed, report


def is_single_dirac(F):
    return F.size == 1


def write_measure(F, path):
    """Write ``F`` as ``dim n`` followed by ``w x1 ... xd`` lines."""
    lines = [f"{F.dim} {F.size}"]
    for w, x in zip(F.weights, F.points):
        lines.append(" ".join(f"{v:.17g}" for v in (w, *x)))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_measure(path):
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows or len(rows[0]) != 2:
        raise MeasureError(f"{path}: header must be 'dim n'")
    dim, n = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != n:
        raise MeasureError(f"{path}: header announces {n} atoms, found {len(body)}")
    data = np.array(body, dtype=float)
    if data.shape[1] != dim + 1:
        raise MeasureError(f"{path}: expected {dim + 1} columns per atom")
    return make_measure(dim, data[:, 1:], data[:, 0])
