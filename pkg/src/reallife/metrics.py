"""Distances between configurations and robustness quantities of still lifes."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .automaton import AutomatonSpec
from .conv import convolve
from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    PreconditionError,
    UndefinedDistanceError,
)
from .grid import BinaryConfig, PointSet, boundary_cells, l1_distance, same_epsilon, _union_box
from .lifeform import is_still_life


def _coords(X: PointSet, Y: PointSet):
    if len(X) == 0 or len(Y) == 0:
        raise UndefinedDistanceError("Hausdorff distance needs two nonempty sets")
    if X.dim != Y.dim or not same_epsilon(X.epsilon, Y.epsilon):
        raise DimensionMismatchError("point sets live on different grids")
    return (np.ascontiguousarray(X.coords, dtype=np.int64),
            np.ascontiguousarray(Y.coords, dtype=np.int64))


def directed_hausdorff(X: PointSet, Y: PointSet) -> float:
    """sup over x in X of the distance from x to Y, in physical units."""
    x, y = _coords(X, Y)
    return math.sqrt(_accel.directed_hausdorff_sq(x, y)) * X.epsilon


def hausdorff(X: PointSet, Y: PointSet) -> float:
    """Averaged Hausdorff distance: the mean of the two directed suprema."""
    x, y = _coords(X, Y)
    dxy = math.sqrt(_accel.directed_hausdorff_sq(x, y))
    dyx = math.sqrt(_accel.directed_hausdorff_sq(y, x))
    return 0.5 * dxy * X.epsilon + 0.5 * dyx * X.epsilon


def hausdorff_max(X: PointSet, Y: PointSet) -> float:
    """Textbook Hausdorff distance (max of the directed suprema), for comparison."""
    x, y = _coords(X, Y)
    d = max(_accel.directed_hausdorff_sq(x, y), _accel.directed_hausdorff_sq(y, x))
    return math.sqrt(d) * X.epsilon


def d_star(a: BinaryConfig, b: BinaryConfig) -> float:
    """L1 distance plus the averaged Hausdorff distance of the boundaries."""
    if a.is_empty() or b.is_empty():
        raise UndefinedDistanceError("d_star needs nonempty supports")
    return l1_distance(a, b) + hausdorff(boundary_cells(a), boundary_cells(b))


def agreement_radius(a: BinaryConfig, b: BinaryConfig) -> float:
    """Physical radius about the origin on which a and b agree, capped by the box."""
    lo, shape = _union_box(a, b)
    eps = a.epsilon
    # first cell centres outside the known box on each side
    r_max = eps * min(min(1 - l, l + n) for l, n in zip(lo, shape))
    r_max = max(r_max, 0.0)
    diff = np.argwhere(a.embedded(lo, shape) != b.embedded(lo, shape))
    if len(diff) == 0:
        return r_max
    pts = (diff + np.asarray(lo)).astype(np.float64)
    d = float(np.sqrt((pts * pts).sum(axis=1)).min()) * eps
    return min(d, r_max)


def compact_open_distance(a: BinaryConfig, b: BinaryConfig) -> float:
    return math.exp(-agreement_radius(a, b))


@dataclass(frozen=True)
class StabilityReport:
    m_inf: float
    infinite: bool
    gamma: float
    min_gradient: float
    boundary_points: int


def _gradient(alpha: np.ndarray, h: int, spacing: float):
    """Central differences with step h; one-sided within h of the array edge."""
    grads = []
    for ax in range(alpha.ndim):
        n = alpha.shape[ax]
        a = np.moveaxis(alpha, ax, 0)
        g = np.zeros_like(a)
        if n > 2 * h:
            g[h:n - h] = (a[2 * h:] - a[:n - 2 * h]) / (2 * h * spacing)
        if n > h:
            lo = min(h, n - h)
            g[:lo] = (a[h:h + lo] - a[:lo]) / (h * spacing)
            hi = max(n - h, h)
            g[hi:] = (a[hi:] - a[hi - h:n - h]) / (h * spacing)
        grads.append(np.moveaxis(g, 0, ax))
    return np.sqrt(sum(g * g for g in grads))


def stability_report(a: BinaryConfig, spec: AutomatonSpec, fd_step: int = 1) -> StabilityReport:
    """Inverse-gradient bound on the threshold-set boundaries, and the gap gamma."""
    if fd_step < 1 or int(fd_step) != fd_step:
        raise InvalidArgumentError("fd_step must be a positive integer")
    if not is_still_life(a, spec).fixed:
        raise PreconditionError("stability_report needs a still life")
    margin = tuple(r + fd_step + 1 for r in spec.kernel.radius)
    p = a.padded(margin)
    alpha = convolve(p, spec.kernel, spec.backend).values
    q = spec.quad
    S = p._replace(((alpha >= q.s0) & (alpha <= q.s1)).astype(np.uint8))
    B = p._replace(((alpha >= q.b0) & (alpha <= q.b1)).astype(np.uint8))
    dS, dB, dA = boundary_cells(S), boundary_cells(B), boundary_cells(a)
    grad = _gradient(alpha, int(fd_step), a.epsilon * 1.0)
    pts = np.concatenate([dS.coords, dB.coords]) - np.asarray(p.origin)
    inside = ((pts >= 0) & (pts < np.asarray(alpha.shape))).all(axis=1)
    g = grad[tuple(pts[inside].T)] if len(pts) else np.zeros(0)
    if len(g) == 0:
        m_inf, infinite, gmin = 0.0, False, math.inf
    else:
        gmin = float(g.min())
        infinite = gmin < 1e-9
        m_inf = math.inf if infinite else float((1.0 / g).max())
    terms = []
    for X, Y in ((dB, dA), (dA, dS)):
        terms.append(math.inf if len(X) == 0 or len(Y) == 0 else hausdorff(X, Y))
    return StabilityReport(m_inf, bool(infinite), float(min(terms)), gmin, int(len(g)))
