"""Life-form detection and analytic still-life constructions.

Detection canonicalizes each state by moving its support's bounding-box
corner to the origin and looks for the first repeat. Constructions pair a
rasterized shape with a closed-form validity prediction, so simulation error
and theory can be compared side by side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .automaton import (
    AutomatonSpec,
    DEFAULT_MAX_CELLS,
    ThresholdQuad,
    step,
    threshold_sets,
    validate_quad,
)
from .conv import convolve_array
from .errors import (
    ConfigurationError,
    InvalidArgumentError,
    ResourceLimitError,
    UnsupportedKernelError,
)
from .grid import GROWABLE, PERIODIC, BinaryConfig, Domain, l1_distance, support_set
from .kernel import KernelSpec, discretize_kernel
from .shapes import Annulus, Ball, Slab, rasterize

KINDS = ("still", "oscillator", "bug", "transient-to-empty", "unresolved")


# still lifes ---------------------------------------------------------------

@dataclass(frozen=True)
class StillLifeCheck:
    fixed: bool
    gap: float
    inclusion_ok: bool


def is_still_life(a: BinaryConfig, spec: AutomatonSpec) -> StillLifeCheck:
    """Compare exact fixedness with the inclusion test B <= A <= S."""
    nxt = step(a, spec)
    fixed = nxt == a
    gap = l1_distance(nxt, a)
    S, B = threshold_sets(a, spec)
    A = support_set(a)
    inclusion_ok = B.issubset(A) and A.issubset(S)
    assert fixed == inclusion_ok, "fixed-point test and inclusion test disagree"
    return StillLifeCheck(bool(fixed), float(gap), bool(inclusion_ok))


# detection -----------------------------------------------------------------

@dataclass(frozen=True)
class LifeFormReport:
    kind: str
    period: int | None
    displacement: tuple | None
    steps_used: int
    preperiod: int = 0

    def to_dict(self) -> dict:
        return {"kind": self.kind, "period": self.period,
                "displacement": None if self.displacement is None else list(self.displacement),
                "steps_used": self.steps_used, "preperiod": self.preperiod}


def _canonical(a: BinaryConfig):
    """(key, corner): translation-free key of the state and its corner."""
    t = a.trimmed(0)
    return (t.data.shape, t.data.tobytes()), t.origin


def detect_lifeform(a: BinaryConfig, spec: AutomatonSpec, max_steps: int = 256,
                    max_period: int | None = None,
                    max_cells: int = DEFAULT_MAX_CELLS) -> LifeFormReport:
    """Classify the orbit of ``a``.

    A repeat at lag p whose corner moved by d gives an oscillator (d = 0) or
    a bug with displacement -d, so that step^p(a) = shift(a, displacement).
    Periodic axes are compared without translation.
    """
    max_period = max_steps if max_period is None else max_period
    if not (max_steps >= max_period >= 1):
        raise InvalidArgumentError("need max_steps >= max_period >= 1")
    if a.is_empty():
        return LifeFormReport("still", 1, (0,) * a.dim, 0)
    seen = {}
    state = a
    for t in range(max_steps + 1):
        if t and state.is_empty():
            return LifeFormReport("transient-to-empty", None, None, t, t)
        key, corner = _canonical(state)
        if key in seen:
            t0, c0 = seen[key]
            p = t - t0
            if p > max_period:
                return LifeFormReport("unresolved", None, None, t)
            disp = tuple(-(c - c0) for c, c0 in zip(corner, c0))
            if any(disp):
                return LifeFormReport("bug", p, disp, t, t0)
            kind = "still" if p == 1 else "oscillator"
            return LifeFormReport(kind, p, (0,) * a.dim, t, t0)
        seen[key] = (t, corner)
        if t < max_steps:
            state = step(state, spec, max_cells)
    return LifeFormReport("unresolved", None, None, max_steps)


_PATTERNS = {
    "block": ["##", "##"],
    "blinker": ["###"],
    "beehive": [".##.", "#..#", ".##."],
    # moves toward lower coordinates on both axes: displacement (1, 1)
    "glider": ["###", "#..", ".#."],
    "glider-se": [".#.", "..#", "###"],
}


def pattern(name: str, epsilon: float = 1.0) -> BinaryConfig:
    """Named Conway pattern; rows run along axis 0."""
    try:
        rows = _PATTERNS[name]
    except KeyError:
        raise InvalidArgumentError(f"unknown pattern {name!r}") from None
    cells = np.array([[c == "#" for c in r] for r in rows], dtype=np.uint8)
    return BinaryConfig.from_array(cells, epsilon)


def pattern_names() -> tuple:
    return tuple(_PATTERNS)


def scale_pattern(a: BinaryConfig, factor: int) -> BinaryConfig:
    """Replace every cell by a factor^D block; epsilon shrinks by ``factor``."""
    m = int(factor)
    if m < 1 or m != factor:
        raise InvalidArgumentError("scale factor must be a positive integer")
    data = a.data
    for ax in range(a.dim):
        data = np.repeat(data, m, axis=ax)
    dom = a.domain.with_epsilon(a.epsilon / m).with_extent(data.shape)
    return BinaryConfig(dom, data, tuple(o * m for o in a.origin))


# constructions -------------------------------------------------------------

@dataclass(frozen=True)
class Construction:
    config: BinaryConfig
    predicted_valid: bool
    spec: AutomatonSpec
    kernel_spec: KernelSpec
    details: dict


_NORM_KERNEL = {"linf": "box-linf", "l2": "ball-l2", "l1": "diamond-l1"}


def _strict(quad: ThresholdQuad) -> ThresholdQuad:
    return validate_quad(*quad.values, mode="strict")


def ball_predicted_valid(r: float, quad: ThresholdQuad, dim: int = 2) -> bool:
    s0, b0 = quad.s0, quad.b0
    return bool(s0 <= 0.5 ** dim and s0 <= r ** dim < b0 and r < 0.5)


def construct_ball(norm: str, r: float, quad: ThresholdQuad, epsilon: float,
                   dim: int = 2, supersample: int = 8, backend: str | None = None) -> Construction:
    """Norm ball of radius r under the unit ball kernel of the same norm."""
    if norm not in _NORM_KERNEL:
        raise InvalidArgumentError(f"unknown norm {norm!r}")
    if not r > 0:
        raise InvalidArgumentError("ball radius must be positive")
    quad = _strict(quad)
    kspec = KernelSpec(_NORM_KERNEL[norm], 1.0)
    k = discretize_kernel(kspec, epsilon, supersample, dim)
    cfg = rasterize(Ball(norm, float(r), (0.0,) * dim), Domain.make((1,) * dim, epsilon))
    return Construction(cfg, ball_predicted_valid(r, quad, dim),
                        AutomatonSpec(quad, k, backend), kspec,
                        {"shape": "ball", "norm": norm, "r": r, "mass_ratio": r ** dim})


@dataclass(frozen=True)
class RibbonThresholds:
    w: float
    ss: float
    s1_center: float


def ribbon_ss(w):
    w = np.asarray(w, dtype=np.float64)
    return 0.5 + (w * np.sqrt(1 - w * w) - np.arccos(w)) / math.pi


def ribbon_s1_center(w):
    w = np.asarray(w, dtype=np.float64)
    return 1 + ((w / 2) * np.sqrt(4 - w * w) - 2 * np.arccos(w / 2)) / math.pi


def ribbon_thresholds(w: float) -> RibbonThresholds:
    """Boundary and centreline kernel mass of a flat ribbon of width w."""
    w = float(w)
    if not 0 < w <= 1:
        raise InvalidArgumentError("ribbon width must lie in (0, 1]")
    return RibbonThresholds(w, float(ribbon_ss(w)), float(ribbon_s1_center(w)))


def ribbon_predicted_valid(w: float, quad: ThresholdQuad) -> bool:
    t = ribbon_thresholds(w)
    return bool(quad.s0 <= t.ss <= quad.b0 and t.s1_center <= quad.s1)


def construct_ribbon(w: float, axis: int, quad: ThresholdQuad, epsilon: float,
                     length: float = 1.0, boundary=None, curvature: float = 0.0,
                     supersample: int = 8, backend: str | None = None) -> Construction:
    """Flat ribbon of width w running along a periodic ``axis``.

    With ``curvature > 0`` the ribbon is bent into a closed ring of radius
    1/curvature on a growable plane; no validity is claimed for that case.
    """
    if axis not in (0, 1):
        raise InvalidArgumentError("axis must be 0 or 1")
    quad = _strict(quad)
    kspec = KernelSpec("ball-l2", 1.0)
    k = discretize_kernel(kspec, epsilon, supersample, 2)
    details = {"shape": "ribbon", "w": w, "axis": axis, "curvature": curvature,
               **ribbon_thresholds(w).__dict__}
    if curvature > 0:
        rho = 1.0 / curvature
        if rho <= w / 2:
            raise InvalidArgumentError("curvature too large for the ribbon width")
        cfg = rasterize(Annulus(rho - w / 2, rho + w / 2), Domain.make((1, 1), epsilon))
        return Construction(cfg, False, AutomatonSpec(quad, k, backend), kspec,
                            dict(details, validity_claimed=False))
    if boundary is None:
        boundary = [GROWABLE, GROWABLE]
        boundary[axis] = PERIODIC
    boundary = tuple(boundary)
    if boundary[axis] != PERIODIC:
        raise ConfigurationError(f"ribbon needs a periodic domain along axis {axis}")
    n = max(1, int(round(length / epsilon)))
    extent = [1, 1]
    extent[axis] = n
    cfg = rasterize(Slab(float(w), 1 - axis, 2), Domain.make(extent, epsilon, boundary))
    return Construction(cfg, ribbon_predicted_valid(w, quad),
                        AutomatonSpec(quad, k, backend), kspec,
                        dict(details, validity_claimed=True))


# radial profiles of rotationally symmetric kernels --------------------------

def _require_radial(kernel: KernelSpec):
    if not kernel.rotationally_symmetric:
        raise UnsupportedKernelError(f"{kernel.shape} kernel is not rotationally symmetric")


def curtain_profile(kernel: KernelSpec, r: float) -> float:
    """2D kernel mass of the half-plane x1 <= r."""
    _require_radial(kernel)
    R = kernel.radius
    if r >= R:
        return 1.0
    if r <= -R:
        return 0.0
    if kernel.shape == "ball-l2":
        u = r / R
        return 0.5 + (u * math.sqrt(1 - u * u) + math.asin(u)) / math.pi
    # mass beyond the line: circles of radius rho keep an arc of 2*acos(|r|/rho)
    mass = kernel.mass(2)
    a = abs(r)
    knots = [k[0] for k in kernel.knots if a < k[0] < R]
    tail, _ = integrate.quad(
        lambda rho: float(kernel.profile(rho)) * rho * 2 * math.acos(min(1.0, a / rho)),
        a, R, points=knots or None, limit=200)
    tail /= mass
    return 1 - tail if r >= 0 else tail


def _lens_area(d, a, b):
    """Area of the intersection of disks of radius a and b at centre distance d."""
    d = np.asarray(d, dtype=np.float64)
    out = np.zeros_like(d)
    inside = d <= abs(a - b)
    out[inside] = math.pi * min(a, b) ** 2
    part = (~inside) & (d < a + b)
    dd = d[part]
    c1 = np.clip((dd * dd + a * a - b * b) / (2 * dd * a), -1, 1)
    c2 = np.clip((dd * dd + b * b - a * a) / (2 * dd * b), -1, 1)
    k = (-dd + a + b) * (dd + a - b) * (dd - a + b) * (dd + a + b)
    out[part] = a * a * np.arccos(c1) + b * b * np.arccos(c2) - 0.5 * np.sqrt(np.maximum(k, 0))
    return out


def _arc_inside(rho, t, a):
    """Angle of the circle |y - x| = rho (|x| = t) lying inside the disk |y| <= a."""
    if rho == 0:
        return 2 * math.pi if t <= a else 0.0
    if t + rho <= a:
        return 2 * math.pi
    if t == 0 or abs(t - rho) >= a:
        return 0.0
    c = (t * t + rho * rho - a * a) / (2 * t * rho)
    return 2 * math.acos(max(-1.0, min(1.0, c)))


def annulus_alpha(kernel: KernelSpec, r: float, R: float, t):
    """kappa * chi_{r <= |y| <= R} evaluated at distance t from the centre."""
    _require_radial(kernel)
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if kernel.shape == "ball-l2":
        k = kernel.radius
        return (_lens_area(t, R, k) - _lens_area(t, r, k)) / (math.pi * k * k)
    mass = kernel.mass(2)
    out = np.empty_like(t)
    knots = [x[0] for x in kernel.knots[1:-1]]
    for i, ti in enumerate(t):
        f = lambda rho: float(kernel.profile(rho)) * rho * (  # noqa: E731
            _arc_inside(rho, ti, R) - _arc_inside(rho, ti, r))
        brk = sorted({*knots, *(abs(ti - v) for v in (r, R)), *(ti + v for v in (r, R))})
        brk = [b for b in brk if 0 < b < kernel.radius]
        val, _ = integrate.quad(f, 0, kernel.radius, points=brk or None, limit=400)
        out[i] = val / mass
    return out


@dataclass(frozen=True)
class AnnulusThresholds:
    ss: float
    b_lower: float
    b_upper: float
    s1_max: float

    def predicted_valid(self, quad: ThresholdQuad) -> bool:
        return bool(quad.s0 <= self.ss < quad.b0 and self.s1_max <= quad.s1
                    and (self.b_lower < quad.b0 or self.b_upper > quad.b1))


def annulus_thresholds(kernel: KernelSpec, r: float, R: float,
                       samples: int = 513) -> AnnulusThresholds:
    """Sample kappa * chi_annulus along a ray: on [0, r) for the hole, [r, R] for the ring."""
    if not 0 < r < R:
        raise InvalidArgumentError("annulus needs 0 < r < R")
    hole = annulus_alpha(kernel, r, R, np.linspace(0, r, samples, endpoint=False))
    ring = annulus_alpha(kernel, r, R, np.linspace(r, R, samples))
    return AnnulusThresholds(float(ring[-1]), float(hole.max()), float(hole.min()),
                             float(ring.max()))


# exhaustive search ---------------------------------------------------------

def exhaustive_still_search(extent, spec: AutomatonSpec, max_cells: int = 20,
                            chunk: int = 1 << 14) -> list:
    """All exact fixed points supported in a box of ``extent`` cells."""
    extent = tuple(int(n) for n in extent)
    ncell = int(np.prod(extent))
    if ncell > max_cells:
        raise ResourceLimitError(f"{ncell} cells means 2^{ncell} configurations; cap is {max_cells}")
    if len(extent) != spec.kernel.dim:
        raise InvalidArgumentError("extent and kernel dimensions differ")
    r = spec.kernel.radius
    q = spec.quad
    if q.b0 <= 0.0:
        # alpha = 0 far away is a birth, so nothing finite is fixed
        return []
    shape_p = tuple(n + 2 * rr for n, rr in zip(extent, r))
    inner = tuple(slice(rr, rr + n) for n, rr in zip(extent, r))
    bits = 1 << np.arange(ncell, dtype=np.int64)
    found = []
    for start in range(0, 1 << ncell, chunk):
        codes = np.arange(start, min(start + chunk, 1 << ncell), dtype=np.int64)
        cells = ((codes[:, None] & bits) != 0).astype(np.uint8).reshape((-1,) + extent)
        batch = np.zeros((len(codes),) + shape_p, dtype=np.uint8)
        batch[(slice(None),) + inner] = cells
        alpha = convolve_array(batch, spec.kernel, (False,) * len(extent), spec.backend)
        live = batch.astype(bool)
        nxt = np.where(live, (alpha >= q.s0) & (alpha <= q.s1), (alpha >= q.b0) & (alpha <= q.b1))
        fixed = (nxt == live).reshape(len(codes), -1).all(axis=1)
        for i in np.flatnonzero(fixed):
            found.append(BinaryConfig.from_array(cells[i], spec.epsilon))
    return found
