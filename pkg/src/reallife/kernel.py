"""Continuous kernel descriptors and their discretization on the epsilon-grid.

The weight of offset ``z`` is the kernel mass of the cell centred at
``epsilon * z``. Box kernels and 2D l1/l2 balls are integrated exactly; other
kernels use ``supersample**D`` midpoint samples per cell. Weights are then
renormalized so that their exactly rounded sum is 1.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .errors import DimensionMismatchError, InvalidArgumentError
from .grid import same_epsilon

SHAPES = ("box-linf", "ball-l2", "diamond-l1", "radial-table")


@dataclass(frozen=True)
class KernelSpec:
    """Normalized kernel kappa = phi(|x|) / integral(phi).

    ``box-linf``, ``ball-l2`` and ``diamond-l1`` are uniform on the closed
    ball of ``radius`` in the named norm. ``radial-table`` interpolates
    ``knots`` [(r, value), ...] linearly in the Euclidean radius and is zero
    past the last knot.
    """

    shape: str
    radius: float = 1.0
    knots: tuple = ()

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise InvalidArgumentError(f"unknown kernel shape {self.shape!r}")
        if self.shape == "radial-table":
            knots = tuple((float(r), float(v)) for r, v in self.knots)
            if len(knots) < 2:
                raise InvalidArgumentError("radial table needs at least two knots")
            rs = [k[0] for k in knots]
            vs = [k[1] for k in knots]
            if rs[0] != 0 or any(b <= a for a, b in zip(rs, rs[1:])):
                raise InvalidArgumentError("knot radii must start at 0 and increase")
            if any(v < 0 for v in vs) or any(b > a for a, b in zip(vs, vs[1:])):
                raise InvalidArgumentError("knot values must be nonnegative and nonincreasing")
            if vs[0] == 0:
                raise InvalidArgumentError("radial table has zero mass")
            object.__setattr__(self, "knots", knots)
            object.__setattr__(self, "radius", rs[-1])
        elif not self.radius > 0:
            raise InvalidArgumentError("kernel radius must be positive")

    @property
    def rotationally_symmetric(self) -> bool:
        return self.shape in ("ball-l2", "radial-table")

    def profile(self, r):
        """Unnormalized radial profile phi (for norm balls: indicator)."""
        r = np.asarray(r, dtype=np.float64)
        if self.shape == "radial-table":
            rs = np.array([k[0] for k in self.knots])
            vs = np.array([k[1] for k in self.knots])
            return np.where(r <= rs[-1], np.interp(r, rs, vs), 0.0)
        return (r <= self.radius).astype(np.float64)

    def norm(self, points: np.ndarray) -> np.ndarray:
        if self.shape == "box-linf":
            return np.abs(points).max(axis=-1)
        if self.shape == "diamond-l1":
            return np.abs(points).sum(axis=-1)
        return np.sqrt((points * points).sum(axis=-1))

    def mass(self, dim: int) -> float:
        """Integral of the unnormalized profile over R^dim."""
        R = self.radius
        if self.shape == "box-linf":
            return (2 * R) ** dim
        if self.shape == "diamond-l1":
            return (2 * R) ** dim / math.factorial(dim)
        if self.shape == "ball-l2":
            return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * R ** dim
        sphere = 2 * math.pi ** (dim / 2) / math.gamma(dim / 2)
        pts = [k[0] for k in self.knots]
        val, _ = integrate.quad(lambda r: float(self.profile(r)) * r ** (dim - 1),
                                0, R, points=pts[1:-1] or None, limit=200)
        return sphere * val

    def density(self, points: np.ndarray, dim: int | None = None) -> np.ndarray:
        points = np.asarray(points, dtype=np.float64)
        dim = dim or points.shape[-1]
        return self.profile(self.norm(points)) / self.mass(dim)

    def sup_density(self, dim: int) -> float:
        """||kappa||_inf."""
        if self.shape == "radial-table":
            return self.knots[0][1] / self.mass(dim)
        return 1.0 / self.mass(dim)

    def with_radius(self, radius: float) -> "KernelSpec":
        if self.shape == "radial-table":
            s = radius / self.radius
            return KernelSpec(self.shape, radius, tuple((r * s, v) for r, v in self.knots))
        return KernelSpec(self.shape, float(radius))

    def to_dict(self) -> dict:
        if self.shape == "radial-table":
            return {"shape": self.shape, "knots": [list(k) for k in self.knots]}
        return {"shape": self.shape, "radius": self.radius}

    @classmethod
    def from_dict(cls, d: dict) -> "KernelSpec":
        if d.get("shape") == "radial-table":
            return cls("radial-table", knots=tuple(tuple(k) for k in d["knots"]))
        return cls(d["shape"], float(d.get("radius", 1.0)))


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
    """Nonnegative weights on integer offsets, centred array of odd extent.

    ``weights[r_1 + z_1, ..., r_D + z_D]`` is the weight of offset z.
    ``uniform`` marks a full box of equal weights ``1/denominator``
    (eligible for the summed-area backend).
    """

    epsilon: float
    weights: np.ndarray
    uniform: bool = False
    denominator: int = 0
    raw_sum: float = 1.0
    raw_max: float = 0.0
    sup_density: float = float("nan")
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.ascontiguousarray(np.asarray(self.weights, dtype=np.float64))
        if any(n % 2 == 0 for n in w.shape):
            raise InvalidArgumentError("weight table must have odd extent on every axis")
        if (w < 0).any():
            raise InvalidArgumentError("kernel weights must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.weights.ndim

    @property
    def radius(self) -> tuple:
        return tuple((n - 1) // 2 for n in self.weights.shape)

    @property
    def max_weight(self) -> float:
        return float(self.weights.max())

    def total(self) -> float:
        return math.fsum(self.weights.ravel().tolist())

    def offsets(self, nonzero: bool = True):
        """(offsets (k, D), weights (k,)) in lexicographic offset order."""
        idx = np.argwhere(self.weights > 0) if nonzero else np.argwhere(np.ones_like(self.weights, bool))
        w = self.weights[tuple(idx.T)]
        return idx - np.asarray(self.radius), w

    def padded_to(self, radius) -> np.ndarray:
        pads = [(R - r, R - r) for r, R in zip(self.radius, radius)]
        return np.pad(self.weights, pads)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([f"dz{i + 1}" for i in range(self.dim)] + ["weight"])
        offs, ws = self.offsets()
        for o, x in zip(offs.tolist(), ws.tolist()):
            w.writerow(o + [repr(x)])
        return buf.getvalue()


def exact_renormalize(raw: np.ndarray) -> np.ndarray:
    """Scale to unit sum, then absorb the rounding residual in the centre weight.

    Afterwards ``math.fsum(weights) == 1.0``. Only the centre changes, so
    reflection symmetry is kept.
    """
    s = math.fsum(raw.ravel().tolist())
    if not s > 0:
        raise InvalidArgumentError("kernel has zero mass on this grid")
    w = raw / s
    center = tuple((n - 1) // 2 for n in w.shape)
    for _ in range(8):
        resid = 1.0 - math.fsum(w.ravel().tolist())
        if resid == 0.0:
            break
        w[center] += resid
    return w


def _interval_overlap(i: np.ndarray, eps: float, R: float) -> np.ndarray:
    return np.maximum(0.0, np.minimum(eps * (i + 0.5), R) - np.maximum(eps * (i - 0.5), -R))


def _strip_area(x0, x1, y0, y1, R, g, G, roots):
    """Integral over [x0,x1] of |[y0,y1] ∩ [-g(x), g(x)]| for |x| <= R."""
    cuts = {x0, x1, -R, R}
    for c in (abs(y0), abs(y1)):
        if c < R:
            r = roots(c)
            cuts.update((r, -r))
    pts = sorted(x for x in cuts if x0 <= x <= x1)
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        if b <= a:
            continue
        m = 0.5 * (a + b)
        if abs(m) >= R:
            continue
        gm = g(m)
        up_const = y1 <= gm
        lo_const = y0 >= -gm
        upper = y1 if up_const else gm
        lower = y0 if lo_const else -gm
        if upper <= lower:
            continue
        dG = G(b) - G(a)
        total += (y1 * (b - a) if up_const else dG) - (y0 * (b - a) if lo_const else -dG)
    return total


def _exact_2d_quadrant(shape: str, R: float, eps: float, m: int) -> np.ndarray:
    """Cell areas of the l2 disk / l1 diamond for cells (i, j), 0 <= i, j <= m."""
    if shape == "ball-l2":
        def g(x):
            return math.sqrt(max(R * R - x * x, 0.0))

        def G(x):
            x = min(max(x, -R), R)
            return 0.5 * (x * math.sqrt(max(R * R - x * x, 0.0)) + R * R * math.asin(x / R))

        def roots(c):
            return math.sqrt(R * R - c * c)

        def nrm(x, y):
            return math.hypot(x, y)
    else:
        def g(x):
            return max(R - abs(x), 0.0)

        def G(x):
            x = min(max(x, -R), R)
            return R * x - 0.5 * x * abs(x)

        def roots(c):
            return R - c

        def nrm(x, y):
            return abs(x) + abs(y)

    area = np.zeros((m + 1, m + 1))
    full = eps * eps
    for i in range(m + 1):
        for j in range(i, m + 1):
            far = nrm(eps * (i + 0.5), eps * (j + 0.5))
            near = nrm(eps * max(i - 0.5, 0.0), eps * max(j - 0.5, 0.0))
            if far <= R:
                a = full
            elif near >= R:
                a = 0.0
            else:
                a = _strip_area(eps * (i - 0.5), eps * (i + 0.5),
                                eps * (j - 0.5), eps * (j + 0.5), R, g, G, roots)
                a = min(a, full)
            area[i, j] = area[j, i] = a
    return area


def _midpoint_orthant(spec: KernelSpec, dim: int, eps: float, m: int, s: int) -> np.ndarray:
    """Midpoint-rule cell masses (unnormalized profile) on the orthant 0..m."""
    sub = ((np.arange(s) + 0.5) / s - 0.5) * eps
    coords = (eps * np.arange(m + 1)[:, None] + sub[None, :]).ravel()
    out = np.zeros((m + 1,) * dim)
    h = (eps / s) ** dim
    # one slab of cells along axis 0 at a time bounds memory
    for i in range(m + 1):
        grids = np.meshgrid(coords[i * s:(i + 1) * s], *([coords] * (dim - 1)), indexing="ij")
        pts = np.stack([gr.ravel() for gr in grids], axis=1)
        vals = spec.profile(spec.norm(pts)).reshape((s,) + ((m + 1) * s,) * (dim - 1))
        red = vals.sum(axis=0)
        for ax in range(dim - 1):
            red = red.reshape(red.shape[:ax] + (m + 1, s) + red.shape[ax + 1:]).sum(axis=ax + 1)
        out[i] = red * h
    return out


def _mirror(orthant: np.ndarray) -> np.ndarray:
    """Reflect an orthant table (offsets 0..m) to the full box -m..m."""
    full = orthant
    for ax in range(orthant.ndim):
        head = np.take(np.flip(full, axis=ax), range(full.shape[ax] - 1), axis=ax)
        full = np.concatenate([head, full], axis=ax)
    return full


def _trim_zero_shell(w: np.ndarray) -> np.ndarray:
    nz = np.argwhere(w > 0)
    if len(nz) == 0:
        return w
    c = np.asarray([(n - 1) // 2 for n in w.shape])
    r = np.abs(nz - c).max(axis=0)
    sl = tuple(slice(ci - ri, ci + ri + 1) for ci, ri in zip(c, r))
    return w[sl]


def cell_masses(spec: KernelSpec, epsilon: float, dim: int = 2, supersample: int = 8) -> np.ndarray:
    """Pre-renormalization weights: kappa integrated over each grid cell."""
    if supersample < 1:
        raise InvalidArgumentError("supersample must be >= 1")
    eps = float(epsilon)
    R = spec.radius
    m = int(math.ceil(R / eps + 0.5))
    norm = spec.mass(dim)
    i = np.arange(m + 1)
    if spec.shape == "box-linf" or (dim == 1 and spec.shape != "radial-table"):
        o = _interval_overlap(i, eps, R)
        orth = o
        for _ in range(dim - 1):
            orth = np.multiply.outer(orth, o)
        orth = orth / norm
    elif dim == 2 and spec.shape in ("ball-l2", "diamond-l1"):
        orth = _exact_2d_quadrant(spec.shape, R, eps, m) / norm
    else:
        orth = _midpoint_orthant(spec, dim, eps, m, supersample) / norm
    return _trim_zero_shell(_mirror(orth))


def discretize_kernel(spec: KernelSpec, epsilon: float, supersample: int = 8,
                      dim: int = 2) -> DiscreteKernel:
    raw = cell_masses(spec, epsilon, dim, supersample)
    raw_sum = math.fsum(raw.ravel().tolist())
    if not raw_sum > 0:
        raise InvalidArgumentError("kernel has zero mass")
    w = exact_renormalize(raw)
    return DiscreteKernel(
        float(epsilon), w, uniform=False, raw_sum=raw_sum, raw_max=float(raw.max()),
        sup_density=spec.sup_density(dim),
        label=f"{spec.shape}(r={spec.radius:g})@eps={epsilon:g}",
        meta={"spec": spec.to_dict(), "supersample": supersample},
    )


def uniform_kernel(dim: int, radius: int) -> DiscreteKernel:
    """Equal weights on the box [-n..n]^D; epsilon is 1/n (1 for n = 0)."""
    n = int(radius)
    if n < 0 or n != radius:
        raise InvalidArgumentError("uniform kernel radius must be a nonnegative integer")
    size = (2 * n + 1) ** dim
    w = np.full((2 * n + 1,) * dim, 1.0 / size)
    eps = 1.0 / n if n >= 1 else 1.0
    return DiscreteKernel(
        eps, w, uniform=True, denominator=size, raw_sum=math.fsum(w.ravel().tolist()),
        raw_max=1.0 / size, sup_density=(1.0 / size) / eps ** dim,
        label=f"uniform(n={n})", meta={"uniform_radius": n},
    )


def _gauss_1d(sigma: float) -> np.ndarray:
    t = int(math.ceil(4 * sigma))
    j = np.arange(-t, t + 1, dtype=np.float64)
    g = np.exp(-(j * j) / (2 * sigma * sigma))
    return g / g.sum()


def mollify(k: DiscreteKernel, sigma_cells: float) -> DiscreteKernel:
    """Convolve the weight table with a discrete Gaussian truncated at 4 sigma."""
    if not sigma_cells > 0:
        raise InvalidArgumentError("sigma must be positive")
    g = _gauss_1d(sigma_cells)
    w = np.array(k.weights)
    for ax in range(w.ndim):
        w = np.apply_along_axis(lambda v: np.convolve(v, g), ax, w)
    w = exact_renormalize(np.maximum(w, 0.0))
    return DiscreteKernel(k.epsilon, w, uniform=False, raw_sum=1.0, raw_max=float(w.max()),
                          sup_density=k.sup_density, label=f"{k.label}*G({sigma_cells:g})",
                          meta=dict(k.meta, mollify_sigma=sigma_cells))


def kernel_l1_distance(k1: DiscreteKernel, k2: DiscreteKernel) -> float:
    if k1.dim != k2.dim or not same_epsilon(k1.epsilon, k2.epsilon):
        raise DimensionMismatchError("kernels live on different grids")
    R = tuple(max(a, b) for a, b in zip(k1.radius, k2.radius))
    return float(np.abs(k1.padded_to(R) - k2.padded_to(R)).sum())
