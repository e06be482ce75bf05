"""Analytic subsets of R^D and their rasterization onto the grid.

A cell is live when its centre belongs to the shape. Balls, slabs and annuli
are closed; rectangles are products of half-open intervals ``[lo, hi)`` so
that they tile exactly like grid cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, UnsupportedShapeError
from .grid import BinaryConfig, Domain

NORMS = ("l1", "l2", "linf")


def norm_of(points: np.ndarray, norm: str) -> np.ndarray:
    if norm == "l1":
        return np.abs(points).sum(axis=-1)
    if norm == "l2":
        return np.sqrt((points * points).sum(axis=-1))
    if norm == "linf":
        return np.abs(points).max(axis=-1)
    raise InvalidArgumentError(f"unknown norm {norm!r}")


class AnalyticShape:
    """Base class: ``contains`` takes physical points of shape (N, D)."""

    dim: int = 2

    def contains(self, points: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bounds(self):
        """(lo, hi) physical bounds per axis; ``None`` on unbounded axes.

        Returns None for the empty shape.
        """
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Empty(AnalyticShape):
    dim: int = 2

    def contains(self, points):
        return np.zeros(len(points), dtype=bool)

    def bounds(self):
        return None

    def to_dict(self):
        return {"type": "empty", "dim": self.dim}


@dataclass(frozen=True)
class Ball(AnalyticShape):
    norm: str
    radius: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.norm not in NORMS:
            raise InvalidArgumentError(f"unknown norm {self.norm!r}")
        if not self.radius > 0:
            raise InvalidArgumentError("ball radius must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self):
        return len(self.center)

    def contains(self, points):
        return norm_of(points - np.asarray(self.center), self.norm) <= self.radius

    def bounds(self):
        c = np.asarray(self.center)
        return [(x - self.radius, x + self.radius) for x in c]

    def to_dict(self):
        return {"type": "ball", "norm": self.norm, "radius": self.radius,
                "center": list(self.center)}


@dataclass(frozen=True)
class Slab(AnalyticShape):
    """Flat curtain ``|x[normal] - offset| <= width/2``, unbounded on other axes."""

    width: float
    normal: int
    dim: int = 2
    offset: float = 0.0

    def __post_init__(self):
        if not self.width > 0:
            raise InvalidArgumentError("width must be positive")
        if not 0 <= self.normal < self.dim:
            raise InvalidArgumentError("normal axis out of range")

    def contains(self, points):
        return np.abs(points[:, self.normal] - self.offset) <= self.width / 2

    def bounds(self):
        out = [None] * self.dim
        out[self.normal] = (self.offset - self.width / 2, self.offset + self.width / 2)
        return out

    def to_dict(self):
        return {"type": "slab", "width": self.width, "normal": self.normal,
                "dim": self.dim, "offset": self.offset}


def ribbon(width: float, axis: int = 0, offset: float = 0.0) -> Slab:
    """Flat 2D ribbon running along ``axis``."""
    if axis not in (0, 1):
        raise InvalidArgumentError("ribbon axis must be 0 or 1")
    return Slab(width, 1 - axis, 2, offset)


@dataclass(frozen=True)
class Annulus(AnalyticShape):
    """Closed l2 shell ``inner <= |x - center| <= outer``."""

    inner: float
    outer: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        if not 0 <= self.inner < self.outer:
            raise InvalidArgumentError("annulus needs 0 <= inner < outer")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))

    @property
    def dim(self):
        return len(self.center)

    def contains(self, points):
        r = norm_of(points - np.asarray(self.center), "l2")
        return (r >= self.inner) & (r <= self.outer)

    def bounds(self):
        return [(c - self.outer, c + self.outer) for c in self.center]

    def to_dict(self):
        return {"type": "annulus", "inner": self.inner, "outer": self.outer,
                "center": list(self.center)}


@dataclass(frozen=True)
class Rectangle(AnalyticShape):
    """Product of half-open intervals [lo_i, hi_i)."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != len(hi) or any(h <= l for l, h in zip(lo, hi)):
            raise InvalidArgumentError("rectangle needs lo < hi on every axis")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    def contains(self, points):
        return ((points >= np.asarray(self.lo)) & (points < np.asarray(self.hi))).all(axis=1)

    def bounds(self):
        return list(zip(self.lo, self.hi))

    def to_dict(self):
        return {"type": "rectangle", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class Union(AnalyticShape):
    parts: tuple = field(default_factory=tuple)

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise InvalidArgumentError("union needs at least one part")
        if len({p.dim for p in parts}) != 1:
            raise InvalidArgumentError("union parts must share a dimension")
        object.__setattr__(self, "parts", parts)

    @property
    def dim(self):
        return self.parts[0].dim

    def contains(self, points):
        out = np.zeros(len(points), dtype=bool)
        for p in self.parts:
            out |= p.contains(points)
        return out

    def bounds(self):
        per = [p.bounds() for p in self.parts]
        per = [b for b in per if b is not None]
        if not per:
            return None
        out = []
        for ax in range(self.dim):
            spans = [b[ax] for b in per]
            if any(s is None for s in spans):
                out.append(None)
            else:
                out.append((min(s[0] for s in spans), max(s[1] for s in spans)))
        return out

    def to_dict(self):
        return {"type": "union", "parts": [p.to_dict() for p in self.parts]}


def blob(seed: int, count: int = 6, radius=(0.15, 0.35), spread: float = 0.4,
         dim: int = 2) -> Union:
    """Seeded union of l2 balls: a generic lumpy test shape."""
    rng = np.random.default_rng(seed)
    parts = []
    for _ in range(count):
        c = rng.uniform(-spread, spread, size=dim)
        r = rng.uniform(radius[0], radius[1])
        parts.append(Ball("l2", float(r), tuple(float(x) for x in c)))
    return Union(tuple(parts))


def shape_from_dict(d: dict) -> AnalyticShape:
    kind = d.get("type")
    if kind == "ball":
        return Ball(d["norm"], float(d["radius"]), tuple(d.get("center", (0.0, 0.0))))
    if kind == "slab":
        return Slab(float(d["width"]), int(d["normal"]), int(d.get("dim", 2)),
                    float(d.get("offset", 0.0)))
    if kind == "ribbon":
        return ribbon(float(d["width"]), int(d.get("axis", 0)), float(d.get("offset", 0.0)))
    if kind == "annulus":
        return Annulus(float(d["inner"]), float(d["outer"]), tuple(d.get("center", (0.0, 0.0))))
    if kind == "rectangle":
        return Rectangle(tuple(d["lo"]), tuple(d["hi"]))
    if kind == "union":
        return Union(tuple(shape_from_dict(p) for p in d["parts"]))
    if kind == "blob":
        return blob(int(d.get("seed", 0)), int(d.get("count", 6)),
                    tuple(d.get("radius", (0.15, 0.35))), float(d.get("spread", 0.4)),
                    int(d.get("dim", 2)))
    if kind == "empty":
        return Empty(int(d.get("dim", 2)))
    raise InvalidArgumentError(f"unknown shape type {kind!r}")


def rasterize(shape: AnalyticShape, domain: Domain) -> BinaryConfig:
    """Sample shape membership at cell centres.

    Growable axes get the shape's bounding box plus one dead cell each side;
    periodic axes use ``domain.extent`` with grid coordinates centred on 0.
    """
    if shape.dim != domain.dim:
        raise InvalidArgumentError(f"shape dim {shape.dim} != domain dim {domain.dim}")
    eps = domain.epsilon
    bounds = shape.bounds()
    lo, shape_n = [], []
    for ax in range(domain.dim):
        if domain.periodic[ax]:
            n = domain.extent[ax]
            lo.append(-(n // 2))
            shape_n.append(n)
            continue
        if bounds is None:
            lo.append(0)
            shape_n.append(1)
            continue
        b = bounds[ax]
        if b is None:
            raise UnsupportedShapeError(
                f"shape is unbounded along growable axis {ax}; make that axis periodic"
            )
        z0 = math.floor(b[0] / eps) - 1
        z1 = math.ceil(b[1] / eps) + 1
        lo.append(z0)
        shape_n.append(z1 - z0 + 1)
    if bounds is None:
        return BinaryConfig(domain.with_extent(shape_n), np.zeros(shape_n, np.uint8), lo)
    axes = [eps * np.arange(l, l + n) for l, n in zip(lo, shape_n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    cells = shape.contains(pts).reshape(shape_n).astype(np.uint8)
    return BinaryConfig(domain.with_extent(shape_n), cells, lo)
