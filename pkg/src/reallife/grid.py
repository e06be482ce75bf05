"""Configurations and fields on the epsilon-grid.

A grid value stores a dense array together with the integer grid coordinate
of array index 0 (``origin``). Cell ``z`` is the half-open cube of side
``epsilon`` centred at ``epsilon * z``. Axes are either ``"growable"``
(zero outside the array, may be extended) or ``"periodic"`` (fixed torus).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidArgumentError

GROWABLE = "growable"
PERIODIC = "periodic"
BOUNDARY_MODES = (GROWABLE, PERIODIC)


def same_epsilon(e1: float, e2: float) -> bool:
    return math.isclose(e1, e2, rel_tol=1e-12, abs_tol=0.0)


@dataclass(frozen=True)
class Domain:
    dim: int
    epsilon: float
    extent: tuple
    boundary: tuple

    def __post_init__(self):
        if self.dim < 1:
            raise InvalidArgumentError("dim must be >= 1")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise InvalidArgumentError("epsilon must be a positive real")
        if len(self.extent) != self.dim or len(self.boundary) != self.dim:
            raise DimensionMismatchError("extent/boundary length must equal dim")
        if any(int(n) < 1 for n in self.extent):
            raise InvalidArgumentError("all extents must be >= 1")
        for b in self.boundary:
            if b not in BOUNDARY_MODES:
                raise InvalidArgumentError(f"unknown boundary mode {b!r}")
        object.__setattr__(self, "extent", tuple(int(n) for n in self.extent))
        object.__setattr__(self, "boundary", tuple(self.boundary))

    @classmethod
    def make(cls, extent, epsilon=1.0, boundary=None):
        extent = tuple(int(n) for n in extent)
        if boundary is None:
            boundary = (GROWABLE,) * len(extent)
        elif isinstance(boundary, str):
            boundary = (boundary,) * len(extent)
        return cls(len(extent), float(epsilon), extent, tuple(boundary))

    def with_extent(self, extent) -> "Domain":
        return Domain(self.dim, self.epsilon, tuple(extent), self.boundary)

    def with_epsilon(self, epsilon) -> "Domain":
        return Domain(self.dim, float(epsilon), self.extent, self.boundary)

    @property
    def periodic(self) -> tuple:
        return tuple(b == PERIODIC for b in self.boundary)

    @property
    def cell_volume(self) -> float:
        return self.epsilon ** self.dim


class _Lattice:
    """Shared behaviour of BinaryConfig and ScalarField (immutable)."""

    __slots__ = ("domain", "data", "origin")

    def __init__(self, domain: Domain, data: np.ndarray, origin=None):
        data = np.asarray(data)
        if data.ndim != domain.dim:
            raise DimensionMismatchError(
                f"array has {data.ndim} axes, domain has dim {domain.dim}"
            )
        if tuple(data.shape) != domain.extent:
            domain = domain.with_extent(data.shape)
        if origin is None:
            origin = (0,) * domain.dim
        origin = tuple(int(o) for o in origin)
        if len(origin) != domain.dim:
            raise DimensionMismatchError("origin length must equal dim")
        data = np.ascontiguousarray(data)
        data.setflags(write=False)
        object.__setattr__(self, "domain", domain)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "origin", origin)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __reduce__(self):
        return (type(self), (self.domain, np.array(self.data), self.origin))

    @property
    def dim(self) -> int:
        return self.domain.dim

    @property
    def epsilon(self) -> float:
        return self.domain.epsilon

    @property
    def extent(self) -> tuple:
        return self.domain.extent

    @property
    def upper(self) -> tuple:
        """Exclusive upper grid coordinate per axis."""
        return tuple(o + n for o, n in zip(self.origin, self.extent))

    def centers(self, axis: int) -> np.ndarray:
        """Physical cell-centre coordinates along one axis."""
        return self.epsilon * np.arange(self.origin[axis], self.upper[axis])

    def _replace(self, data, origin=None, epsilon=None):
        dom = self.domain.with_extent(np.shape(data))
        if epsilon is not None:
            dom = dom.with_epsilon(epsilon)
        return type(self)(dom, data, self.origin if origin is None else origin)

    def embedded(self, lo: Sequence[int], shape: Sequence[int]) -> np.ndarray:
        """Copy of the data placed in the global box [lo, lo+shape)."""
        out = np.zeros(tuple(shape), dtype=self.data.dtype)
        src, dst = [], []
        for o, n, l, s in zip(self.origin, self.extent, lo, shape):
            a0, a1 = max(o, l), min(o + n, l + s)
            if a1 <= a0:
                return out
            src.append(slice(a0 - o, a1 - o))
            dst.append(slice(a0 - l, a1 - l))
        out[tuple(dst)] = self.data[tuple(src)]
        return out

    def padded(self, margin) -> "_Lattice":
        """Extend growable axes by ``margin`` cells on both sides."""
        margin = _per_axis(margin, self.dim)
        pads, origin = [], []
        for m, o, per in zip(margin, self.origin, self.domain.periodic):
            m = 0 if per else int(m)
            pads.append((m, m))
            origin.append(o - m)
        return self._replace(np.pad(self.data, pads), origin)


def _per_axis(value, dim):
    if np.ndim(value) == 0:
        return (int(value),) * dim
    value = tuple(int(v) for v in value)
    if len(value) != dim:
        raise DimensionMismatchError("per-axis value has wrong length")
    return value


class BinaryConfig(_Lattice):
    """A finite-support {0,1} configuration."""

    __slots__ = ()

    def __init__(self, domain: Domain, cells, origin=None):
        cells = np.asarray(cells)
        if cells.dtype != np.uint8:
            if cells.size and not np.isin(cells, (0, 1)).all():
                raise InvalidArgumentError("configuration values must be 0 or 1")
            cells = cells.astype(np.uint8)
        elif cells.size and cells.max() > 1:
            raise InvalidArgumentError("configuration values must be 0 or 1")
        super().__init__(domain, cells, origin)

    @classmethod
    def from_array(cls, cells, epsilon=1.0, origin=None, boundary=None):
        cells = np.asarray(cells)
        return cls(Domain.make(cells.shape, epsilon, boundary), cells, origin)

    @classmethod
    def from_points(cls, points, epsilon=1.0, dim=None, boundary=None):
        pts = np.asarray(points, dtype=np.int64)
        if pts.size == 0:
            dim = dim or 2
            return cls.empty(dim, epsilon, boundary)
        pts = pts.reshape(len(pts), -1)
        lo = pts.min(axis=0)
        shape = pts.max(axis=0) - lo + 1
        cells = np.zeros(tuple(shape), dtype=np.uint8)
        cells[tuple((pts - lo).T)] = 1
        return cls.from_array(cells, epsilon, tuple(lo), boundary)

    @classmethod
    def empty(cls, dim=2, epsilon=1.0, boundary=None):
        return cls.from_array(np.zeros((1,) * dim, np.uint8), epsilon, None, boundary)

    @property
    def cells(self) -> np.ndarray:
        return self.data

    @property
    def population(self) -> int:
        return int(self.data.sum(dtype=np.int64))

    @property
    def mass(self) -> float:
        """L1 norm: epsilon^D times the number of live cells."""
        return self.population * self.domain.cell_volume

    def is_empty(self) -> bool:
        return not self.data.any()

    def support(self) -> np.ndarray:
        """Live cell coordinates, shape (k, D), lexicographically sorted."""
        idx = np.argwhere(self.data)
        return idx + np.asarray(self.origin, dtype=np.int64)

    def bbox(self):
        """(lo, hi) inclusive grid bounds of the support, or None if empty."""
        if not self.data.any():
            return None
        pts = np.argwhere(self.data)
        o = np.asarray(self.origin)
        return tuple(pts.min(axis=0) + o), tuple(pts.max(axis=0) + o)

    def trimmed(self, margin=0) -> "BinaryConfig":
        """Crop growable axes to the support bounding box plus ``margin``."""
        margin = _per_axis(margin, self.dim)
        bb = self.bbox()
        lo, shape = [], []
        for ax in range(self.dim):
            if self.domain.periodic[ax]:
                lo.append(self.origin[ax])
                shape.append(self.extent[ax])
                continue
            if bb is None:
                l = h = 0
            else:
                l, h = bb[0][ax], bb[1][ax]
            lo.append(l - margin[ax])
            shape.append(h - l + 1 + 2 * margin[ax])
        return self._replace(self.embedded(lo, shape), tuple(lo))

    def equals(self, other: "BinaryConfig") -> bool:
        """Equality as supported sets on the same grid."""
        if not isinstance(other, BinaryConfig):
            return NotImplemented
        if self.dim != other.dim or not same_epsilon(self.epsilon, other.epsilon):
            return False
        lo, shape = _union_box(self, other)
        return bool(np.array_equal(self.embedded(lo, shape), other.embedded(lo, shape)))

    __eq__ = equals

    def __hash__(self):
        return hash((self.dim, self.population))

    def __repr__(self):
        return (
            f"BinaryConfig(dim={self.dim}, epsilon={self.epsilon!r}, "
            f"extent={self.extent}, origin={self.origin}, population={self.population})"
        )

    def to_field(self) -> "ScalarField":
        return ScalarField(self.domain, self.data.astype(np.float64), self.origin)


class ScalarField(_Lattice):
    """A real-valued field on the grid."""

    __slots__ = ()

    def __init__(self, domain: Domain, values, origin=None):
        values = np.asarray(values, dtype=np.float64)
        if values.size and not np.isfinite(values).all():
            raise InvalidArgumentError("field values must be finite")
        super().__init__(domain, values, origin)

    @classmethod
    def from_array(cls, values, epsilon=1.0, origin=None, boundary=None):
        values = np.asarray(values, dtype=np.float64)
        return cls(Domain.make(values.shape, epsilon, boundary), values, origin)

    @property
    def values(self) -> np.ndarray:
        return self.data

    @property
    def mass(self) -> float:
        return float(self.data.sum()) * self.domain.cell_volume

    def __repr__(self):
        return (
            f"ScalarField(dim={self.dim}, epsilon={self.epsilon!r}, "
            f"extent={self.extent}, origin={self.origin})"
        )


@dataclass(frozen=True, eq=False)
class PointSet:
    """A duplicate-free set of integer grid coordinates."""

    coords: np.ndarray
    epsilon: float
    dim: int

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=np.int64).reshape(-1, self.dim)
        c = np.unique(c, axis=0) if len(c) else c
        c = np.ascontiguousarray(c)
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return (tuple(int(v) for v in p) for p in self.coords)

    def __contains__(self, point):
        p = np.asarray(point, dtype=np.int64)
        return bool(len(self.coords)) and bool((self.coords == p).all(axis=1).any())

    def __eq__(self, other):
        if not isinstance(other, PointSet):
            return NotImplemented
        return (
            self.dim == other.dim
            and same_epsilon(self.epsilon, other.epsilon)
            and np.array_equal(self.coords, other.coords)
        )

    def issubset(self, other: "PointSet") -> bool:
        if len(self) == 0:
            return True
        a = {tuple(p) for p in self.coords.tolist()}
        b = {tuple(p) for p in other.coords.tolist()}
        return a <= b

    def physical(self) -> np.ndarray:
        return self.coords * self.epsilon


def _check_compatible(a: _Lattice, b: _Lattice):
    if a.dim != b.dim or not same_epsilon(a.epsilon, b.epsilon):
        raise DimensionMismatchError(
            f"incompatible grids: dim {a.dim}/{b.dim}, epsilon {a.epsilon}/{b.epsilon}"
        )


def _union_box(a: _Lattice, b: _Lattice):
    _check_compatible(a, b)
    lo, shape = [], []
    for ax in range(a.dim):
        per_a, per_b = a.domain.periodic[ax], b.domain.periodic[ax]
        if per_a or per_b:
            if not (per_a and per_b) or a.origin[ax] != b.origin[ax] or a.extent[ax] != b.extent[ax]:
                raise DimensionMismatchError(f"periodic axis {ax} differs between operands")
        l = min(a.origin[ax], b.origin[ax])
        h = max(a.upper[ax], b.upper[ax])
        lo.append(l)
        shape.append(h - l)
    return tuple(lo), tuple(shape)


def l1_distance(a: _Lattice, b: _Lattice) -> float:
    """epsilon^D * sum |a_z - b_z|; cells missing from one operand read as 0."""
    lo, shape = _union_box(a, b)
    x, y = a.embedded(lo, shape), b.embedded(lo, shape)
    if x.dtype == np.uint8 and y.dtype == np.uint8:
        total = float(np.count_nonzero(x != y))
    else:
        total = float(np.abs(x.astype(np.float64) - y.astype(np.float64)).sum())
    return total * a.domain.cell_volume


def shift(a: _Lattice, v) -> _Lattice:
    """Shift map: output(z) = input(z + v)."""
    v = tuple(int(x) for x in v)
    if len(v) != a.dim:
        raise DimensionMismatchError("shift vector length must equal dim")
    data = a.data
    origin = list(a.origin)
    for ax, (vi, per) in enumerate(zip(v, a.domain.periodic)):
        if per:
            data = np.roll(data, -vi, axis=ax)
        else:
            origin[ax] -= vi
    return a._replace(np.array(data), tuple(origin))


def coarsen(f: _Lattice, factor: int) -> ScalarField:
    """Block-average onto the grid of spacing ``factor * epsilon``.

    Fine cell z belongs to coarse cell floor((z + factor // 2) / factor),
    which nests exactly for odd factors and is off by half a fine cell for
    even ones. Mass (epsilon^D * sum) is preserved.
    """
    m = int(factor)
    if m != factor or m < 1:
        raise InvalidArgumentError("coarsening factor must be a positive integer")
    h = m // 2
    data = f.data.astype(np.float64)
    origin = []
    for ax in range(f.dim):
        o, n = f.origin[ax], f.extent[ax]
        if f.domain.periodic[ax]:
            if n % m:
                raise InvalidArgumentError(
                    f"periodic extent {n} on axis {ax} not divisible by {m}"
                )
            # roll so the array starts on a block boundary
            r = (o + h) % m
            start = o - r
            data = np.roll(data, r, axis=ax)
            origin.append((start + h) // m)
        else:
            c_lo = (o + h) // m
            c_hi = (o + n - 1 + h) // m
            lo_fine = c_lo * m - h
            hi_fine = (c_hi + 1) * m - h
            pads = [(0, 0)] * f.dim
            pads[ax] = (o - lo_fine, hi_fine - (o + n))
            data = np.pad(data, pads)
            origin.append(c_lo)
    shape = []
    for ax in range(f.dim):
        shape.extend([data.shape[ax] // m, m])
    blocks = data.reshape(shape)
    out = blocks.mean(axis=tuple(range(1, 2 * f.dim, 2)))
    dom = Domain(f.dim, f.epsilon * m, out.shape, f.domain.boundary)
    return ScalarField(dom, out, tuple(origin))


def boundary_cells(a: BinaryConfig) -> PointSet:
    """Cells with at least one axis-neighbour of the opposite value."""
    x = a.data.astype(bool)
    # one dead frame cell on growable axes; rolling then wraps frame onto frame
    pads = [(0, 0) if p else (1, 1) for p in a.domain.periodic]
    xp = np.pad(x, pads)
    mark = np.zeros_like(xp)
    for ax in range(a.dim):
        for step in (1, -1):
            mark |= xp != np.roll(xp, step, axis=ax)
    origin = np.asarray([o - (0 if p else 1) for o, p in zip(a.origin, a.domain.periodic)])
    pts = np.argwhere(mark) + origin
    return PointSet(pts, a.epsilon, a.dim)


def support_set(a: BinaryConfig) -> PointSet:
    return PointSet(a.support(), a.epsilon, a.dim)
