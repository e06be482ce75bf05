"""alpha = kernel * a on the grid, with naive, summed-area and FFT backends.

All backends use the convolution orientation ``alpha(z) = sum_w k_w a(z - w)``.
Growable axes read zero outside the array; periodic axes wrap. The array
primitives accept leading batch axes so that many small configurations can
be convolved at once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _accel
from .errors import DimensionMismatchError, InvalidArgumentError, UnsupportedBackendError
from .grid import BinaryConfig, ScalarField, l1_distance, same_epsilon
from .kernel import DiscreteKernel

BACKENDS = ("naive", "sat", "fft")


def default_backend(k: DiscreteKernel) -> str:
    return "sat" if k.uniform else "fft"


def resolve_backend(k: DiscreteKernel, backend: str | None) -> str:
    backend = backend or default_backend(k)
    if backend not in BACKENDS:
        raise UnsupportedBackendError(f"unknown backend {backend!r}")
    if backend == "sat" and not k.uniform:
        raise UnsupportedBackendError("sat backend needs a uniform box kernel")
    return backend


def _pad(arr: np.ndarray, radius, periodic) -> np.ndarray:
    nb = arr.ndim - len(radius)
    pads = [(0, 0)] * nb + [(r, r) for r in radius]
    if not any(periodic):
        return np.pad(arr, pads)
    # zero pad first, then overwrite periodic halos with wrapped copies
    out = arr
    for ax, (r, per) in enumerate(zip(radius, periodic)):
        p = [(0, 0)] * out.ndim
        p[nb + ax] = (r, r)
        out = np.pad(out, p, mode="wrap" if per else "constant")
    return out


@lru_cache(maxsize=64)
def _base_index(padded_shape: tuple, out_shape: tuple, radius: tuple) -> np.ndarray:
    nb = len(out_shape) - len(radius)
    ranges = [np.arange(n) for n in out_shape[:nb]]
    ranges += [np.arange(n) + 2 * r for n, r in zip(out_shape[nb:], radius)]
    grids = np.meshgrid(*ranges, indexing="ij")
    base = np.ravel_multi_index(tuple(g.ravel() for g in grids), padded_shape).astype(np.int64)
    base.setflags(write=False)
    return base


def _naive(padded, k: DiscreteKernel, out_shape):
    offs, ws = k.offsets()
    strides = np.array([int(np.prod(padded.shape[i + 1:])) for i in range(padded.ndim)])
    nb = padded.ndim - k.dim
    # padded index of out[i] for offset w is i + r - w; base already holds i + 2r
    flat_off = -((offs + np.asarray(k.radius)) * strides[nb:]).sum(axis=1).astype(np.int64)
    base = _base_index(padded.shape, tuple(out_shape), k.radius)
    flat = np.ascontiguousarray(padded, dtype=np.float64).ravel()
    out = _accel.gather_correlate(flat, base, np.ascontiguousarray(flat_off),
                                  np.ascontiguousarray(ws, dtype=np.float64))
    return np.asarray(out).reshape(out_shape)


def _sat(padded, k: DiscreteKernel, out_shape):
    nb = padded.ndim - k.dim
    integral_dtype = np.int64 if padded.dtype in (np.uint8, np.int64, np.int32, bool) else np.float64
    S = padded.astype(integral_dtype)
    for ax in range(nb, padded.ndim):
        S = np.cumsum(S, axis=ax)
    S = np.pad(S, [(0, 0)] * nb + [(1, 0)] * k.dim)
    total = np.zeros(out_shape, dtype=integral_dtype)
    D = k.dim
    for corner in range(1 << D):
        sl = [slice(None)] * nb
        sign = 1
        for ax in range(D):
            n = out_shape[nb + ax]
            w = 2 * k.radius[ax] + 1
            if corner >> ax & 1:
                sl.append(slice(w, w + n))
            else:
                sl.append(slice(0, n))
                sign = -sign
        total = total + sign * S[tuple(sl)]
    return total / float(k.denominator)


def _fft(padded, k: DiscreteKernel, out_shape):
    nb = padded.ndim - k.dim
    axes = tuple(range(nb, padded.ndim))
    full = [padded.shape[nb + i] + k.weights.shape[i] - 1 for i in range(k.dim)]
    size = [1 << (n - 1).bit_length() for n in full]
    F = np.fft.rfftn(padded.astype(np.float64), s=size, axes=axes)
    G = np.fft.rfftn(k.weights, s=size, axes=tuple(range(k.dim)))
    conv = np.fft.irfftn(F * G, s=size, axes=axes)
    sl = [slice(None)] * nb + [slice(2 * r, 2 * r + n)
                               for r, n in zip(k.radius, out_shape[nb:])]
    return np.clip(conv[tuple(sl)], 0.0, None)


_IMPL = {"naive": _naive, "sat": _sat, "fft": _fft}


def convolve_array(arr: np.ndarray, k: DiscreteKernel, periodic, backend: str | None = None):
    """Convolve the last ``k.dim`` axes of ``arr``; output has arr's shape."""
    backend = resolve_backend(k, backend)
    periodic = tuple(periodic)
    if len(periodic) != k.dim or arr.ndim < k.dim:
        raise DimensionMismatchError("array and kernel dimensions differ")
    padded = _pad(arr, k.radius, periodic)
    out = _IMPL[backend](padded, k, arr.shape)
    if backend == "fft" and arr.dtype == np.uint8:
        out = np.minimum(out, 1.0)
        if k.denominator:
            # binary input on a uniform kernel: the field is count / denominator
            out = np.rint(out * k.denominator) / float(k.denominator)
    return out


def convolve(a, k: DiscreteKernel, backend: str | None = None) -> ScalarField:
    """alpha = k * a on the cells of ``a`` (pad growable axes first to see spill-over)."""
    if a.dim != k.dim:
        raise DimensionMismatchError(f"config dim {a.dim} != kernel dim {k.dim}")
    if not same_epsilon(a.epsilon, k.epsilon):
        raise DimensionMismatchError(
            f"config epsilon {a.epsilon!r} != kernel epsilon {k.epsilon!r}"
        )
    out = convolve_array(a.data, k, a.domain.periodic, backend)
    return ScalarField(a.domain, out, a.origin)


@dataclass(frozen=True)
class YoungReport:
    lhs: float
    rhs: float
    holds: bool


def young_bound_check(a: BinaryConfig, a2: BinaryConfig, k: DiscreteKernel,
                      backend: str | None = None) -> YoungReport:
    """Check sup|k*a - k*a'| <= (max weight / eps^D) * ||a - a'||_1."""
    r = k.radius
    lo = [min(x, y) - rr for x, y, rr in zip(a.origin, a2.origin, r)]
    hi = [max(x, y) + rr for x, y, rr in zip(a.upper, a2.upper, r)]
    for ax, per in enumerate(a.domain.periodic):
        if per:
            lo[ax], hi[ax] = a.origin[ax], a.upper[ax]
    shape = [h - l for l, h in zip(lo, hi)]
    x = BinaryConfig(a.domain.with_extent(shape), a.embedded(lo, shape), lo)
    y = BinaryConfig(a2.domain.with_extent(shape), a2.embedded(lo, shape), lo)
    fx = convolve(x, k, backend).values
    fy = convolve(y, k, backend).values
    lhs = float(np.abs(fx - fy).max()) if fx.size else 0.0
    rhs = k.max_weight / a.domain.cell_volume * l1_distance(a, a2)
    return YoungReport(lhs, rhs, lhs <= rhs * (1 + 1e-12))


def pad_for_kernel(a, k: DiscreteKernel):
    """Grow a configuration by the kernel radius on growable axes."""
    if a.dim != k.dim:
        raise InvalidArgumentError("kernel and configuration dimensions differ")
    return a.padded(k.radius)
