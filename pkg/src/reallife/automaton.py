"""The threshold update rule, its threshold sets and margin diagnostics.

A live cell survives iff alpha lies in [s0, s1]; a dead cell is born iff
alpha lies in [b0, b1]. Both intervals are closed and compared with exact
float arithmetic, so ties are decided by the field as computed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .conv import convolve, resolve_backend
from .errors import (
    DimensionMismatchError,
    InvalidArgumentError,
    ResourceLimitError,
    ThresholdOrderError,
)
from .grid import BinaryConfig, PointSet, ScalarField, same_epsilon
from .kernel import DiscreteKernel, uniform_kernel

MODES = ("strict", "closed")
DEFAULT_MAX_CELLS = 1 << 24


@dataclass(frozen=True)
class ThresholdQuad:
    s0: float
    b0: float
    b1: float
    s1: float
    mode: str = "strict"

    def __post_init__(self):
        for name in ("s0", "b0", "b1", "s1"):
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_order(self.s0, self.b0, self.b1, self.s1, self.mode)

    @property
    def values(self) -> tuple:
        return (self.s0, self.b0, self.b1, self.s1)

    def shifted(self, delta: float) -> "ThresholdQuad":
        """All four thresholds moved by ``delta`` (validated again)."""
        return ThresholdQuad(self.s0 + delta, self.b0 + delta, self.b1 + delta,
                             self.s1 + delta, self.mode)

    def to_dict(self) -> dict:
        return {"s0": self.s0, "b0": self.b0, "b1": self.b1, "s1": self.s1, "mode": self.mode}

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdQuad":
        return validate_quad(d["s0"], d["b0"], d["b1"], d["s1"], d.get("mode", "strict"))


def _check_order(s0, b0, b1, s1, mode):
    if mode not in MODES:
        raise InvalidArgumentError(f"unknown threshold mode {mode!r}")
    strict = mode == "strict"
    chain = [
        ("0 < s0" if strict else "0 <= s0", 0 < s0 if strict else 0 <= s0),
        ("s0 <= b0", s0 <= b0),
        ("b0 < b1" if strict else "b0 <= b1", b0 < b1 if strict else b0 <= b1),
        ("b1 <= s1", b1 <= s1),
        ("s1 <= 1", s1 <= 1),
    ]
    for text, ok in chain:
        if not ok:
            raise ThresholdOrderError(
                f"threshold order violated ({mode} mode): {text} fails for "
                f"(s0, b0, b1, s1) = ({s0!r}, {b0!r}, {b1!r}, {s1!r})",
                inequality=text,
            )


def validate_quad(s0, b0, b1, s1, mode: str = "strict") -> ThresholdQuad:
    return ThresholdQuad(float(s0), float(b0), float(b1), float(s1), mode)


@dataclass(frozen=True)
class AutomatonSpec:
    quad: ThresholdQuad
    kernel: DiscreteKernel
    backend: str | None = None
    name: str = ""

    def __post_init__(self):
        resolve_backend(self.kernel, self.backend)

    @property
    def epsilon(self) -> float:
        return self.kernel.epsilon

    def with_backend(self, backend: str | None) -> "AutomatonSpec":
        return replace(self, backend=backend)


CONWAY_QUAD = (1 / 3, 1 / 3, 1 / 3, 4 / 9)
FIG1_RADII = (25, 50, 75, 100)
FIG1_QUAD = (706 / 2601, 706 / 2601, 958 / 2601, 1216 / 2601)


def conway(backend: str | None = None) -> AutomatonSpec:
    """Uniform 3x3 neighbourhood with the closed quad (1/3, 1/3, 1/3, 4/9)."""
    return AutomatonSpec(ThresholdQuad(*CONWAY_QUAD, mode="closed"),
                         uniform_kernel(2, 1), backend, "conway")


def evans_fig1(n: int = 25, backend: str | None = None) -> AutomatonSpec:
    """Uniform radius-n box with thresholds 706, 706, 958, 1216 over 2601."""
    if n not in FIG1_RADII:
        raise InvalidArgumentError(f"evans-fig1 radius must be one of {FIG1_RADII}")
    return AutomatonSpec(ThresholdQuad(*FIG1_QUAD, mode="closed"),
                         uniform_kernel(2, n), backend, f"evans-fig1({n})")


def preset(name: str, backend: str | None = None) -> AutomatonSpec:
    """Look up ``conway`` or ``evans-fig1(n)`` by name."""
    if name == "conway":
        return conway(backend)
    if name.startswith("evans-fig1"):
        arg = name[len("evans-fig1"):].strip("()")
        return evans_fig1(int(arg) if arg else 25, backend)
    raise InvalidArgumentError(f"unknown preset {name!r}")


def _check_grid(a, spec: AutomatonSpec):
    if a.dim != spec.kernel.dim:
        raise DimensionMismatchError(f"config dim {a.dim} != kernel dim {spec.kernel.dim}")
    if not same_epsilon(a.epsilon, spec.epsilon):
        raise DimensionMismatchError(
            f"config epsilon {a.epsilon!r} != kernel epsilon {spec.epsilon!r}"
        )


def _in(x, lo, hi):
    return (x >= lo) & (x <= hi)


def field(a: BinaryConfig, spec: AutomatonSpec, max_cells: int = DEFAULT_MAX_CELLS):
    """(padded config, alpha) with growable axes extended by the kernel radius."""
    _check_grid(a, spec)
    p = a.padded(spec.kernel.radius)
    if p.data.size > max_cells:
        raise ResourceLimitError(
            f"grid of {p.data.size} cells exceeds the cap of {max_cells}"
        )
    return p, convolve(p, spec.kernel, spec.backend)


def _rule(cells: np.ndarray, alpha: np.ndarray, q: ThresholdQuad) -> np.ndarray:
    survive = _in(alpha, q.s0, q.s1)
    born = _in(alpha, q.b0, q.b1)
    return np.where(cells.astype(bool), survive, born).astype(np.uint8)


def step(a: BinaryConfig, spec: AutomatonSpec, max_cells: int = DEFAULT_MAX_CELLS) -> BinaryConfig:
    """One update. Growable axes are padded first and trimmed afterwards."""
    p, alpha = field(a, spec, max_cells)
    out = p._replace(_rule(p.data, alpha.values, spec.quad))
    return out.trimmed(max(max(spec.kernel.radius), 1))


def real_step(f: ScalarField, spec: AutomatonSpec) -> ScalarField:
    """f * s(alpha) + (1 - f) * b(alpha) for a [0, 1]-valued field."""
    _check_grid(f, spec)
    vals = f.values
    if vals.size and (vals.min() < 0 or vals.max() > 1):
        raise InvalidArgumentError("field values must lie in [0, 1]")
    p = f.padded(spec.kernel.radius)
    alpha = convolve(p, spec.kernel, spec.backend).values
    q = spec.quad
    out = p.values * _in(alpha, q.s0, q.s1) + (1 - p.values) * _in(alpha, q.b0, q.b1)
    return p._replace(out)


def run(a: BinaryConfig, spec: AutomatonSpec, T: int,
        max_cells: int = DEFAULT_MAX_CELLS) -> list:
    """Trajectory [a, step(a), ..., step^T(a)]."""
    if T < 0:
        raise InvalidArgumentError("T must be >= 0")
    traj = [a]
    for _ in range(T):
        traj.append(step(traj[-1], spec, max_cells))
    return traj


def _points(p: BinaryConfig, mask: np.ndarray) -> PointSet:
    pts = np.argwhere(mask) + np.asarray(p.origin, dtype=np.int64)
    return PointSet(pts, p.epsilon, p.dim)


def threshold_sets(a: BinaryConfig, spec: AutomatonSpec):
    """(S, B): cells where alpha is in [s0, s1], resp. [b0, b1].

    Evaluated on the configuration padded by the kernel radius; outside that
    window alpha is 0, which lies in neither interval when s0, b0 > 0.
    """
    p, alpha = field(a, spec)
    q = spec.quad
    v = alpha.values
    return _points(p, _in(v, q.s0, q.s1)), _points(p, _in(v, q.b0, q.b1))


@dataclass(frozen=True)
class MarginReport:
    delta: float
    eta: float
    ms: float
    mb: float
    m_exact: float


def _window(v, thresholds, delta):
    hit = np.zeros(v.shape, dtype=bool)
    for t in thresholds:
        hit |= (v > t - delta) & (v < t + delta)
    return hit


def margin_report(a: BinaryConfig, spec: AutomatonSpec, delta: float,
                  eta: float = 1e-9) -> MarginReport:
    """Measures of cells whose alpha sits near a threshold.

    ``ms`` counts alpha in the open windows of half-width ``delta`` around s0
    and s1, ``mb`` around b0 and b1, and ``m_exact`` counts alpha within
    ``eta`` of any threshold.
    """
    if not (delta >= eta >= 0):
        raise InvalidArgumentError("need delta >= eta >= 0")
    _, alpha = field(a, spec)
    v = alpha.values
    q = spec.quad
    vol = a.domain.cell_volume
    ms = np.count_nonzero(_window(v, (q.s0, q.s1), delta)) * vol
    mb = np.count_nonzero(_window(v, (q.b0, q.b1), delta)) * vol
    near = np.min(np.abs(v[..., None] - np.asarray(q.values)), axis=-1) <= eta
    return MarginReport(float(delta), float(eta), float(ms), float(mb),
                        float(np.count_nonzero(near) * vol))
