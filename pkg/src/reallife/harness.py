"""Refinement ladders, perturbation studies and life-form tracking across grids.

The finest level of a ladder stands in for the continuum limit. Levels are
independent and can run in worker processes; results are always assembled
in the order of ``eps_list``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from .automaton import AutomatonSpec, ThresholdQuad, margin_report, run, step
from .conv import convolve
from .errors import ConfigurationError, InvalidArgumentError
from .grid import BinaryConfig, Domain, coarsen, l1_distance
from .kernel import KernelSpec, discretize_kernel
from .lifeform import LifeFormReport, detect_lifeform
from .shapes import AnalyticShape, rasterize


def _ratio(coarse: float, fine: float) -> int:
    m = coarse / fine
    k = int(round(m))
    if k < 1 or abs(m - k) > 1e-9 * k:
        raise ConfigurationError(f"epsilon {coarse!r} is not an integer multiple of {fine!r}")
    return k


def check_ladder(eps_list) -> list:
    eps = [float(e) for e in eps_list]
    if not eps:
        raise ConfigurationError("eps_list is empty")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigurationError("eps_list must be strictly decreasing")
    for e in eps:
        _ratio(e, eps[-1])
        _ratio(eps[0], e)
    return eps


def _domain(epsilon, boundary, length):
    """Domain for rasterization; periodic axes get ``length`` / epsilon cells."""
    if boundary is None:
        return Domain.make((1, 1), epsilon)
    boundary = tuple(boundary)
    extent = []
    for ax, b in enumerate(boundary):
        if b == "periodic":
            if length is None:
                raise ConfigurationError("periodic axes need a physical length")
            L = length[ax] if isinstance(length, (list, tuple)) else length
            extent.append(_ratio(L, epsilon))
        else:
            extent.append(1)
    return Domain.make(extent, epsilon, boundary)


@dataclass(frozen=True)
class LadderLevel:
    epsilon: float
    T: int
    gap_to_finest: float
    self_gap: float
    final_self_gap: float
    m_exact: float
    population: int


@dataclass(frozen=True)
class LadderResult:
    levels: tuple
    shape_id: str
    quad: ThresholdQuad
    kernel_id: str

    @property
    def gaps(self) -> list:
        return [lv.gap_to_finest for lv in self.levels]

    def rows(self) -> list:
        return [asdict(lv) for lv in self.levels]


def _level_job(args):
    shape, quad, kspec, eps, T, backend, supersample, boundary, length, eta = args
    a = rasterize(shape, _domain(eps, boundary, length))
    k = discretize_kernel(kspec, eps, supersample, a.dim)
    spec = AutomatonSpec(quad, k, backend)
    traj = run(a, spec, T)
    final = traj[-1]
    first = traj[1] if T else step(a, spec)
    self_gap = l1_distance(first, a)
    final_gap = l1_distance(step(final, spec), final) if T else self_gap
    m_exact = margin_report(a, spec, eta, eta).m_exact
    return final, self_gap, final_gap, m_exact


def _map(fn, jobs_args, jobs):
    if jobs and jobs > 1 and len(jobs_args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(fn, jobs_args))
    return [fn(x) for x in jobs_args]


def refinement_ladder(shape: AnalyticShape, quad: ThresholdQuad, kernel_spec: KernelSpec,
                      eps_list, T: int, backend: str | None = None, supersample: int = 8,
                      boundary=None, length=None, eta: float = 1e-9,
                      jobs: int = 1) -> LadderResult:
    """Run every level T steps, coarsen to the coarsest grid and compare to the finest."""
    eps = check_ladder(eps_list)
    if T < 0:
        raise InvalidArgumentError("T must be >= 0")
    args = [(shape, quad, kernel_spec, e, T, backend, supersample, boundary, length, eta)
            for e in eps]
    out = _map(_level_job, args, jobs)
    coarse = [coarsen(final, _ratio(eps[0], e)) for e, (final, *_rest) in zip(eps, out)]
    levels = []
    for e, c, (final, sg, fg, me) in zip(eps, coarse, out):
        levels.append(LadderLevel(e, T, l1_distance(c, coarse[-1]), sg, fg, me, final.population))
    sid = type(shape).__name__.lower()
    return LadderResult(tuple(levels), sid, quad, f"{kernel_spec.shape}(r={kernel_spec.radius:g})")


@dataclass(frozen=True)
class PerturbationRow:
    size: float
    gap: float
    probe: float
    ms: float
    mb: float
    bound_holds: bool


@dataclass(frozen=True)
class PerturbationTable:
    kind: str
    epsilon: float
    rows: tuple

    @property
    def gaps(self) -> list:
        return [r.gap for r in self.rows]

    @property
    def monotone(self) -> bool:
        """Weakly decreasing after the first entry."""
        g = self.gaps[1:]
        return all(b <= a for a, b in zip(g, g[1:]))

    @property
    def final_bound_holds(self) -> bool:
        return bool(self.rows) and self.rows[-1].bound_holds


def perturbation_study(kind: str, shape: AnalyticShape, quad: ThresholdQuad,
                       kernel_spec: KernelSpec, epsilon: float, sizes,
                       backend: str | None = None, supersample: int = 8,
                       boundary=None, length=None) -> PerturbationTable:
    """One step under perturbed thresholds (all four shifted by +size) or kernel
    radius (radius + size), compared with the unperturbed step from the same input.

    ``bound_holds`` checks gap <= ms + mb with the margin windows probed at the
    perturbation's effect on the rule: the threshold shift itself, or the sup
    change of alpha for kernel perturbations.
    """
    if kind not in ("threshold", "kernel"):
        raise InvalidArgumentError("kind must be 'threshold' or 'kernel'")
    sizes = [float(s) for s in sizes]
    if any(s < 0 for s in sizes):
        raise InvalidArgumentError("perturbation sizes must be nonnegative")
    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidArgumentError("perturbation sizes must be strictly decreasing")
    a = rasterize(shape, _domain(epsilon, boundary, length))
    k = discretize_kernel(kernel_spec, epsilon, supersample, a.dim)
    base_spec = AutomatonSpec(quad, k, backend)
    base = step(a, base_spec)
    alpha0 = None
    rows = []
    for s in sizes:
        if kind == "threshold":
            spec = AutomatonSpec(quad.shifted(s), k, backend)
            probe = s
        else:
            kn = discretize_kernel(kernel_spec.with_radius(kernel_spec.radius + s), epsilon,
                                   supersample, a.dim)
            spec = AutomatonSpec(quad, kn, backend)
            R = tuple(max(x, y) for x, y in zip(k.radius, kn.radius))
            p = a.padded(R)
            if alpha0 is None or alpha0[0] != R:
                alpha0 = (R, convolve(p, k, backend).values)
            probe = float(abs(convolve(p, kn, backend).values - alpha0[1]).max())
        gap = l1_distance(step(a, spec), base)
        # widen slightly so cells exactly at distance probe stay inside the window
        width = probe * (1 + 1e-9) + 1e-15
        m = margin_report(a, base_spec, width, min(width, 1e-12))
        rows.append(PerturbationRow(s, gap, probe, m.ms, m.mb, gap <= m.ms + m.mb + 1e-15))
    return PerturbationTable(kind, float(epsilon), tuple(rows))


@dataclass(frozen=True)
class TrackLevel:
    epsilon: float
    report: LifeFormReport
    displacement_physical: tuple | None


@dataclass(frozen=True)
class TrackResult:
    levels: tuple
    verdict: str


def track_levels(levels, max_steps: int = 256, max_period: int | None = None) -> TrackResult:
    """Detect the life form of each (config, spec) pair and compare kinds."""
    out = []
    for a, spec in levels:
        rep = detect_lifeform(a, spec, max_steps, max_period)
        phys = None if rep.displacement is None else tuple(d * a.epsilon for d in rep.displacement)
        out.append(TrackLevel(a.epsilon, rep, phys))
    kinds = {lv.report.kind for lv in out}
    if "unresolved" in kinds:
        verdict = "inconclusive"
    elif len(kinds) == 1 and len({lv.report.period for lv in out}) == 1:
        verdict = "consistent"
    else:
        verdict = "inconsistent"
    return TrackResult(tuple(out), verdict)


def lifeform_evolution_track(shape: AnalyticShape, quad: ThresholdQuad, kernel_spec: KernelSpec,
                             eps_list, max_steps: int = 64, max_period: int | None = None,
                             backend: str | None = None, supersample: int = 8,
                             boundary=None, length=None) -> TrackResult:
    eps = check_ladder(eps_list)
    levels = []
    for e in eps:
        a = rasterize(shape, _domain(e, boundary, length))
        k = discretize_kernel(kernel_spec, e, supersample, a.dim)
        levels.append((a, AutomatonSpec(quad, k, backend)))
    return track_levels(levels, max_steps, max_period)


def ladder_rate(result: LadderResult) -> float:
    """Least-squares slope of log(gap) against log(epsilon), finest level excluded."""
    pts = [(math.log(lv.epsilon), math.log(lv.gap_to_finest))
           for lv in result.levels[:-1] if lv.gap_to_finest > 0]
    if len(pts) < 2:
        return math.nan
    mx = sum(p[0] for p in pts) / len(pts)
    my = sum(p[1] for p in pts) / len(pts)
    num = sum((x - mx) * (y - my) for x, y in pts)
    den = sum((x - mx) ** 2 for x, _ in pts)
    return num / den
