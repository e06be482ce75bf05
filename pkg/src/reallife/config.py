"""Experiment config files (JSON, ``"schema": 1``) and their validation.

Every validation failure raises :class:`ConfigurationError` naming the
offending field, so the CLI can report it and exit with status 2.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .automaton import AutomatonSpec, ThresholdQuad, preset, validate_quad
from .errors import ConfigurationError, RealLifeError
from .grid import BinaryConfig, Domain, same_epsilon
from .io import read_pattern
from .kernel import KernelSpec, discretize_kernel, uniform_kernel
from .lifeform import pattern
from .shapes import AnalyticShape, rasterize, shape_from_dict

SCHEMA_VERSION = 1
EXPERIMENTS = ("run", "construct", "detect", "ladder", "perturb", "verify")

_COMMON = {"schema", "experiment", "seed", "backend", "description"}
_RULE = {"preset", "quad", "kernel", "epsilon", "supersample"}
_INITIAL = {"pattern", "pattern_file", "shape", "random", "boundary", "length"}
ALLOWED = {
    "run": _COMMON | _RULE | _INITIAL | {"T", "frames", "scale", "max_cells"},
    "detect": _COMMON | _RULE | _INITIAL | {"max_steps", "max_period"},
    "verify": _COMMON | _RULE | _INITIAL | {"delta", "eta", "fd_step"},
    "construct": _COMMON | {"construct", "quad", "epsilon", "supersample", "scale"},
    "ladder": _COMMON | {"shape", "quad", "kernel", "eps_list", "T", "boundary",
                         "length", "supersample", "jobs", "eta"},
    "perturb": _COMMON | {"kind", "shape", "quad", "kernel", "epsilon", "sizes",
                          "boundary", "length", "supersample"},
}


def load_config(path, experiment: str | None = None) -> dict:
    """Read and shallow-validate a config; records its directory as ``_base``."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"{path}: cannot read config ({exc.strerror})") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(
            f"{path}: line {exc.lineno} column {exc.colno}: invalid JSON ({exc.msg})"
        ) from None
    if not isinstance(cfg, dict):
        raise ConfigurationError(f"{path}: top level must be a JSON object")
    if "schema" not in cfg:
        raise ConfigurationError("field 'schema': missing (expected 1)")
    if cfg["schema"] != SCHEMA_VERSION:
        raise ConfigurationError(f"field 'schema': unsupported version {cfg['schema']!r}")
    named = cfg.get("experiment")
    if experiment is None:
        experiment = named
    elif named is not None and named != experiment:
        raise ConfigurationError(
            f"field 'experiment': config is for {named!r}, not {experiment!r}"
        )
    if experiment not in EXPERIMENTS:
        raise ConfigurationError(f"field 'experiment': must be one of {EXPERIMENTS}")
    unknown = sorted(set(cfg) - ALLOWED[experiment])
    if unknown:
        raise ConfigurationError(f"field {unknown[0]!r}: not allowed in a {experiment} config")
    cfg = dict(cfg, experiment=experiment, _base=str(path.parent))
    return cfg


def require(cfg: dict, key: str, kind=None):
    if key not in cfg or cfg[key] is None:
        raise ConfigurationError(f"field {key!r}: missing")
    value = cfg[key]
    if kind is not None and not _is(value, kind):
        raise ConfigurationError(f"field {key!r}: expected {_kind_name(kind)}, got {value!r}")
    return value


def optional(cfg: dict, key: str, default, kind=None):
    if cfg.get(key) is None:
        return default
    return require(cfg, key, kind)


def _is(value, kind):
    if kind is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    if kind is int:
        return isinstance(value, int) and not isinstance(value, bool)
    return isinstance(value, kind)


def _kind_name(kind):
    return {float: "a number", int: "an integer", str: "a string", dict: "an object",
            list: "a list", bool: "true/false"}.get(kind, str(kind))


def _field(name: str, fn, *args):
    """Run a builder and prefix any library error with the field name."""
    try:
        return fn(*args)
    except ConfigurationError:
        raise
    except (RealLifeError, KeyError, TypeError, ValueError) as exc:
        msg = exc.args[0] if exc.args else type(exc).__name__
        if isinstance(exc, KeyError):
            msg = f"missing key {msg!r}"
        raise ConfigurationError(f"field {name!r}: {msg}") from None


def build_quad(cfg: dict, default_mode: str = "strict") -> ThresholdQuad:
    q = require(cfg, "quad", dict)
    for k in ("s0", "b0", "b1", "s1"):
        if not _is(q.get(k), float):
            raise ConfigurationError(f"field 'quad.{k}': missing or not a number")
    return _field("quad", validate_quad, q["s0"], q["b0"], q["b1"], q["s1"],
                  q.get("mode", default_mode))


def build_kernel_spec(cfg: dict) -> KernelSpec:
    return _field("kernel", KernelSpec.from_dict, require(cfg, "kernel", dict))


def build_rule(cfg: dict, epsilon_hint: float | None = None,
               backend: str | None = None) -> AutomatonSpec:
    """AutomatonSpec from ``preset`` or from ``quad`` + ``kernel`` (+ ``epsilon``)."""
    backend = backend if backend is not None else cfg.get("backend")
    if cfg.get("preset") is not None:
        for k in ("quad", "kernel"):
            if cfg.get(k) is not None:
                raise ConfigurationError(f"field {k!r}: not allowed together with 'preset'")
        return _field("preset", preset, require(cfg, "preset", str), backend)
    quad = build_quad(cfg, default_mode="closed")
    kd = require(cfg, "kernel", dict)
    if "uniform" in kd:
        n = kd["uniform"]
        if not _is(n, int):
            raise ConfigurationError("field 'kernel.uniform': expected an integer")
        k = _field("kernel", uniform_kernel, int(kd.get("dim", 2)), n)
    else:
        spec = build_kernel_spec(cfg)
        eps = optional(cfg, "epsilon", epsilon_hint, float)
        if eps is None:
            raise ConfigurationError("field 'epsilon': missing")
        k = _field("kernel", discretize_kernel, spec, float(eps),
                   optional(cfg, "supersample", 8, int), int(kd.get("dim", 2)))
    return _field("backend", AutomatonSpec, quad, k, backend)


def build_shape(d, name: str = "shape") -> AnalyticShape:
    if not isinstance(d, dict):
        raise ConfigurationError(f"field {name!r}: expected an object")
    return _field(name, shape_from_dict, d)


def shape_with_seed(cfg: dict, seed: int) -> AnalyticShape:
    d = dict(require(cfg, "shape", dict))
    if d.get("type") == "blob" and "seed" not in d:
        d["seed"] = seed
    return build_shape(d)


def pattern_epsilon(cfg: dict) -> float | None:
    """Epsilon recorded in a referenced pattern file, if any."""
    if cfg.get("pattern_file") is None:
        return None
    return _load_pattern_file(cfg).epsilon


def _load_pattern_file(cfg):
    p = Path(require(cfg, "pattern_file", str))
    if not p.is_absolute():
        p = Path(cfg.get("_base", ".")) / p
    return _field("pattern_file", read_pattern, p)


def domain_for(cfg: dict, epsilon: float, dim: int = 2) -> Domain:
    boundary = cfg.get("boundary")
    if boundary is None:
        return Domain.make((1,) * dim, epsilon)
    if isinstance(boundary, str):
        boundary = [boundary] * dim
    if not isinstance(boundary, list) or len(boundary) != dim:
        raise ConfigurationError(f"field 'boundary': expected {dim} modes")
    extent = []
    for ax, b in enumerate(boundary):
        if b == "periodic":
            L = require(cfg, "length", (int, float, list))
            L = L[ax] if isinstance(L, list) else L
            extent.append(max(1, int(round(float(L) / epsilon))))
        else:
            extent.append(1)
    return _field("boundary", Domain.make, extent, epsilon, tuple(boundary))


def build_initial(cfg: dict, spec: AutomatonSpec, seed: int) -> BinaryConfig:
    """Initial configuration from exactly one of pattern / pattern_file / shape / random."""
    given = [k for k in ("pattern", "pattern_file", "shape", "random") if cfg.get(k) is not None]
    if len(given) != 1:
        raise ConfigurationError(
            "field 'pattern': give exactly one of pattern, pattern_file, shape, random"
        )
    kind = given[0]
    eps = spec.epsilon
    if kind == "pattern":
        a = _field("pattern", pattern, require(cfg, "pattern", str), eps)
    elif kind == "pattern_file":
        a = _load_pattern_file(cfg)
        if not same_epsilon(a.epsilon, eps):
            raise ConfigurationError(
                f"field 'pattern_file': epsilon {a.epsilon!r} does not match the rule's {eps!r}"
            )
    elif kind == "shape":
        a = _field("shape", rasterize, shape_with_seed(cfg, seed),
                   domain_for(cfg, eps, spec.kernel.dim))
    else:
        r = require(cfg, "random", dict)
        extent = r.get("extent")
        if not (isinstance(extent, list) and extent and all(_is(n, int) and n > 0 for n in extent)):
            raise ConfigurationError("field 'random.extent': expected a list of positive integers")
        density = r.get("density", 0.5)
        if not (_is(density, float) and 0 <= density <= 1):
            raise ConfigurationError("field 'random.density': expected a number in [0, 1]")
        rng = np.random.default_rng(seed)
        cells = (rng.random(tuple(extent)) < density).astype(np.uint8)
        origin = tuple(-(n // 2) for n in extent)
        a = BinaryConfig.from_array(cells, eps, origin)
    if a.dim != spec.kernel.dim:
        raise ConfigurationError(f"field {kind!r}: dimension {a.dim} does not match the kernel")
    return a
