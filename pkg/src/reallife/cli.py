"""Command-line front end.

``reallife <experiment> config.json`` runs one of run, construct, detect,
ladder, perturb or verify and writes its outputs to ``--out``.
``reallife render pattern.p1 out.pgm`` draws a pattern file.

Exit status: 0 on success, 2 on invalid input, 3 when a resource cap is hit.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from . import __version__
from .automaton import margin_report, run
from .config import (
    EXPERIMENTS,
    build_initial,
    build_kernel_spec,
    build_quad,
    build_rule,
    load_config,
    optional,
    pattern_epsilon,
    require,
    shape_with_seed,
)
from .errors import ConfigurationError, RealLifeError, ResourceLimitError
from .harness import perturbation_study, refinement_ladder
from .io import read_pattern, write_pattern, write_pgm
from .lifeform import construct_ball, construct_ribbon, detect_lifeform, is_still_life
from .metrics import stability_report

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 2, 3


def _num(x) -> str:
    """Deterministic text for CSV and report values."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    if x is None:
        return ""
    if isinstance(x, (list, tuple)):
        return " ".join(_num(v) for v in x)
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_num(v) for v in r])


def _write_report(path: Path, items) -> None:
    lines = [f"{k}: {_num(v)}" for k, v in items]
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def _viewport(states):
    """Union of the support boxes of all states, plus one dead cell around."""
    boxes = [s.bbox() for s in states if s.bbox() is not None]
    dim = states[0].dim
    if not boxes:
        return (0,) * dim, (1,) * dim
    lo = [min(b[0][ax] for b in boxes) - 1 for ax in range(dim)]
    hi = [max(b[1][ax] for b in boxes) + 1 for ax in range(dim)]
    return tuple(lo), tuple(h - l + 1 for l, h in zip(lo, hi))


def exp_run(cfg, out: Path, seed: int, backend):
    spec = build_rule(cfg, pattern_epsilon(cfg), backend)
    a = build_initial(cfg, spec, seed)
    T = require(cfg, "T", int)
    if T < 0:
        raise ConfigurationError("field 'T': must be >= 0")
    traj = run(a, spec, T, optional(cfg, "max_cells", 1 << 24, int))
    rows = []
    for t, s in enumerate(traj):
        bb = s.bbox()
        rows.append([t, s.population, s.mass,
                     None if bb is None else list(bb[0]), None if bb is None else list(bb[1])])
    _write_csv(out / "trajectory.csv", ["t", "population", "mass", "bbox_lo", "bbox_hi"], rows)
    write_pattern(traj[-1], out / "final.p1")
    if optional(cfg, "frames", False, bool):
        frames = out / "frames"
        frames.mkdir(exist_ok=True)
        view = _viewport(traj)
        scale = optional(cfg, "scale", 1, int)
        for t, s in enumerate(traj):
            write_pgm(s, frames / f"frame_{t:04d}.pgm", scale, view)
    return f"ran {T} steps; final population {traj[-1].population}"


def exp_construct(cfg, out: Path, seed: int, backend):
    c = require(cfg, "construct", dict)
    kind = c.get("kind")
    quad = build_quad(cfg, default_mode="strict")
    eps = require(cfg, "epsilon", float)
    ss = optional(cfg, "supersample", 8, int)
    try:
        if kind == "ball":
            con = construct_ball(c.get("norm", "l2"), float(require(c, "r", float)), quad, eps,
                                 int(c.get("dim", 2)), ss, backend)
        elif kind == "ribbon":
            con = construct_ribbon(float(require(c, "w", float)), int(c.get("axis", 0)), quad,
                                   eps, float(c.get("length", 1.0)), c.get("boundary"),
                                   float(c.get("curvature", 0.0)), ss, backend)
        else:
            raise ConfigurationError("field 'construct.kind': expected 'ball' or 'ribbon'")
    except ConfigurationError:
        raise
    except (RealLifeError, ValueError) as exc:
        if isinstance(exc, ResourceLimitError):
            raise
        raise ConfigurationError(f"field 'construct': {exc}") from None
    check = is_still_life(con.config, con.spec)
    write_pattern(con.config, out / "pattern.p1")
    items = [("construction", kind), ("kernel", con.kernel_spec.shape),
             ("kernel_radius", con.kernel_spec.radius), ("epsilon", eps),
             ("quad", list(con.spec.quad.values)),
             ("predicted_valid", con.predicted_valid),
             ("validity_claimed", con.details.get("validity_claimed", True)),
             ("fixed", check.fixed), ("gap", check.gap),
             ("inclusion_ok", check.inclusion_ok), ("population", con.config.population)]
    for key in ("r", "w", "ss", "s1_center", "curvature"):
        if key in con.details:
            items.append((key, float(con.details[key])))
    _write_report(out / "verdict.txt", items)
    return f"predicted_valid={con.predicted_valid} fixed={check.fixed} gap={check.gap!r}"


def exp_detect(cfg, out: Path, seed: int, backend):
    spec = build_rule(cfg, pattern_epsilon(cfg), backend)
    a = build_initial(cfg, spec, seed)
    steps = optional(cfg, "max_steps", 256, int)
    rep = detect_lifeform(a, spec, steps, optional(cfg, "max_period", steps, int))
    phys = None if rep.displacement is None else [d * a.epsilon for d in rep.displacement]
    _write_report(out / "lifeform.txt", [
        ("kind", rep.kind), ("period", rep.period), ("displacement", rep.displacement),
        ("displacement_physical", phys), ("preperiod", rep.preperiod),
        ("steps_used", rep.steps_used), ("epsilon", a.epsilon)])
    return f"{rep.kind} period={rep.period} displacement={rep.displacement}"


def exp_ladder(cfg, out: Path, seed: int, backend):
    shape = shape_with_seed(cfg, seed)
    quad = build_quad(cfg)
    kspec = build_kernel_spec(cfg)
    eps = require(cfg, "eps_list", list)
    T = require(cfg, "T", int)
    res = refinement_ladder(shape, quad, kspec, eps, T, backend,
                            optional(cfg, "supersample", 8, int), cfg.get("boundary"),
                            cfg.get("length"), optional(cfg, "eta", 1e-9, float),
                            optional(cfg, "jobs", 1, int))
    header = ["epsilon", "T", "gap_to_finest", "self_gap", "final_self_gap", "m_exact",
              "population"]
    _write_csv(out / "ladder.csv", header,
               [[getattr(lv, h) for h in header] for lv in res.levels])
    return "gaps " + " ".join(repr(g) for g in res.gaps)


def exp_perturb(cfg, out: Path, seed: int, backend):
    kind = require(cfg, "kind", str)
    shape = shape_with_seed(cfg, seed)
    table = perturbation_study(kind, shape, build_quad(cfg), build_kernel_spec(cfg),
                               require(cfg, "epsilon", float), require(cfg, "sizes", list),
                               backend, optional(cfg, "supersample", 8, int),
                               cfg.get("boundary"), cfg.get("length"))
    header = ["size", "gap", "probe", "ms", "mb", "bound_holds"]
    _write_csv(out / "perturb.csv", header,
               [[getattr(r, h) for h in header] for r in table.rows])
    return f"monotone={table.monotone} final_bound_holds={table.final_bound_holds}"


def exp_verify(cfg, out: Path, seed: int, backend):
    spec = build_rule(cfg, pattern_epsilon(cfg), backend)
    a = build_initial(cfg, spec, seed)
    check = is_still_life(a, spec)
    items = [("fixed", check.fixed), ("gap", check.gap), ("inclusion_ok", check.inclusion_ok)]
    if check.fixed:
        st = stability_report(a, spec, optional(cfg, "fd_step", 1, int))
        items += [("m_inf", st.m_inf), ("m_inf_infinite", st.infinite), ("gamma", st.gamma)]
    else:
        items += [("m_inf", None), ("m_inf_infinite", None), ("gamma", None)]
    eta = optional(cfg, "eta", 1e-9, float)
    delta = optional(cfg, "delta", max(1e-3, eta), float)
    m = margin_report(a, spec, delta, eta)
    items += [("margin_delta", m.delta), ("margin_eta", m.eta), ("margin_ms", m.ms),
              ("margin_mb", m.mb), ("margin_m_exact", m.m_exact)]
    _write_report(out / "verify.txt", items)
    return f"fixed={check.fixed} gap={check.gap!r}"


RUNNERS = {"run": exp_run, "construct": exp_construct, "detect": exp_detect,
           "ladder": exp_ladder, "perturb": exp_perturb, "verify": exp_verify}


def cmd_run(experiment: str, config_path, out_dir, seed=None, backend=None) -> int:
    try:
        cfg = load_config(config_path, experiment)
        seed = seed if seed is not None else optional(cfg, "seed", 0, int)
        backend = backend if backend is not None else cfg.get("backend")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        msg = RUNNERS[experiment](cfg, out, seed, backend)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except RealLifeError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(msg)
    return EXIT_OK


def cmd_render(pattern_path, out_path, scale: int = 1) -> int:
    try:
        a = read_pattern(pattern_path)
        write_pgm(a, out_path, scale)
    except RealLifeError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"cannot write {out_path}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def _global_flags(parser, defaults: bool) -> None:
    # subcommands repeat the flags without defaults so earlier values survive
    d = (lambda v: v) if defaults else (lambda v: argparse.SUPPRESS)
    parser.add_argument("--backend", choices=("naive", "sat", "fft"), default=d(None),
                        help="convolution backend (default: sat for box kernels, else fft)")
    parser.add_argument("--seed", type=int, default=d(None), help="override the config seed")
    parser.add_argument("--out", default=d("."), help="output directory (default: current)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="reallife",
                                description="Larger-than-Life experiments from config files.")
    _global_flags(p, True)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        s = sub.add_parser(name, help=f"{name} experiment")
        _global_flags(s, False)
        s.add_argument("config", help="experiment config (JSON, schema 1)")
    r = sub.add_parser("render", help="draw a pattern file as PGM")
    _global_flags(r, False)
    r.add_argument("pattern")
    r.add_argument("output")
    r.add_argument("--scale", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors already; keep --help at 0
        return int(exc.code or 0)
    if args.command == "render":
        if args.scale < 1:
            print("invalid input: --scale must be a positive integer", file=sys.stderr)
            return EXIT_INVALID
        return cmd_render(args.pattern, args.output, args.scale)
    return cmd_run(args.command, args.config, args.out, args.seed, args.backend)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
