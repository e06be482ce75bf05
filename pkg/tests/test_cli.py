import json
import subprocess
import sys

import pytest

from reallife.cli import main
from reallife.io import read_pattern, read_pgm, write_pattern
from reallife.grid import BinaryConfig
from reallife.lifeform import pattern

DISK_QUAD = {"s0": 0.20, "b0": 0.26, "b1": 0.35, "s1": 0.50}


def write_cfg(path, **cfg):
    path.write_text(json.dumps(dict(schema=1, **cfg)))
    return str(path)


def report(path):
    return dict(line.split(": ", 1) for line in path.read_text().splitlines())


def test_run_blinker_frames(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", preset="conway", pattern="blinker", T=2, frames=True)
    out = tmp_path / "out"
    assert main(["run", cfg, "--out", str(out)]) == 0
    frames = sorted((out / "frames").iterdir())
    assert [f.name for f in frames] == ["frame_0000.pgm", "frame_0001.pgm", "frame_0002.pgm"]
    assert frames[0].read_bytes() == frames[2].read_bytes()
    assert frames[0].read_bytes() != frames[1].read_bytes()
    rows = (out / "trajectory.csv").read_text().splitlines()
    assert rows[0] == "t,population,mass,bbox_lo,bbox_hi"
    assert rows[1] == "0,3,3.0,0 0,0 2"
    assert read_pattern(out / "final.p1") == pattern("blinker")


def test_global_flags_before_or_after_subcommand(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", preset="conway", pattern="glider", T=4)
    assert main(["--backend", "naive", "--out", str(tmp_path / "a"), "run", cfg]) == 0
    assert main(["run", cfg, "--backend", "fft", "--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "trajectory.csv").read_bytes() == \
        (tmp_path / "b" / "trajectory.csv").read_bytes()


def test_missing_quad_exits_2(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "c.json", kernel={"uniform": 1}, pattern="block", T=1)
    assert main(["run", cfg, "--out", str(tmp_path)]) == 2
    assert "'quad'" in capsys.readouterr().err


@pytest.mark.parametrize("text, fragment", [
    ('{"schema": 1,\n "T": 2,,}', "line 2"),
    ('{"T": 2}', "schema"),
    ('{"schema": 1, "preset": "conway", "pattern": "block", "T": 1, "colour": 3}', "colour"),
    ('{"schema": 1, "preset": "conway", "pattern": "block", "T": -1}', "'T'"),
    ('{"schema": 1, "preset": "conway", "pattern": "block", "random": {"extent": [3, 3]}, "T": 1}',
     "exactly one"),
    ('{"schema": 1, "quad": {"s0": 0.3, "b0": 0.2, "b1": 0.4, "s1": 0.5}, '
     '"kernel": {"uniform": 1}, "pattern": "block", "T": 1}', "s0 <= b0"),
])
def test_bad_configs_exit_2(tmp_path, capsys, text, fragment):
    p = tmp_path / "c.json"
    p.write_text(text)
    assert main(["run", str(p), "--out", str(tmp_path)]) == 2
    assert fragment in capsys.readouterr().err


def test_resource_limit_exits_3(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", preset="conway", random={"extent": [30, 30]}, T=2,
                    max_cells=100)
    assert main(["run", cfg, "--out", str(tmp_path)]) == 3


def test_random_seed_flag(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", preset="conway", random={"extent": [20, 20]}, T=3, seed=1)
    main(["run", cfg, "--out", str(tmp_path / "a")])
    main(["run", cfg, "--out", str(tmp_path / "b"), "--seed", "2"])
    main(["run", cfg, "--out", str(tmp_path / "c"), "--seed", "1"])
    a, b, c = ((tmp_path / d / "trajectory.csv").read_bytes() for d in "abc")
    assert a == c and a != b


def test_construct_then_verify(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", construct={"kind": "ball", "norm": "l2", "r": 0.45},
                    quad=DISK_QUAD, epsilon=1 / 32)
    out = tmp_path / "con"
    assert main(["construct", cfg, "--out", str(out)]) == 0
    v = report(out / "verdict.txt")
    assert v["predicted_valid"] == "true" and v["kernel"] == "ball-l2"
    vcfg = write_cfg(out / "v.json", pattern_file="pattern.p1", quad=dict(DISK_QUAD, mode="strict"),
                     kernel={"shape": "ball-l2", "radius": 1.0})
    assert main(["verify", vcfg, "--out", str(out)]) == 0
    r = report(out / "verify.txt")
    for key in ("fixed", "gap", "inclusion_ok", "m_inf", "m_inf_infinite", "gamma",
                "margin_ms", "margin_mb", "margin_m_exact"):
        assert key in r
    assert r["fixed"] == r["inclusion_ok"]


def test_construct_ribbon_needs_periodic_axis(tmp_path):
    cfg = write_cfg(tmp_path / "c.json",
                    construct={"kind": "ribbon", "w": 0.4, "boundary": ["growable", "growable"]},
                    quad={"s0": 0.2, "b0": 0.26, "b1": 0.28, "s1": 0.3}, epsilon=1 / 16)
    assert main(["construct", cfg, "--out", str(tmp_path)]) == 2


def test_detect_glider(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", preset="conway", pattern="glider")
    assert main(["detect", cfg, "--out", str(tmp_path)]) == 0
    r = report(tmp_path / "lifeform.txt")
    assert (r["kind"], r["period"], r["displacement"]) == ("bug", "4", "1 1")


def test_ladder_and_perturb(tmp_path):
    base = dict(shape={"type": "ball", "norm": "l2", "radius": 0.45}, quad=DISK_QUAD,
                kernel={"shape": "ball-l2", "radius": 1.0})
    cfg = write_cfg(tmp_path / "l.json", eps_list=[0.125, 0.0625, 0.03125], T=1, **base)
    assert main(["ladder", cfg, "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "ladder.csv").read_text().splitlines()
    assert rows[0].startswith("epsilon,T,gap_to_finest") and len(rows) == 4
    cfg = write_cfg(tmp_path / "p.json", kind="threshold", epsilon=0.0625,
                    sizes=[0.1, 0.01, 0.001], **base)
    assert main(["perturb", cfg, "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "perturb.csv").read_text().splitlines()
    assert rows[0] == "size,gap,probe,ms,mb,bound_holds" and len(rows) == 4
    bad = write_cfg(tmp_path / "b.json", eps_list=[0.125, 0.05], T=1, **base)
    assert main(["ladder", bad, "--out", str(tmp_path)]) == 2


def test_experiment_field_must_match(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", experiment="ladder", preset="conway", pattern="block", T=1)
    assert main(["run", cfg, "--out", str(tmp_path)]) == 2


def test_render(tmp_path):
    write_pattern(pattern("block"), tmp_path / "b.p1")
    assert main(["render", str(tmp_path / "b.p1"), str(tmp_path / "b.pgm"), "--scale", "4"]) == 0
    img = read_pgm(tmp_path / "b.pgm")
    assert img.shape == (8, 8) and (img == 0).all()
    assert main(["render", str(tmp_path / "b.p1"), str(tmp_path / "c.pgm"), "--scale", "4"]) == 0
    assert (tmp_path / "b.pgm").read_bytes() == (tmp_path / "c.pgm").read_bytes()
    write_pattern(BinaryConfig.empty(), tmp_path / "e.p1")
    assert main(["render", str(tmp_path / "e.p1"), str(tmp_path / "e.pgm")]) == 0
    assert (read_pgm(tmp_path / "e.pgm") == 255).all()


def test_render_errors(tmp_path):
    (tmp_path / "bad.p1").write_text("dims 2\n")
    assert main(["render", str(tmp_path / "bad.p1"), str(tmp_path / "x.pgm")]) == 2
    assert main(["render", str(tmp_path / "missing.p1"), str(tmp_path / "x.pgm")]) == 2
    write_pattern(pattern("block"), tmp_path / "b.p1")
    assert main(["render", str(tmp_path / "b.p1"), str(tmp_path / "x.pgm"), "--scale", "0"]) == 2


def test_usage_errors_and_module_entry(tmp_path):
    assert main([]) == 2
    assert main(["--version"]) == 0
    out = subprocess.run([sys.executable, "-m", "reallife", "--help"], capture_output=True, text=True)
    assert out.returncode == 0 and "render" in out.stdout
