import math

import numpy as np
import pytest

from reallife.automaton import FIG1_QUAD, ThresholdQuad, evans_fig1, validate_quad
from reallife.errors import ConfigurationError, InvalidArgumentError, ThresholdOrderError
from reallife.grid import BinaryConfig
from reallife.harness import (
    check_ladder,
    ladder_rate,
    lifeform_evolution_track,
    perturbation_study,
    refinement_ladder,
    track_levels,
)
from reallife.kernel import KernelSpec
from reallife.lifeform import scale_pattern
from reallife.shapes import Ball, Empty, Rectangle, blob, ribbon

DISK = Ball("l2", 0.45)
DISK_QUAD = validate_quad(0.20, 0.26, 0.35, 0.50)
RIBBON_QUAD = validate_quad(0.20, 0.26, 0.28, 0.30)
K = KernelSpec("ball-l2", 1.0)
LADDER = [1 / 16, 1 / 32, 1 / 64, 1 / 128]


def test_check_ladder():
    assert check_ladder([0.5, 0.25]) == [0.5, 0.25]
    for bad in ([], [0.25, 0.5], [0.5, 0.5], [1 / 3, 1 / 4], [0.5, 0.3]):
        with pytest.raises(ConfigurationError):
            check_ladder(bad)


def test_ladder_rejects_non_nested_and_negative_T():
    with pytest.raises(ConfigurationError):
        refinement_ladder(DISK, DISK_QUAD, K, [1 / 6, 1 / 8], 0)
    with pytest.raises(InvalidArgumentError):
        refinement_ladder(DISK, DISK_QUAD, K, [1 / 8, 1 / 16], -1)


@pytest.mark.parametrize("shape, perimeter", [
    (DISK, 2 * math.pi * 0.45),
    (Rectangle((-0.3, -0.3), (0.3, 0.3)), 2.4),
])
def test_rasterization_gap_is_linear_in_epsilon(shape, perimeter):
    eps = [1 / 8, 1 / 16, 1 / 32, 1 / 64, 1 / 128]
    res = refinement_ladder(shape, DISK_QUAD, K, eps, 0)
    for e, g in zip(eps, res.gaps):
        assert 0 <= g <= 4 * perimeter * e
    assert res.gaps[-2] < res.gaps[0]
    assert res.gaps[-1] == 0


def test_disk_ladder():
    res = refinement_ladder(DISK, DISK_QUAD, K, LADDER, 5)
    assert [lv.epsilon for lv in res.levels] == LADDER
    assert all(b < a for a, b in zip(res.gaps, res.gaps[1:]))
    for lv in res.levels:
        assert lv.self_gap <= 10 * lv.epsilon
        assert lv.final_self_gap <= 10 * lv.epsilon
        assert lv.population > 0
    assert res.rows()[0]["epsilon"] == 1 / 16
    assert ladder_rate(res) > 0


def test_blob_ladder_under_fig1_thresholds():
    quad = ThresholdQuad(*FIG1_QUAD, mode="closed")
    res = refinement_ladder(blob(1), quad, KernelSpec("ball-l2", 0.5), LADDER, 3)
    assert all(lv.population > 0 for lv in res.levels)
    assert res.gaps[-2] < res.gaps[0]


def test_ladder_parallel_matches_serial():
    a = refinement_ladder(DISK, DISK_QUAD, K, [1 / 8, 1 / 16, 1 / 32], 2, jobs=1)
    b = refinement_ladder(DISK, DISK_QUAD, K, [1 / 8, 1 / 16, 1 / 32], 2, jobs=2)
    assert a.rows() == b.rows()


def test_threshold_perturbation():
    sizes = [10.0 ** -k for k in range(1, 7)]
    t = perturbation_study("threshold", DISK, DISK_QUAD, K, 1 / 64, sizes)
    assert [r.size for r in t.rows] == sizes
    assert t.monotone
    assert t.gaps[-1] <= (1 / 64) ** 2
    assert all(r.bound_holds for r in t.rows)
    assert t.final_bound_holds


def test_kernel_perturbation_vanishes():
    sizes = [10.0 ** -k for k in range(1, 7)]
    t = perturbation_study("kernel", DISK, DISK_QUAD, K, 1 / 64, sizes)
    assert t.monotone and t.gaps[-1] == 0
    assert all(r.bound_holds for r in t.rows)


def test_perturbation_edge_cases():
    assert perturbation_study("threshold", DISK, DISK_QUAD, K, 1 / 16, [0.0]).gaps == [0.0]
    with pytest.raises(ThresholdOrderError):
        perturbation_study("threshold", DISK, DISK_QUAD, K, 1 / 16, [0.6])
    with pytest.raises(InvalidArgumentError):
        perturbation_study("threshold", DISK, DISK_QUAD, K, 1 / 16, [0.01, 0.1])
    with pytest.raises(InvalidArgumentError):
        perturbation_study("noise", DISK, DISK_QUAD, K, 1 / 16, [0.1])


def test_ribbon_track_is_still():
    r = lifeform_evolution_track(ribbon(0.4, 0), RIBBON_QUAD, K, [1 / 32, 1 / 64, 1 / 128], 8,
                                 boundary=("periodic", "growable"), length=1.0)
    assert r.verdict == "consistent"
    assert all(lv.report.kind == "still" for lv in r.levels)


def test_empty_track_is_still():
    r = lifeform_evolution_track(Empty(2), DISK_QUAD, K, [1 / 16, 1 / 32], 8)
    assert r.verdict == "consistent"
    assert {lv.report.kind for lv in r.levels} == {"still"}


def test_fig1_scaled_seed_reporting():
    rng = np.random.default_rng(5)
    a = BinaryConfig.from_array((rng.random((40, 40)) < 0.5).astype(np.uint8), 1 / 25)
    r = track_levels([(a, evans_fig1(25)), (scale_pattern(a, 2), evans_fig1(50))], 40)
    assert [lv.epsilon for lv in r.levels] == [1 / 25, 1 / 50]
    assert r.verdict in ("consistent", "inconsistent", "inconclusive")
    for lv in r.levels:
        if lv.report.displacement is not None:
            assert lv.displacement_physical == tuple(d * lv.epsilon for d in lv.report.displacement)


def test_unresolved_level_is_inconclusive():
    from reallife.automaton import conway
    from reallife.lifeform import pattern

    r = track_levels([(pattern("glider"), conway())], max_steps=2)
    assert r.verdict == "inconclusive"
