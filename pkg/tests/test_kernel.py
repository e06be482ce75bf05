import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import integrate

from oracles.simple import box_cell_mass
from reallife.errors import DimensionMismatchError, InvalidArgumentError
from reallife.kernel import (
    DiscreteKernel,
    KernelSpec,
    cell_masses,
    discretize_kernel,
    kernel_l1_distance,
    mollify,
    uniform_kernel,
)

SHAPES = ["ball-l2", "diamond-l1", "box-linf"]


def test_box_1d_weights():
    k = discretize_kernel(KernelSpec("box-linf", 1.0), 0.5, dim=1)
    assert k.weights.tolist() == [1 / 8, 1 / 4, 1 / 4, 1 / 4, 1 / 8]


def test_box_2d_weights():
    k = discretize_kernel(KernelSpec("box-linf", 1.0), 1.0, dim=2)
    assert k.weights[1, 1] == 1 / 4
    assert k.weights[0, 1] == k.weights[1, 2] == 1 / 8
    assert k.weights[0, 0] == k.weights[2, 2] == 1 / 16
    assert k.total() == 1.0


@pytest.mark.parametrize("eps,R", [(1 / 3, 1.0), (0.3, 0.7), (1 / 8, 1.0)])
def test_box_matches_rational_overlap(eps, R):
    raw = cell_masses(KernelSpec("box-linf", R), eps, dim=2)
    r = (raw.shape[0] - 1) // 2
    for i in range(raw.shape[0]):
        for j in range(raw.shape[1]):
            exact = box_cell_mass((i - r, j - r), Fraction(eps), Fraction(R))
            assert abs(raw[i, j] - float(exact)) <= 1e-14


def _quad_cell(spec, eps, z):
    """Cell mass as a 1D integral of the chord length through the cell."""
    R = spec.radius
    x0, y0 = eps * z[0] - eps / 2, eps * z[1] - eps / 2

    def height(x):
        if spec.shape == "ball-l2":
            h = math.sqrt(max(R * R - x * x, 0.0))
        else:
            h = max(R - abs(x), 0.0)
        return max(0.0, min(y0 + eps, h) - max(y0, -h))

    val, _ = integrate.quad(height, x0, x0 + eps, limit=200, epsabs=1e-14)
    return val / spec.mass(2)


@pytest.mark.parametrize("shape", ["ball-l2", "diamond-l1"])
def test_curved_cells_match_quadrature(shape):
    spec = KernelSpec(shape, 1.0)
    eps = 1 / 4
    raw = cell_masses(spec, eps, dim=2)
    r = (raw.shape[0] - 1) // 2
    for z in [(0, 0), (1, 2), (3, 1), (2, 3), (4, 0), (-3, -2), (0, 4)]:
        assert raw[z[0] + r, z[1] + r] == pytest.approx(_quad_cell(spec, eps, z), abs=1e-10)


@pytest.mark.parametrize("shape", SHAPES)
@pytest.mark.parametrize("eps", [1 / 8, 1 / 16, 1 / 32])
def test_discretization_sums_and_sup_bound(shape, eps):
    k = discretize_kernel(KernelSpec(shape, 1.0), eps, supersample=32)
    assert abs(k.raw_sum - 1) <= 1e-6
    assert k.total() == 1.0
    assert k.raw_max <= eps ** 2 * k.sup_density * (1 + 1e-6)


@pytest.mark.parametrize("shape", SHAPES)
def test_symmetric_specs_give_symmetric_weights(shape):
    w = discretize_kernel(KernelSpec(shape, 1.0), 1 / 10).weights
    assert np.allclose(w, w[::-1, :], atol=1e-17, rtol=0)
    assert np.allclose(w, w[:, ::-1], atol=1e-17, rtol=0)
    assert np.allclose(w, w.T, atol=1e-17, rtol=0)


def test_midpoint_path_3d_and_radial():
    k = discretize_kernel(KernelSpec("ball-l2", 1.0), 1 / 4, supersample=8, dim=3)
    assert abs(k.raw_sum - 1) < 1e-2
    assert k.total() == 1.0
    tent = KernelSpec("radial-table", knots=((0, 1), (1, 0)))
    k = discretize_kernel(tent, 1 / 8, supersample=16)
    assert abs(k.raw_sum - 1) < 1e-3
    assert k.max_weight == k.weights[k.radius]


def test_tiny_kernel_on_coarse_grid():
    k = discretize_kernel(KernelSpec("ball-l2", 0.2), 1.0)
    assert k.weights.shape == (1, 1)
    assert k.weights[0, 0] == 1.0


def test_zero_mass_is_rejected():
    with pytest.raises(InvalidArgumentError):
        discretize_kernel(KernelSpec("box-linf", 1.0), 1.0, supersample=0)
    with pytest.raises(InvalidArgumentError):
        KernelSpec("radial-table", knots=((0, 0), (1, 0)))


def test_uniform_kernel_examples():
    k = uniform_kernel(2, 1)
    assert k.weights.shape == (3, 3) and np.all(k.weights == 1 / 9)
    assert k.epsilon == 1.0 and k.uniform
    k = uniform_kernel(2, 25)
    assert k.weights.size == 2601 and np.all(k.weights == 1 / 2601)
    assert k.epsilon == 1 / 25
    k = uniform_kernel(1, 0)
    assert k.weights.tolist() == [1.0]


def test_mollify():
    k = discretize_kernel(KernelSpec("ball-l2", 1.0), 1 / 8)
    assert kernel_l1_distance(mollify(k, 0.1), k) < 1e-3
    m = mollify(uniform_kernel(2, 3), 1.5)
    assert m.total() == 1.0
    assert np.allclose(m.weights, m.weights[::-1, :], atol=1e-17, rtol=0)
    assert m.radius == (9, 9)
    d = [kernel_l1_distance(mollify(k, s), k) for s in (2.0, 1.0, 0.5, 0.25)]
    assert all(b < a for a, b in zip(d, d[1:]))


def test_kernel_l1_distance():
    k = uniform_kernel(2, 1)
    delta = DiscreteKernel(1.0, np.ones((1, 1)))
    assert kernel_l1_distance(k, k) == 0
    assert kernel_l1_distance(k, delta) == pytest.approx(16 / 9, abs=1e-15)
    with pytest.raises(DimensionMismatchError):
        kernel_l1_distance(k, uniform_kernel(2, 2))


def test_csv_dump():
    lines = uniform_kernel(2, 1).to_csv().splitlines()
    assert lines[0] == "dz1,dz2,weight"
    assert lines[1] == f"-1,-1,{1 / 9!r}"
    assert len(lines) == 10


def test_spec_dict_round_trip():
    for s in (KernelSpec("ball-l2", 1.5), KernelSpec("radial-table", knots=((0, 2), (0.5, 1), (1, 0)))):
        assert KernelSpec.from_dict(s.to_dict()) == s
