import math

import numpy as np
import pytest

from reallife.errors import UnsupportedShapeError
from reallife.grid import Domain
from reallife.shapes import (
    Annulus,
    Ball,
    Empty,
    Rectangle,
    Union,
    blob,
    rasterize,
    ribbon,
    shape_from_dict,
)


def test_linf_ball_single_cell():
    a = rasterize(Ball("linf", 0.45), Domain.make((1, 1), 0.5))
    assert a.support().tolist() == [[0, 0]]


def test_empty_shape():
    a = rasterize(Empty(), Domain.make((1, 1), 0.1))
    assert a.is_empty()


@pytest.mark.parametrize("eps", [1 / 8, 1 / 16, 1 / 32, 1 / 64])
def test_disk_area_converges(eps):
    r = 0.45
    a = rasterize(Ball("l2", r), Domain.make((1, 1), eps))
    assert abs(a.mass - math.pi * r * r) <= 3 * eps * 2 * math.pi * r


def test_disk_has_margin_of_dead_cells():
    a = rasterize(Ball("l2", 0.3), Domain.make((1, 1), 0.1))
    assert not a.cells[0].any() and not a.cells[-1].any()
    assert not a.cells[:, 0].any() and not a.cells[:, -1].any()


def test_rectangle_is_half_open():
    a = rasterize(Rectangle((0, 0), (0.5, 0.5)), Domain.make((1, 1), 1 / 32))
    assert a.population == 256
    lo, hi = a.bbox()
    assert lo == (0, 0) and hi == (15, 15)


def test_ribbon_requires_periodic_axis():
    with pytest.raises(UnsupportedShapeError):
        rasterize(ribbon(0.4), Domain.make((1, 1), 0.1))
    d = Domain.make((10, 1), 0.1, ["periodic", "growable"])
    a = rasterize(ribbon(0.4, axis=0), d)
    assert a.extent[0] == 10
    assert set(np.unique(a.support()[:, 1])) == {-2, -1, 0, 1, 2}


def test_annulus_and_union():
    a = rasterize(Annulus(0.2, 0.4), Domain.make((1, 1), 0.05))
    assert (0, 0) not in {tuple(p) for p in a.support()}
    u = Union((Ball("l2", 0.1, (-1, 0)), Ball("l2", 0.1, (1, 0))))
    d = Domain.make((1, 1), 1 / 16)
    assert rasterize(u, d).population == 2 * rasterize(Ball("l2", 0.1), d).population


def test_blob_is_seeded():
    d = Domain.make((1, 1), 1 / 16)
    assert rasterize(blob(3), d) == rasterize(blob(3), d)
    assert rasterize(blob(3), d) != rasterize(blob(4), d)


def test_shape_dict_round_trip():
    for s in (Ball("l1", 0.3, (0.1, 0.2)), Annulus(0.1, 0.3), Rectangle((0, 0), (1, 2)),
              ribbon(0.4), Union((Ball("l2", 0.2), Ball("linf", 0.1, (1, 1))))):
        assert shape_from_dict(s.to_dict()) == s
