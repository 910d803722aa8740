import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from browder.errors import DimensionError, InvalidGrid, InvalidParamSpace
from browder.geometry import (
    Box,
    ParamSpace,
    Region,
    bfs_order,
    build_grid,
    clamp_to_box,
    make_graph_space,
    make_interval_space,
    make_sine_curve_space,
)


def test_interval_space_smallest():
    s = make_interval_space(2)
    assert s.points.ravel().tolist() == [0.0, 1.0]
    assert s.edges == ((0, 1),)


def test_interval_space_three():
    s = make_interval_space(3)
    assert s.points.ravel().tolist() == [0.0, 0.5, 1.0]
    assert s.edges == ((0, 1), (1, 2))


def test_interval_space_257_connected():
    s = make_interval_space(257)
    assert s.size == 257 and len(s.edges) == 256
    assert len(bfs_order([s.neighbors(i) for i in range(s.size)], 0)) == 257


def test_interval_space_rejects_single_node():
    with pytest.raises(InvalidParamSpace):
        make_interval_space(1)


def test_sine_curve_small():
    s = make_sine_curve_space(2, 2)
    pts = s.points
    assert len(pts) == 4
    assert pts[0].tolist() == [1.0, math.sin(1.0)]
    assert 0 < pts[1, 0] < 1 and pts[1, 1] == pytest.approx(math.sin(1 / pts[1, 0]))
    assert pts[2].tolist() == [0.0, -1.0] and pts[3].tolist() == [0.0, 1.0]
    assert len(s.edges) == 3


def test_sine_curve_full():
    s = make_sine_curve_space(100, 21)
    assert s.size == 121 and len(s.edges) == 120
    tail = s.points[:100]
    assert np.all(np.diff(tail[:, 0]) < 0)
    assert np.max(np.abs(tail[:, 1] - np.sin(1 / tail[:, 0]))) == 0.0
    assert np.all((s.points[:, 0] >= 0) & (s.points[:, 0] <= 1))
    assert np.all((s.points[:, 1] >= -1) & (s.points[:, 1] <= 1))


def test_sine_curve_bridge_goes_to_nearest_bar_point():
    s = make_sine_curve_space(50, 11)
    last = s.points[49]
    bridge = [e for e in s.edges if 49 in e and 48 not in e]
    assert len(bridge) == 1
    j = bridge[0][1]
    bar = s.points[50:]
    assert j - 50 == int(np.argmin(np.linalg.norm(bar - last, axis=1)))


def test_param_space_invariants():
    with pytest.raises(InvalidParamSpace, match="connected"):
        ParamSpace([[0.0], [1.0], [2.0]], ((0, 1),))
    with pytest.raises(InvalidParamSpace, match="self-loop"):
        ParamSpace([[0.0], [1.0]], ((0, 0), (0, 1)))
    with pytest.raises(InvalidParamSpace, match="distinct"):
        ParamSpace([[0.0], [0.0]], ((0, 1),))


def test_param_space_symmetric_adjacency():
    s = make_graph_space([[0, 0], [1, 0], [0, 1]], [(1, 0), (0, 2), (2, 0)])
    assert s.edges == ((0, 1), (0, 2))
    for i in range(s.size):
        for j in s.neighbors(i):
            assert i in s.neighbors(j) and i != j


def test_single_point_space():
    s = make_graph_space([[0.0]], [])
    assert s.size == 1 and s.edges == ()


def test_clamp_examples():
    assert clamp_to_box([0.5], Box([0], [1])).tolist() == [0.5]
    assert clamp_to_box([1.7, -3], Box([0, 0], [1, 1])).tolist() == [1.0, 0.0]
    assert clamp_to_box([1.0, 0.3], Box([0, 0], [1, 1])).tolist() == [1.0, 0.3]


def test_clamp_dimension_mismatch():
    with pytest.raises(DimensionError):
        clamp_to_box([1.0, 2.0], Box([0], [1]))


coords = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(st.lists(coords, min_size=3, max_size=3), st.lists(st.floats(0, 1), min_size=3, max_size=3))
def test_clamp_idempotent_and_optimal(p, u):
    box = Box([-1, 0, 2], [1, 3, 2.5])
    p = np.array(p)
    c = clamp_to_box(p, box)
    assert np.array_equal(clamp_to_box(c, box), c)
    assert box.contains(c)
    q = box.lo + np.array(u) * (box.hi - box.lo)
    assert np.linalg.norm(c - p) <= np.linalg.norm(q - p) + 1e-12


def test_box_invariants():
    with pytest.raises(InvalidGrid):
        Box([1.0], [1.0])
    with pytest.raises(DimensionError):
        Box([0.0, 0.0], [1.0])


def test_grid_examples():
    g = build_grid(Box([0], [1]), [4])
    assert g.h.tolist() == [0.25]
    assert g.axis_centers(0).tolist() == [0.125, 0.375, 0.625, 0.875]
    g2 = build_grid(Box([-2, -2], [2, 2]), (8, 8))
    assert g2.n_cells == 64 and g2.h.tolist() == [0.5, 0.5]
    g1 = build_grid(Box([0], [1]), [1])
    lo, hi = g1.cell_bounds((0,))
    assert lo.tolist() == [0.0] and hi.tolist() == [1.0]


@pytest.mark.parametrize("bad", [[0], [-2], [1.5]])
def test_grid_rejects_bad_counts(bad):
    with pytest.raises(InvalidGrid):
        build_grid(Box([0], [1]), bad)


def test_grid_tiles_box():
    g = build_grid(Box([-1, 0.5], [2, 1.5]), (7, 5))
    vol = 0.0
    for idx in np.ndindex(*g.shape):
        lo, hi = g.cell_bounds(idx)
        vol += np.prod(hi - lo)
        assert np.all(lo >= g.box.lo - 1e-12) and np.all(hi <= g.box.hi + 1e-12)
    assert vol == pytest.approx(np.prod(g.box.hi - g.box.lo))
    # neighbouring cells share faces exactly
    assert g.cell_bounds((0, 0))[1][0] == g.cell_bounds((1, 0))[0][0]
    c = g.centers()
    assert len(c) == g.n_cells
    assert np.all((c > g.box.lo) & (c < g.box.hi))


def test_region_boundary_and_intervals():
    g = build_grid(Box([0], [1]), [10])
    r = Region(g, {(2,), (3,), (4,), (7,)})
    assert [(round(a, 12), round(b, 12)) for a, b in r.intervals()] == [(0.2, 0.5), (0.7, 0.8)]
    assert len(r.boundary_faces()) == 4


def test_region_dilate_pads_beyond_grid():
    g = build_grid(Box([0], [1]), [10])
    r = Region(g, {(0,)}).dilate(1)
    assert r.cells == {(-1,), (0,), (1,)}
    assert Region(g, {(0,)}).dilate(1, within_grid=True).cells == {(0,), (1,)}


def test_region_from_interval():
    g = build_grid(Box([-2], [2]), [1025])
    r = Region.from_interval(g, -1.5, -0.5)
    a, b = r.intervals()[0]
    assert -1.5 - g.h[0] / 2 <= a <= -1.5 + g.h[0] / 2
    assert -0.5 - g.h[0] / 2 <= b <= -0.5 + g.h[0] / 2


def test_region_contains_point():
    g = build_grid(Box([0, 0], [1, 1]), (4, 4))
    r = Region(g, {(0, 0), (1, 1)})
    assert r.contains_point([0.1, 0.1])
    assert r.contains_point([0.25, 0.25])
    assert not r.contains_point([0.6, 0.1])
