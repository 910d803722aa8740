import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from browder.errors import BoundaryFixedPoint, RefinementExhausted, SingularJacobian
from browder.geometry import Box, Region, build_grid, clamp_to_box
from browder.index_core import (
    IndexOptions,
    check_boundary,
    index,
    index_1d,
    index_2d,
    index_regular_sum,
    residual,
)
from browder.mapdef import builtin_fixture

from oracles import certified_fixed_point_free, scurve_F, sign_index_1d

SQUARE = Region.from_box(Box([-0.5, -0.5], [0.5, 0.5]))


def test_residual_examples():
    assert residual(lambda y: 0.5 * y, np.array([1.0])).tolist() == [0.5]
    assert residual(lambda y: np.full_like(y, 0.3), np.array([0.3])).tolist() == [0.0]
    diag = builtin_fixture("diag")
    x = diag.param_space.points[40]
    assert residual(diag.slice_map(40), x).tolist() == [0.0]


def test_index_1d_examples():
    assert index_1d(lambda y: 0.5 * y, -1, 1).value == 1
    assert index_1d(lambda y: 2 * y, -0.5, 0.5).value == -1
    assert index_1d(lambda y: np.full_like(y, 0.3), 0, 1).value == 1
    shift = lambda y: clamp_to_box(y + 0.1, Box([0], [1]))
    assert index_1d(shift, 0, 0.5).value == 0


def test_index_1d_certificate():
    c = index_1d(lambda y: 0.5 * y, -1, 1)
    assert isinstance(c.value, int) and c.method == "sign-1d"
    assert c.boundary_margin == 0.5 and c.boundary_margin >= c.required_margin > 0


def test_index_1d_boundary_fixed_point():
    with pytest.raises(BoundaryFixedPoint):
        index_1d(lambda y: 0.5 * y, 0, 1)
    with pytest.raises(BoundaryFixedPoint):
        index_1d(lambda y: 0.5 * y, -1, 1, margin=0.6)


def test_index_2d_fixtures():
    assert index_2d(builtin_fixture("rotation").slice_map(0), SQUARE).value == 1
    assert index_2d(builtin_fixture("hyperbolic").slice_map(0), SQUARE).value == -1
    const = lambda y: np.array([0.1, 0.2])
    assert index_2d(const, Region.from_box(Box([-1, -1], [1, 1]))).value == 1


def test_index_2d_boundary_fixed_point():
    with pytest.raises(BoundaryFixedPoint):
        index_2d(lambda y: 0.5 * y, Region.from_box(Box([0, -1], [1, 1])))


def test_index_2d_refinement_exhausted():
    # |g| = 1 but its angle turns ~3.3 rad between the coarse samples
    k = 2 * np.pi + 0.3
    fast = lambda y: y - np.array([np.cos(k * y[0]), np.sin(k * y[0])])
    opts = IndexOptions(boundary_resolution=2)
    with pytest.raises(RefinementExhausted):
        index_2d(fast, Region.from_box(Box([-1, -1], [1, 1])), max_refine=0, margin=0.5, opts=opts)
    assert isinstance(index_2d(fast, Region.from_box(Box([-1, -1], [1, 1])), margin=0.5, opts=opts).value, int)


def test_index_2d_multi_cell_region_and_degree_two():
    # f(z) = z - z^2 in complex form: g(z) = z^2 has a double zero, degree 2
    def f(y):
        z = complex(y[0], y[1])
        w = z - z * z
        return np.array([w.real, w.imag])

    g = build_grid(Box([-1, -1], [1, 1]), (4, 4))
    whole = Region(g, {(i, j) for i in range(4) for j in range(4)})
    assert index_2d(f, whole).value == 2


def test_regular_sum_examples():
    r3 = Region.from_box(Box([-1] * 3, [1] * 3))
    c = index_regular_sum(lambda y: 0.5 * y, r3, seed_density=2)
    assert c.value == 1 and len(c.roots) == 1
    scurve = builtin_fixture("scurve").slice_map(128)
    c = index_regular_sum(scurve, Region.from_box(Box([-2], [2])), seed_density=8)
    assert c.value == 1 and len(c.roots) == 3
    assert [round(r[0], 6) for r in c.roots] == [-1.0, 0.0, 1.0]
    none = index_regular_sum(lambda y: y + 3.0, r3, seed_density=2)
    assert none.value == 0 and none.roots == ()


def test_regular_sum_matches_scan_signs_at_scurve_half():
    expected = sign_index_1d(lambda y: y - scurve_F(0.5, y), -2, 2)
    assert expected == 1


def test_regular_sum_singular():
    # g(y) = y^3 has a degenerate root at 0
    with pytest.raises(SingularJacobian):
        index_regular_sum(lambda y: y - y**3, Region.from_box(Box([-1], [1])), seed_density=3)


def test_dispatch_and_additivity_example():
    f = builtin_fixture("scurve").slice_map(128)
    parts = [Box([-1.5], [-0.5]), Box([-0.4], [0.4]), Box([0.6], [1.4])]
    vals = [index(f, Region.from_box(b)).value for b in parts]
    assert vals == [1, -1, 1]
    assert sum(vals) == index(f, Region.from_box(Box([-1.5], [1.4]))).value == 1


def test_dispatch_empty_region():
    g = build_grid(Box([0, 0], [1, 1]), (2, 2))
    assert index(lambda y: y, Region(g, set())).value == 0


def test_dispatch_uses_dimension():
    assert index(lambda y: 0.5 * y, Region.from_box(Box([-1], [1]))).method == "sign-1d"
    assert index(lambda y: 0.5 * y, Region.from_box(Box([-1, -1], [1, 1]))).method == "winding-2d"
    assert index(lambda y: 0.5 * y, Region.from_box(Box([-1] * 3, [1] * 3)),
                 IndexOptions(seed_density=2)).method == "regular-sum"


def test_dispatch_boundary_error_on_fixture():
    f = builtin_fixture("scurve").slice_map(128)
    with pytest.raises(BoundaryFixedPoint):
        index(f, Region.from_box(Box([-1.0], [0.5])))


def test_check_boundary_reports_margin():
    low, req = check_boundary(lambda y: 0.5 * y, SQUARE)
    assert low == pytest.approx(0.25) and 0 < req < low


# --- properties ----------------------------------------------------------

def _random_box(rng, n):
    lo = rng.uniform(-2, 0, n)
    return Box(lo, lo + rng.uniform(0.5, 2, n))


def test_normalization_random_constants():
    rng = np.random.default_rng(1)
    for trial in range(100):
        n = 1 + trial % 3
        box = _random_box(rng, n)
        c = box.lo + rng.uniform(0.05, 0.95, n) * (box.hi - box.lo)
        opts = IndexOptions(seed_density=1 if n == 3 else 2)
        assert index(lambda y, c=c: c.copy(), Region.from_box(box), opts).value == 1


def _affine(rng, n, contract=False):
    A = rng.normal(size=(n, n))
    if contract:
        A *= rng.uniform(0.1, 0.9) / np.linalg.norm(A, 2)
    b = rng.normal(size=n)
    return A, b


def test_additivity_random_pairs():
    rng = np.random.default_rng(2)
    done = 0
    while done < 50:
        n = 1 + done % 2
        A, b = _affine(rng, n)
        f = lambda y, A=A, b=b: A @ y + b
        lo = rng.uniform(-2, -1, n)
        h = rng.uniform(0.5, 1.5, n)
        cells = (2,) + (1,) * (n - 1)
        g = build_grid(Box(lo, lo + h * np.array(cells)), cells)
        z1 = Region(g, {(0,) + (0,) * (n - 1)})
        z2 = Region(g, {(1,) + (0,) * (n - 1)})
        try:
            v1, v2, v12 = (index(f, z).value for z in (z1, z2, z1 | z2))
        except BoundaryFixedPoint:
            continue
        assert v12 == v1 + v2
        done += 1


def test_zero_rule_on_fixed_point_free_regions():
    rng = np.random.default_rng(3)
    done = 0
    while done < 50:
        n = 1 + done % 2
        A, b = _affine(rng, n)
        box = _random_box(rng, n)
        gfun = lambda Y, A=A, b=b: Y - (Y @ A.T + b)
        lip = np.linalg.norm(np.eye(n) - A, 2)
        if not certified_fixed_point_free(gfun, box.lo, box.hi, lip, n=400 if n == 1 else 120):
            continue
        f = lambda y, A=A, b=b: A @ y + b
        assert index(f, Region.from_box(box)).value == 0
        done += 1


def test_homotopy_invariance_random_contractions():
    rng = np.random.default_rng(4)
    box = Box([-3, -3], [3, 3])
    for _ in range(5):
        A0, b0 = _affine(rng, 2, contract=True)
        A1, b1 = _affine(rng, 2, contract=True)
        vals = []
        for t in np.linspace(0, 1, 11):
            f = lambda y, t=t: (1 - t) * (A0 @ y + b0) + t * (A1 @ y + b1)
            vals.append(index(f, Region.from_box(box)).value)
        assert len(set(vals)) == 1


def test_1d_engines_agree_on_random_cubics():
    rng = np.random.default_rng(5)
    done = 0
    while done < 50:
        roots = np.sort(rng.uniform(-1.5, 1.5, rng.integers(1, 4)))
        if len(roots) > 1 and np.min(np.diff(roots)) < 0.1:
            continue
        scale = rng.choice([-1.0, 1.0]) * rng.uniform(0.3, 2.0)
        g = lambda y, r=roots, s=scale: s * np.prod([y - ri for ri in r], axis=0)
        f = lambda y, g=g: y - g(y)
        a, b = -2.0, 2.0
        try:
            v1 = index_1d(f, a, b).value
        except BoundaryFixedPoint:
            continue
        v2 = index_regular_sum(f, Region.from_box(Box([a], [b])), seed_density=16).value
        assert v1 == v2
        done += 1


@settings(max_examples=60, deadline=None)
@given(st.floats(-5, 5).filter(lambda a: abs(1 - a) > 0.05))
def test_linear_1d_index_is_sign_of_one_minus_slope(a):
    assert index_1d(lambda y: a * y, -1, 1).value == int(np.sign(1 - a))
