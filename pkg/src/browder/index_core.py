"""Brouwer fixed-point index ind(Z, f) of a cell region Z.

Three engines share one contract: the residual g(y) = y - f(y) must stay at
least ``margin`` away from zero on the sampled boundary of Z, otherwise
:class:`BoundaryFixedPoint` is raised. Values are exact Python ints.

* ``sign-1d``: endpoint signs of g on each interval.
* ``winding-2d``: winding number of g along the oriented boundary.
* ``regular-sum``: Newton roots of g, summed as sign det(I - Df).

Maps are callables taking a single point of shape (n,). A callable with a
truthy ``vectorized`` attribute also accepts (N, n) batches, which the
boundary samplers use.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BoundaryFixedPoint, DimensionError, RefinementExhausted, SingularJacobian
from .geometry import Region

HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class IndexOptions:
    margin: float | None = None  # None: 2 * max residual jump between neighbouring boundary samples
    max_refine: int = 14
    seed_density: int = 4
    fd_step: float = 1e-6  # relative; actual step is fd_step * (1 + |y|)
    cluster_radius: float | None = None  # None: 1e-8 * diam(Y)
    singular_tol: float = 1e-10
    boundary_resolution: int = 256  # boundary sample spacing <= diam(region) / this
    margin_halvings: int = 4  # auto margin only: halve the sample step up to this many times


@dataclass(frozen=True)
class IndexCertificate:
    region: Region | None
    value: int
    boundary_margin: float  # min |g| seen on the boundary
    method: str
    samples_used: int
    required_margin: float = 0.0
    roots: tuple = ()


class _Counted:
    """Wrap a map so evaluations are counted and batches are dispatched."""

    def __init__(self, f):
        self.f = f
        self.vectorized = bool(getattr(f, "vectorized", False))
        self.calls = 0

    def g(self, y):
        y = np.asarray(y, dtype=float)
        self.calls += 1
        return y - np.asarray(self.f(y), dtype=float)

    def g_batch(self, ys):
        ys = np.asarray(ys, dtype=float)
        self.calls += len(ys)
        if self.vectorized:
            return ys - np.asarray(self.f(ys), dtype=float)
        return ys - np.array([self.f(y) for y in ys], dtype=float).reshape(ys.shape)


def residual(f, y):
    """g(y) = y - f(y); zero exactly at fixed points of f."""
    y = np.asarray(y, dtype=float)
    return y - np.asarray(f(y), dtype=float)


def _check_margin(min_norm, margin, where):
    if not (min_norm >= margin and min_norm > 0.0):
        raise BoundaryFixedPoint(
            f"boundary residual {min_norm:.3g} below margin {margin:.3g} on {where}",
            min_residual=min_norm, margin=margin)


# --- 1-D -----------------------------------------------------------------

def _interval_probe(cf, a, b, step):
    """|g| and sign at both endpoints plus the jump to a point ``step`` inside."""
    pts = np.array([[a], [a + step], [b - step], [b]])
    gs = cf.g_batch(pts)[:, 0]
    jump = max(abs(gs[0] - gs[1]), abs(gs[3] - gs[2]))
    return gs[0], gs[3], jump


def index_1d(f, a, b, margin=None, probe_step=None):
    """Index of a 1-D map on [a, b]: (sign g(b) - sign g(a)) / 2."""
    a, b = float(a), float(b)
    if not a < b:
        raise ValueError("index_1d needs a < b")
    cf = _Counted(f)
    step = probe_step if probe_step is not None else (b - a) / IndexOptions.boundary_resolution
    for _ in range(IndexOptions.margin_halvings + 1):
        ga, gb, jump = _interval_probe(cf, a, b, step)
        req = 2.0 * jump if margin is None else float(margin)
        low = min(abs(ga), abs(gb))
        if margin is not None or low >= req:
            break
        step /= 2
    _check_margin(low, req, f"[{a:g}, {b:g}]")
    value = (int(np.sign(gb)) - int(np.sign(ga))) // 2
    return IndexCertificate(None, value, float(low), "sign-1d", cf.calls, req)


def _index_1d_region(f, region, opts):
    step = _sample_step(region, opts)
    total, low, calls, req = 0, math.inf, 0, 0.0
    for a, b in region.intervals():
        cert = index_1d(f, a, b, margin=opts.margin, probe_step=step)
        total += cert.value
        low = min(low, cert.boundary_margin)
        calls += cert.samples_used
        req = max(req, cert.required_margin)
    return IndexCertificate(region, total, low, "sign-1d", calls, req)


# --- boundary sampling shared by 2-D and n-D -----------------------------

def _sample_step(region, opts):
    lo, hi = region.bounding_box()
    return min(float(np.min(region.grid.h)) / 4, float(np.linalg.norm(hi - lo)) / opts.boundary_resolution)


FACE_LATTICE_CAP = 33  # per-axis cap on faces of dimension >= 2
FACE_LATTICE_MAX = 257  # the cap may be raised up to this when the margin check fails


def _face_lattice(region, cell, axis, side, step, cap=FACE_LATTICE_CAP):
    """Sample lattice on one boundary face; returns (pts, shape of lattice)."""
    lo, hi = region.grid.cell_bounds(cell)
    cap = cap if region.dim >= 3 else None
    axes = []
    for d in range(region.dim):
        if d == axis:
            axes.append(np.array([hi[d] if side > 0 else lo[d]]))
        else:
            k = max(2, math.ceil((hi[d] - lo[d]) / step) + 1)
            if cap is not None:
                k = min(k, cap)
            t = np.linspace(0.0, 1.0, k)
            axes.append((1.0 - t) * lo[d] + t * hi[d])
    mesh = np.meshgrid(*axes, indexing="ij")
    shape = mesh[0].shape
    return np.stack([m.ravel() for m in mesh], axis=-1), shape


def boundary_scan(f, region, opts=None):
    """Sample |g| over the boundary faces of ``region``.

    Returns ``(min_norm, auto_margin, calls)`` where ``auto_margin`` is twice
    the largest residual jump between neighbouring samples. While the auto
    margin is not cleared the sample step is halved (and in dimension >= 3
    the per-axis lattice cap doubled), at most ``opts.margin_halvings`` times.
    """
    opts = opts or IndexOptions()
    cap = FACE_LATTICE_CAP
    step = _sample_step(region, opts)
    calls = 0
    for _ in range(opts.margin_halvings + 1):
        low, auto, c = _scan(f, region, step, cap)
        calls += c
        if opts.margin is not None or low >= auto:
            break
        if region.dim >= 3:
            if cap >= FACE_LATTICE_MAX:
                break
            cap = 2 * cap - 1
        step /= 2
    return low, auto, calls


def _scan(f, region, step, cap):
    cf = _Counted(f)
    low, jump = math.inf, 0.0
    for cell, axis, side in region.boundary_faces():
        pts, shape = _face_lattice(region, cell, axis, side, step, cap)
        gs = cf.g_batch(pts).reshape(shape + (region.dim,))
        low = min(low, float(np.min(np.linalg.norm(gs, axis=-1))))
        for d in range(region.dim):
            if shape[d] > 1:
                diff = np.linalg.norm(np.diff(gs, axis=d), axis=-1)
                jump = max(jump, float(np.max(diff)))
    return low, 2.0 * jump, cf.calls


def check_boundary(f, region, opts=None):
    """Raise :class:`BoundaryFixedPoint` unless |g| clears the margin on the boundary.

    Returns ``(min_norm, required_margin)``.
    """
    opts = opts or IndexOptions()
    if region.is_empty():
        return math.inf, 0.0
    if region.dim == 1:
        low, req = math.inf, 0.0
        step = _sample_step(region, opts)
        for a, b in region.intervals():
            cert = index_1d(f, a, b, margin=opts.margin, probe_step=step)
            low = min(low, cert.boundary_margin)
            req = max(req, cert.required_margin)
    else:
        low, auto, _ = boundary_scan(f, region, opts)
        req = auto if opts.margin is None else opts.margin
    _check_margin(low, req, "region boundary")
    return low, req


# --- 2-D -----------------------------------------------------------------

def _oriented_edge(region, cell, axis, side):
    lo, hi = region.grid.cell_bounds(cell)
    (x0, y0), (x1, y1) = lo, hi
    if axis == 0:
        return ((x1, y0), (x1, y1)) if side > 0 else ((x0, y1), (x0, y0))
    return ((x1, y1), (x0, y1)) if side > 0 else ((x0, y0), (x1, y0))


def _angle_steps(g):
    a, b = g[:-1], g[1:]
    cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
    dot = np.einsum("ij,ij->i", a, b)
    return np.arctan2(cross, dot)


def index_2d(f, region, margin=None, max_refine=14, opts=None):
    """Winding number of g along the counter-clockwise boundary of ``region``.

    Each boundary edge starts from a uniform sample; any step whose angle
    increment reaches pi/2 is bisected, at most ``max_refine`` times.
    """
    if region.dim != 2:
        raise DimensionError("index_2d needs a 2-D region")
    opts = opts or IndexOptions()
    if region.is_empty():
        return IndexCertificate(region, 0, math.inf, "winding-2d", 0)
    cf = _Counted(f)
    step = _sample_step(region, opts)
    for _ in range(opts.margin_halvings + 1):
        edges, low, jump = _edge_samples(cf, region, step)
        req = 2.0 * jump if margin is None else float(margin)
        if margin is not None or low >= req:
            break
        step /= 2
    _check_margin(low, req, "2-D region boundary")

    total = 0.0
    for p0, p1, t, gs in edges:
        dth = _angle_steps(gs)
        ok = np.abs(dth) < HALF_PI
        total += float(np.sum(dth[ok]))
        for j in np.flatnonzero(~ok):
            sub, sub_low = _refine(cf, p0, p1, t[j], t[j + 1], gs[j], gs[j + 1], max_refine)
            total += sub
            low = min(low, sub_low)
    _check_margin(low, req, "2-D region boundary (refined)")
    turns = total / (2.0 * math.pi)
    value = int(round(turns))
    return IndexCertificate(region, value, low, "winding-2d", cf.calls, req)


def _edge_samples(cf, region, step):
    edges = []
    jump, low = 0.0, math.inf
    for cell, axis, side in region.boundary_faces():
        p0, p1 = (np.array(p) for p in _oriented_edge(region, cell, axis, side))
        k = max(2, math.ceil(np.linalg.norm(p1 - p0) / step) + 1)
        t = np.linspace(0.0, 1.0, k)
        gs = cf.g_batch(np.outer(1.0 - t, p0) + np.outer(t, p1))
        jump = max(jump, float(np.max(np.linalg.norm(np.diff(gs, axis=0), axis=1))))
        low = min(low, float(np.min(np.linalg.norm(gs, axis=1))))
        edges.append((p0, p1, t, gs))
    return edges, low, jump


def _refine(cf, p0, p1, ta, tb, ga, gb, depth):
    """Angle swept by g between parameters ta and tb on the edge p0 -> p1."""
    stack = [(ta, tb, ga, gb, 0)]
    total, low = 0.0, math.inf
    while stack:
        ta, tb, ga, gb, d = stack.pop()
        dth = float(_angle_steps(np.array([ga, gb]))[0])
        if abs(dth) < HALF_PI:
            total += dth
            continue
        if d >= depth:
            raise RefinementExhausted(
                f"angle step {dth:.3f} rad still >= pi/2 after {depth} bisections")
        tm = 0.5 * (ta + tb)
        gm = cf.g((1.0 - tm) * p0 + tm * p1)
        low = min(low, float(np.linalg.norm(gm)))
        stack.append((tm, tb, gm, gb, d + 1))
        stack.append((ta, tm, ga, gm, d + 1))
    return total, low


# --- general n -----------------------------------------------------------

def _jacobian(cf, y, rel_step):
    n = y.size
    h = rel_step * (1.0 + np.linalg.norm(y))
    J = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        J[:, j] = (cf.g(y + e) - cf.g(y - e)) / (2.0 * h)
    return J


def _newton(cf, y, opts, scale, max_iter=60):
    gy = cf.g(y)
    ny = np.linalg.norm(gy)
    tol = 1e-13 * scale
    for _ in range(max_iter):
        if ny <= tol:
            return y
        J = _jacobian(cf, y, opts.fd_step)
        try:
            s = np.linalg.solve(J, -gy)
        except np.linalg.LinAlgError:
            s = np.linalg.lstsq(J, -gy, rcond=None)[0]
        if not np.all(np.isfinite(s)):
            return None
        alpha = 1.0
        for _ in range(40):
            y_new = y + alpha * s
            g_new = cf.g(y_new)
            n_new = np.linalg.norm(g_new)
            if n_new < ny:
                break
            alpha *= 0.5
        else:
            return y if ny <= 1e-9 * scale else None
        if np.linalg.norm(y_new - y) <= 1e-15 * (1.0 + np.linalg.norm(y)):
            y, gy, ny = y_new, g_new, n_new
            break
        y, gy, ny = y_new, g_new, n_new
    return y if ny <= 1e-9 * scale else None


def index_regular_sum(f, region, seed_density=None, margin=None, opts=None):
    """Sum of sign det(I - Df) over the Newton roots of g found in ``region``."""
    opts = opts or IndexOptions()
    if seed_density is not None:
        opts = IndexOptions(**{**opts.__dict__, "seed_density": int(seed_density)})
    if margin is not None:
        opts = IndexOptions(**{**opts.__dict__, "margin": float(margin)})
    if region.is_empty():
        return IndexCertificate(region, 0, math.inf, "regular-sum", 0)
    low, auto, calls = boundary_scan(f, region, opts)
    req = auto if opts.margin is None else opts.margin
    _check_margin(low, req, "region boundary")

    cf = _Counted(f)
    grid = region.grid
    diam = grid.box.diameter
    radius = opts.cluster_radius if opts.cluster_radius is not None else 1e-8 * diam
    sd = opts.seed_density
    offs = (np.arange(sd) + 0.5) / sd
    lattice = np.array(list(itertools.product(offs, repeat=region.dim)))
    scale = 1.0 + diam
    roots = []
    for cell in sorted(region.cells):
        lo, hi = grid.cell_bounds(cell)
        for u in lattice:
            r = _newton(cf, lo + u * (hi - lo), opts, scale)
            if r is None or not region.contains_point(r, atol=1e-12 * scale):
                continue
            if all(np.linalg.norm(r - q) >= radius for q in roots):
                roots.append(r)
    value = 0
    for r in roots:
        det = float(np.linalg.det(_jacobian(cf, r, opts.fd_step)))
        if abs(det) < opts.singular_tol:
            raise SingularJacobian(f"|det(I - Df)| = {abs(det):.3g} at fixed point {r}")
        value += 1 if det > 0 else -1
    roots_t = tuple(tuple(float(v) for v in r) for r in sorted(roots, key=tuple))
    return IndexCertificate(region, value, low, "regular-sum", calls + cf.calls, req, roots_t)


def index(f, region, opts=None):
    """Dispatch on dimension: 1 -> sign-1d, 2 -> winding-2d, n >= 3 -> regular-sum."""
    opts = opts or IndexOptions()
    if region.is_empty():
        method = {1: "sign-1d", 2: "winding-2d"}.get(region.dim, "regular-sum")
        return IndexCertificate(region, 0, math.inf, method, 0)
    if region.dim == 1:
        return _index_1d_region(f, region, opts)
    if region.dim == 2:
        return index_2d(f, region, margin=opts.margin, max_refine=opts.max_refine, opts=opts)
    return index_regular_sum(f, region, opts=opts)
