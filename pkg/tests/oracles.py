"""Brute-force oracles, deliberately independent of the package's engines."""

import numpy as np

SCAN_POINTS = 10**6


def raw_residual_1d(text_fn, x, ys):
    """g(y) = y - F(x, y) for a plain numpy lambda F (no clamping)."""
    return ys - text_fn(x, ys)


def scan_roots(g, a, b, n=SCAN_POINTS):
    """Sign changes of g on an n-point grid over [a, b].

    Returns a list of (root_estimate, local_index) where local_index is +1
    when g crosses upward (g' > 0) and -1 when it crosses downward.
    """
    ys = np.linspace(a, b, n)
    gs = g(ys)
    s = np.sign(gs)
    out = []
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    for i in idx:
        y0, y1, g0, g1 = ys[i], ys[i + 1], gs[i], gs[i + 1]
        root = y0 - g0 * (y1 - y0) / (g1 - g0)
        out.append((float(root), 1 if g1 > g0 else -1))
    zeros = np.flatnonzero(gs == 0)
    for i in zeros:
        left = gs[i - 1] if i > 0 else gs[i + 1]
        right = gs[i + 1] if i + 1 < n else gs[i - 1]
        out.append((float(ys[i]), int(np.sign(right - left))))
    return sorted(out)


def sign_index_1d(g, a, b):
    """1-D degree from the brute-force root census."""
    return sum(s for _, s in scan_roots(g, a, b))


def min_abs_on_box(g, lo, hi, n=200):
    """Minimum |g| over a dense lattice filling the box (for fixed-point-free checks)."""
    axes = [np.linspace(l, h, n) for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    return float(np.min(np.linalg.norm(g(pts), axis=-1)))


def certified_fixed_point_free(g, lo, hi, lip, n=200):
    """True when the lattice minimum of |g| beats the Lipschitz bound between lattice points.

    ``lip`` bounds the Lipschitz constant of g; any zero lies within half a
    lattice diagonal of some lattice point, where |g| would be at most
    ``lip`` times that distance.
    """
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    half_diag = 0.5 * float(np.linalg.norm((hi - lo) / (n - 1)))
    return min_abs_on_box(g, lo, hi, n) > lip * half_diag


def min_abs_on_box_boundary(g, lo, hi, n=400):
    """Minimum |g| over a dense sample of the boundary of a 1-D or 2-D box."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    if lo.size == 1:
        return float(np.min(np.abs(g(np.array([[lo[0]], [hi[0]]])))))
    t = np.linspace(0.0, 1.0, n)
    sides = []
    for d in range(2):
        for v in (lo[d], hi[d]):
            pts = np.empty((n, 2))
            pts[:, d] = v
            o = 1 - d
            pts[:, o] = lo[o] + t * (hi[o] - lo[o])
            sides.append(pts)
    pts = np.vstack(sides)
    return float(np.min(np.linalg.norm(g(pts), axis=-1)))


# fixture maps written out independently of the expression parser
def scurve_F(x, y):
    return y + 0.25 * (2 * x - 1 - (y**3 - y))


def island_F(x, y):
    return y + 0.1 * (-(y + 1.5) * ((x - 0.5) ** 2 + (y - 0.5) ** 2 - 0.04))
