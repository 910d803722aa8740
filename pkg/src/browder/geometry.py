"""Parameter spaces, boxes, uniform grids and cell regions."""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, InvalidGrid, InvalidParamSpace

# phase increment of 1/x between consecutive tail samples of the sine curve
SINE_TAIL_PHASE_STEP = math.pi / 32


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ParamSpace:
    """Finite sample of a compact connected space X with an adjacency graph.

    ``points`` is a (K, m) array. ``edges`` holds each undirected edge once
    as ``(i, j)`` with ``i < j``; :meth:`neighbors` gives the symmetric view.
    ``source`` remembers how the space was built so problem files can be
    re-exported verbatim.
    """

    points: np.ndarray
    edges: tuple
    labels: tuple | None = None
    source: dict | None = None
    _nbrs: tuple = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or len(pts) == 0 or pts.shape[1] == 0:
            raise InvalidParamSpace("points must be a non-empty (K, m) array")
        if not np.all(np.isfinite(pts)):
            raise InvalidParamSpace("points must be finite")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise InvalidParamSpace("points must be pairwise distinct")
        k = len(pts)
        seen = set()
        for e in self.edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise InvalidParamSpace(f"self-loop at node {i}")
            if not (0 <= i < k and 0 <= j < k):
                raise InvalidParamSpace(f"edge ({i}, {j}) out of range")
            seen.add((min(i, j), max(i, j)))
        edges = tuple(sorted(seen))
        nbrs = [[] for _ in range(k)]
        for i, j in edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        nbrs = tuple(tuple(sorted(n)) for n in nbrs)
        if self.labels is not None and len(self.labels) != k:
            raise InvalidParamSpace("labels must match the number of points")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_nbrs", nbrs)
        if len(bfs_order(nbrs, 0)) != k:
            raise InvalidParamSpace("adjacency graph is not connected")

    @property
    def size(self):
        return len(self.points)

    @property
    def dim(self):
        return self.points.shape[1]

    def neighbors(self, i):
        return self._nbrs[i]

    def edge_array(self):
        return np.array(self.edges, dtype=np.int64).reshape(-1, 2)


def bfs_order(nbrs, start):
    """Nodes reachable from ``start`` in breadth-first order."""
    seen = {start}
    order = []
    queue = deque([start])
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in nbrs[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return order


def make_interval_space(m_nodes):
    """Uniform chain sample of [0, 1] with ``m_nodes`` points."""
    m_nodes = int(m_nodes)
    if m_nodes < 2:
        raise InvalidParamSpace("interval space needs at least 2 nodes")
    pts = np.linspace(0.0, 1.0, m_nodes)[:, None]
    edges = [(i, i + 1) for i in range(m_nodes - 1)]
    return ParamSpace(pts, tuple(edges), source={"kind": "interval", "nodes": m_nodes})


def make_sine_curve_space(n_tail, n_bar):
    """Sample of the topologist's sine curve inside [0,1] x [-1,1].

    Points ``0..n_tail-1`` lie on y = sin(1/x) with 1/x advancing by a fixed
    phase step from x = 1, points ``n_tail..`` lie on the bar {0} x [-1, 1]
    from bottom to top. Both pieces are chains; one extra edge joins the last
    tail sample to its nearest bar sample.
    """
    n_tail, n_bar = int(n_tail), int(n_bar)
    if n_tail < 2 or n_bar < 2:
        raise InvalidParamSpace("sine curve needs n_tail >= 2 and n_bar >= 2")
    inv = 1.0 + SINE_TAIL_PHASE_STEP * np.arange(n_tail)
    tx = 1.0 / inv
    tail = np.column_stack([tx, np.sin(1.0 / tx)])
    bar = np.column_stack([np.zeros(n_bar), np.linspace(-1.0, 1.0, n_bar)])
    pts = np.vstack([tail, bar])
    edges = [(i, i + 1) for i in range(n_tail - 1)]
    edges += [(n_tail + j, n_tail + j + 1) for j in range(n_bar - 1)]
    nearest = int(np.argmin(np.linalg.norm(bar - tail[-1], axis=1)))
    edges.append((n_tail - 1, n_tail + nearest))
    labels = tuple([f"tail{k}" for k in range(n_tail)] + [f"bar{j}" for j in range(n_bar)])
    return ParamSpace(pts, tuple(edges), labels=labels,
                      source={"kind": "sine-v", "tail": n_tail, "bar": n_bar})


def make_graph_space(points, edges, labels=None):
    pts = np.array(points, dtype=float)
    src = {"kind": "graph", "points": pts.tolist(), "edges": [list(map(int, e)) for e in edges]}
    return ParamSpace(pts, tuple(tuple(e) for e in edges), labels=labels, source=src)


@dataclass(frozen=True, eq=False)
class Box:
    """Axis-aligned box ``[lo, hi]`` in R^n."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.array(self.lo, dtype=float))
        hi = np.atleast_1d(np.array(self.hi, dtype=float))
        if lo.ndim != 1 or lo.shape != hi.shape or lo.size < 1:
            raise DimensionError("box bounds must be 1-D vectors of equal length")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidGrid("box bounds must be finite")
        if not np.all(lo < hi):
            raise InvalidGrid("box needs lo < hi in every coordinate")
        object.__setattr__(self, "lo", _frozen(lo))
        object.__setattr__(self, "hi", _frozen(hi))

    @property
    def dim(self):
        return self.lo.size

    @property
    def diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def contains(self, p, atol=0.0):
        p = np.asarray(p, dtype=float)
        return bool(np.all(p >= self.lo - atol) and np.all(p <= self.hi + atol))

    def __eq__(self, other):
        return (isinstance(other, Box) and np.array_equal(self.lo, other.lo)
                and np.array_equal(self.hi, other.hi))

    def __hash__(self):
        return hash((self.lo.tobytes(), self.hi.tobytes()))


def clamp_to_box(p, box):
    """Euclidean projection of ``p`` onto ``box`` (componentwise clamp).

    Works on a single vector or on any array whose last axis has length n.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim == 0 or p.shape[-1] != box.dim:
        raise DimensionError(f"expected a vector of length {box.dim}, got shape {p.shape}")
    return np.minimum(box.hi, np.maximum(box.lo, p))


@dataclass(frozen=True, eq=False)
class YGrid:
    """Uniform cell decomposition of a box.

    Cell ``(i_1, ..., i_n)`` spans ``[lo + i*h, lo + (i+1)*h]``. The formula is
    also used for indices just outside ``0..cells_per_dim-1``; such padding
    cells live in the enlarged body around Y where maps act through the clamp.
    """

    box: Box
    cells_per_dim: tuple

    def __post_init__(self):
        cpd = tuple(int(c) for c in np.atleast_1d(self.cells_per_dim))
        if len(cpd) != self.box.dim:
            raise DimensionError("cells_per_dim must have one entry per box dimension")
        object.__setattr__(self, "cells_per_dim", cpd)

    @property
    def dim(self):
        return self.box.dim

    @property
    def h(self):
        return (self.box.hi - self.box.lo) / np.array(self.cells_per_dim, dtype=float)

    @property
    def shape(self):
        return self.cells_per_dim

    @property
    def n_cells(self):
        return int(np.prod(self.cells_per_dim))

    def axis_centers(self, axis):
        c = self.cells_per_dim[axis]
        return self.box.lo[axis] + (np.arange(c) + 0.5) * self.h[axis]

    def centers(self):
        """(n_cells, n) array of cell centers in C order of the multi-index."""
        axes = [self.axis_centers(d) for d in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def cell_bounds(self, cell):
        i = np.asarray(cell, dtype=float)
        return self.box.lo + i * self.h, self.box.lo + (i + 1) * self.h

    def cell_center(self, cell):
        return self.box.lo + (np.asarray(cell, dtype=float) + 0.5) * self.h

    def in_grid(self, cell):
        return all(0 <= c < n for c, n in zip(cell, self.cells_per_dim))

    def flat(self, cell):
        return int(np.ravel_multi_index(tuple(cell), self.cells_per_dim))

    def unflat(self, idx):
        return tuple(int(v) for v in np.unravel_index(int(idx), self.cells_per_dim))

    def __eq__(self, other):
        return (isinstance(other, YGrid) and self.box == other.box
                and self.cells_per_dim == other.cells_per_dim)

    def __hash__(self):
        return hash((self.box, self.cells_per_dim))


def build_grid(box, cells_per_dim):
    cpd = np.atleast_1d(np.asarray(cells_per_dim))
    if cpd.size != box.dim:
        raise InvalidGrid(f"need {box.dim} cell counts, got {cpd.size}")
    if not np.all(cpd == np.round(cpd)) or np.any(cpd < 1):
        raise InvalidGrid("cell counts must be positive integers")
    return YGrid(box, tuple(int(c) for c in cpd))


@dataclass(frozen=True, eq=False)
class Region:
    """Finite union of closed cells of one grid."""

    grid: YGrid
    cells: frozenset

    def __post_init__(self):
        cells = frozenset(tuple(int(v) for v in c) for c in self.cells)
        for c in cells:
            if len(c) != self.grid.dim:
                raise DimensionError("cell index length does not match grid dimension")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_box(cls, box):
        """The whole box as a single-cell region."""
        grid = YGrid(box, (1,) * box.dim)
        return cls(grid, frozenset({(0,) * box.dim}))

    @classmethod
    def from_interval(cls, grid, a, b):
        """Cells of a 1-D grid whose centers lie in ``[a, b]``."""
        if grid.dim != 1:
            raise DimensionError("from_interval needs a 1-D grid")
        lo, h = grid.box.lo[0], grid.h[0]
        first = math.ceil((a - lo) / h - 0.5)
        last = math.floor((b - lo) / h - 0.5)
        return cls(grid, frozenset((i,) for i in range(first, last + 1)))

    @property
    def dim(self):
        return self.grid.dim

    def is_empty(self):
        return not self.cells

    def __len__(self):
        return len(self.cells)

    def __or__(self, other):
        self._check_same(other)
        return Region(self.grid, self.cells | other.cells)

    def __sub__(self, other):
        self._check_same(other)
        return Region(self.grid, self.cells - other.cells)

    def __and__(self, other):
        self._check_same(other)
        return Region(self.grid, self.cells & other.cells)

    def __eq__(self, other):
        return isinstance(other, Region) and self.grid == other.grid and self.cells == other.cells

    def __hash__(self):
        return hash((self.grid, self.cells))

    def _check_same(self, other):
        if self.grid != other.grid:
            raise InvalidGrid("regions live on different grids")

    def intervals(self):
        """For 1-D regions: maximal runs of consecutive cells as (a, b) pairs."""
        if self.dim != 1:
            raise DimensionError("intervals() is only defined for 1-D regions")
        idx = sorted(c[0] for c in self.cells)
        out = []
        lo, h = self.grid.box.lo[0], self.grid.h[0]
        start = prev = None
        for i in idx:
            if start is None:
                start = prev = i
            elif i == prev + 1:
                prev = i
            else:
                out.append((lo + start * h, lo + (prev + 1) * h))
                start = prev = i
        if start is not None:
            out.append((lo + start * h, lo + (prev + 1) * h))
        return out

    def boundary_faces(self):
        """Faces not shared by two member cells, as ``(cell, axis, side)``.

        ``side`` is -1 for the lower face along ``axis`` and +1 for the upper.
        Sorted, so iteration order is deterministic.
        """
        faces = []
        for c in sorted(self.cells):
            for ax in range(self.dim):
                for side in (-1, 1):
                    nb = list(c)
                    nb[ax] += side
                    if tuple(nb) not in self.cells:
                        faces.append((c, ax, side))
        return faces

    def dilate(self, layers=1, within_grid=False):
        """Add every cell within Chebyshev distance ``layers`` of the region."""
        offsets = list(itertools.product(range(-layers, layers + 1), repeat=self.dim))
        out = set()
        for c in self.cells:
            for off in offsets:
                nb = tuple(a + b for a, b in zip(c, off))
                if not within_grid or self.grid.in_grid(nb):
                    out.add(nb)
        return Region(self.grid, frozenset(out))

    def bounding_box(self):
        arr = np.array(sorted(self.cells), dtype=float)
        lo = self.grid.box.lo + arr.min(axis=0) * self.grid.h
        hi = self.grid.box.lo + (arr.max(axis=0) + 1) * self.grid.h
        return lo, hi

    def contains_point(self, p, atol=0.0):
        p = np.asarray(p, dtype=float)
        g = self.grid
        rel = (p - g.box.lo) / g.h
        # a point on a shared face may belong to either neighbour
        cand = [sorted({math.floor(r - atol / hh), math.floor(r + atol / hh),
                        math.ceil(r) - 1, math.floor(r)})
                for r, hh in zip(rel, g.h)]
        for cell in itertools.product(*cand):
            if cell in self.cells:
                lo, hi = g.cell_bounds(cell)
                if np.all(p >= lo - atol) and np.all(p <= hi + atol):
                    return True
        return False
