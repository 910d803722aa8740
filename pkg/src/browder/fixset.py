"""Discrete approximation of the fixed-point set C_F on X x Y and its components.

The approximation lives on the product graph whose vertices are pairs
``(node, cell)`` of a parameter node and a flat y-cell index. Two vertices are
adjacent when they share the node and their cells share a face, or when their
nodes are adjacent in X and their cells coincide or share a face.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import dijkstra

from .errors import BoundaryFixedPoint, CannotIsolate, EmptyFixedSet
from .geometry import Region
from .index_core import IndexOptions, check_boundary
from .mapdef import eval_map

TOL_FACTOR = 1.5


def worker_count(threads=None):
    """Worker cap: explicit argument, else BROWDER_THREADS, else 1."""
    if threads is None:
        threads = os.environ.get("BROWDER_THREADS", "1")
    try:
        return max(1, int(threads))
    except ValueError:
        return 1


class UnionFind:
    """Disjoint sets over 0..n-1 with path halving and union by size."""

    def __init__(self, n):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, a):
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


@dataclass(frozen=True, eq=False)
class ApproxFixedSet:
    """Retained (node, cell) pairs whose center residual is within tolerance.

    ``cells`` is an (N, 2) array of ``(node, flat_cell)`` rows sorted
    lexicographically; ``edges`` indexes into it. ``threshold`` is the per-pair
    tolerance actually applied, ``tol`` its maximum.
    """

    problem: object
    grid: object
    tol: float
    tol_mode: str
    residuals: np.ndarray
    threshold: np.ndarray
    mask: np.ndarray
    cells: np.ndarray
    edges: np.ndarray

    @property
    def n_nodes(self):
        return self.mask.shape[0]

    def slice_cells(self, node):
        """Flat indices of retained cells at ``node``."""
        return np.flatnonzero(self.mask[node])

    def empty_nodes(self):
        return [int(k) for k in np.flatnonzero(~self.mask.any(axis=1))]


@dataclass(frozen=True, eq=False)
class Component:
    id: int
    cells: np.ndarray  # (N, 2) rows (node, flat_cell), sorted
    param_coverage: frozenset
    isolation_margin: float

    @property
    def size(self):
        return len(self.cells)

    def slice_cells(self, node):
        rows = self.cells[self.cells[:, 0] == node]
        return rows[:, 1]

    def coverage_fraction(self, n_nodes):
        return len(self.param_coverage) / n_nodes


# --- residuals and tolerance ---------------------------------------------

def _residual_field(problem, grid, threads=None):
    """(K, C, n) array of g = y - F(x, y) at every (node, cell center)."""
    centers = grid.centers()
    X = problem.param_space.points
    expr, box = problem.map, problem.box

    def chunk(rows):
        F = eval_map(expr, X[rows][:, None, :], centers[None, :, :], box)
        return centers[None, :, :] - F

    k = len(X)
    workers = worker_count(threads)
    if workers == 1 or k < 2:
        return chunk(slice(0, k))
    bounds = np.linspace(0, k, min(workers, k) + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda ab: chunk(slice(ab[0], ab[1])), zip(bounds[:-1], bounds[1:])))
    return np.concatenate(parts, axis=0)


def _axis_pair(ndim, axis, lower):
    sl = [slice(None)] * ndim
    sl[axis] = slice(None, -1) if lower else slice(1, None)
    return tuple(sl)


def local_modulus(G, grid, param_edges):
    """Largest |g(c) - g(c')| over the product-graph neighbours c' of each c.

    Within a slice the neighbours are face-adjacent cells; across an edge of X
    they are the same cell at the adjacent node.
    """
    K = G.shape[0]
    n = G.shape[-1]
    Gs = G.reshape((K,) + grid.shape + (n,))
    mod = np.zeros((K,) + grid.shape)
    nd = 1 + grid.dim
    for d in range(grid.dim):
        lo = _axis_pair(nd, 1 + d, True)
        hi = _axis_pair(nd, 1 + d, False)
        diff = np.linalg.norm(Gs[hi] - Gs[lo], axis=-1)
        mod[lo] = np.maximum(mod[lo], diff)
        mod[hi] = np.maximum(mod[hi], diff)
    if len(param_edges):
        a, b = param_edges[:, 0], param_edges[:, 1]
        diff = np.linalg.norm(Gs[a] - Gs[b], axis=-1)
        np.maximum.at(mod, a, diff)
        np.maximum.at(mod, b, diff)
    return mod.reshape(K, -1)


# --- adjacency -----------------------------------------------------------

def _neighbor_offsets(dim):
    """Cell offsets coupled across an X edge: zero and the 2*dim face shifts."""
    offs = [(0,) * dim]
    for d in range(dim):
        for s in (-1, 1):
            o = [0] * dim
            o[d] = s
            offs.append(tuple(o))
    return offs


def _shift_pairs(A, B, offset):
    """Slices selecting aligned entries a in A and b in B with b = a + offset.

    A and B have shape (E, *grid_shape); the leading axis is not shifted.
    """
    sa, sb = [slice(None)], [slice(None)]
    for o in offset:
        if o == 0:
            sa.append(slice(None))
            sb.append(slice(None))
        elif o > 0:
            sa.append(slice(None, -o))
            sb.append(slice(o, None))
        else:
            sa.append(slice(-o, None))
            sb.append(slice(None, o))
    return A[tuple(sa)], B[tuple(sb)]


def product_edges(ids, grid, param_edges):
    """All product-graph edges between vertices with ``ids >= 0``.

    ``ids`` has shape (K, *grid_shape); returns an (E, 2) array of id pairs.
    """
    out = []
    nd = ids.ndim
    for d in range(grid.dim):
        a = ids[_axis_pair(nd, 1 + d, True)]
        b = ids[_axis_pair(nd, 1 + d, False)]
        keep = (a >= 0) & (b >= 0)
        out.append(np.column_stack([a[keep], b[keep]]))
    if len(param_edges):
        A = ids[param_edges[:, 0]]
        B = ids[param_edges[:, 1]]
        for off in _neighbor_offsets(grid.dim):
            a, b = _shift_pairs(A, B, off)
            keep = (a >= 0) & (b >= 0)
            out.append(np.column_stack([a[keep], b[keep]]))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(out).astype(np.int64)


# --- operations ----------------------------------------------------------

def approximate_fixed_set(problem, grid, tol=None, threads=None):
    """Cells of X x Y whose center residual ``|y - F(x, y)|`` is within tolerance.

    With ``tol=None`` each pair uses its own threshold, 1.5 times the local
    residual modulus (see :func:`local_modulus`), so a cell containing a true
    zero is retained.
    """
    if tol is not None and not tol > 0:
        raise ValueError("tol must be positive")
    G = _residual_field(problem, grid, threads)
    R = np.linalg.norm(G, axis=-1)
    pedges = problem.param_space.edge_array()
    if tol is None:
        thr = TOL_FACTOR * local_modulus(G, grid, pedges)
        mode = "auto"
    else:
        thr = np.full(R.shape, float(tol))
        mode = "fixed"
    mask = R <= thr
    if not mask.any():
        raise EmptyFixedSet("no cell passes the residual tolerance; refine the grid or raise tol")
    K = mask.shape[0]
    node_idx, cell_idx = np.nonzero(mask)
    cells = np.column_stack([node_idx, cell_idx]).astype(np.int64)
    ids = np.full(mask.shape, -1, dtype=np.int64)
    ids[node_idx, cell_idx] = np.arange(len(cells))
    edges = product_edges(ids.reshape((K,) + grid.shape), grid, pedges)
    return ApproxFixedSet(problem, grid, float(np.max(thr[mask])), mode, R, thr, mask, cells, edges)


def connected_components(afs):
    """Union-find over the retained cells; ids follow the smallest (node, cell)."""
    n = len(afs.cells)
    uf = UnionFind(n)
    for a, b in afs.edges.tolist():
        uf.union(a, b)
    roots = np.array([uf.find(i) for i in range(n)])
    order = {}
    labels = np.empty(n, dtype=np.int64)
    for i, r in enumerate(roots):
        labels[i] = order.setdefault(r, len(order))
    margins = _isolation_margins(afs, labels, len(order))
    comps = []
    for cid in range(len(order)):
        rows = afs.cells[labels == cid]
        comps.append(Component(cid, rows, frozenset(int(k) for k in np.unique(rows[:, 0])),
                               margins[cid]))
    return comps


def _isolation_margins(afs, labels, n_comp):
    """Product-graph distance from each component to its nearest other one."""
    margins = np.full(n_comp, np.inf)
    if n_comp < 2:
        return margins.tolist()
    grid = afs.grid
    K, C = afs.mask.shape
    ids = np.arange(K * C, dtype=np.int64).reshape((K,) + grid.shape)
    E = product_edges(ids, grid, afs.problem.param_space.edge_array())
    graph = sparse.coo_matrix((np.ones(len(E)), (E[:, 0], E[:, 1])), shape=(K * C, K * C)).tocsr()
    src = afs.cells[:, 0] * C + afs.cells[:, 1]
    comp_of = np.full(K * C, -1, dtype=np.int64)
    comp_of[src] = labels
    dist, _, origin = dijkstra(graph, directed=False, indices=src, unweighted=True,
                               min_only=True, return_predecessors=True)
    u, v = E[:, 0], E[:, 1]
    ok = (origin[u] >= 0) & (origin[v] >= 0)
    u, v = u[ok], v[ok]
    cu, cv = comp_of[origin[u]], comp_of[origin[v]]
    cross = cu != cv
    d = dist[u[cross]] + dist[v[cross]] + 1
    np.minimum.at(margins, cu[cross], d)
    np.minimum.at(margins, cv[cross], d)
    return margins.tolist()


def slice_region(afs, flat_cells):
    grid = afs.grid
    return Region(grid, frozenset(grid.unflat(c) for c in flat_cells))


def isolating_region(component, afs, node, opts=None):
    """Z_D at one node: the component's slice cells dilated by one layer.

    Dilation may step one layer outside the grid; those cells belong to the
    enlarged body around Y on which the slice maps act through the clamp.
    """
    if component.isolation_margin < 2:
        raise CannotIsolate(
            f"component {component.id} is {component.isolation_margin:g} cell(s) from another")
    own = component.slice_cells(node)
    if own.size == 0:
        raise CannotIsolate(f"component {component.id} does not reach node {node}")
    region = slice_region(afs, own).dilate(1)
    others = np.setdiff1d(afs.slice_cells(node), own)
    if others.size and region.cells & {afs.grid.unflat(c) for c in others}:
        raise CannotIsolate(f"component {component.id} touches another component at node {node}")
    try:
        check_boundary(afs.problem.slice_map(node), region, opts)
    except BoundaryFixedPoint as exc:
        raise CannotIsolate(f"component {component.id}, node {node}: {exc}") from exc
    return region


def isolating_neighborhood(component, afs, opts=None):
    """``{node: Region}`` isolating the component at every node it covers."""
    return {node: isolating_region(component, afs, node, opts)
            for node in sorted(component.param_coverage)}
