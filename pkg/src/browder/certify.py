"""Component indices ind_* / IND_* and the end-to-end certificate.

At a fixed resolution the components returned by
:func:`browder.fixset.connected_components` stand in for the clopen pieces of
C_F. The index of a component at a node is the classical index of the slice
map on the component's isolating region there; a component is essential when
that index is nonzero, and the certificate asks every essential component to
reach every parameter node.
"""

from __future__ import annotations

import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BoundaryFixedPoint,
    CannotIsolate,
    InconsistentSliceIndices,
    ResolutionExhausted,
)
from .fixset import (
    UnionFind,
    approximate_fixed_set,
    connected_components,
    isolating_region,
    slice_region,
    worker_count,
)
from .geometry import Region, build_grid
from .index_core import IndexOptions, index

LOCALITY_SAMPLES = 10


def default_resolution(n):
    """Y cells per axis when the caller gives none."""
    return {1: 1025, 2: 129}.get(n, 17)


@dataclass(frozen=True)
class CertifyConfig:
    resolution: int | tuple | None = None
    tol: float | None = None
    margin: float | None = None
    max_refine: int = 14
    seed_density: int = 4
    retries: int = 1
    threads: int | None = None

    def index_options(self):
        return IndexOptions(margin=self.margin, max_refine=self.max_refine,
                            seed_density=self.seed_density)

    def cells_per_dim(self, n):
        if self.resolution is None:
            return (default_resolution(n),) * n
        res = np.atleast_1d(self.resolution).astype(int)
        if res.size == 1:
            return (int(res[0]),) * n
        return tuple(int(r) for r in res)


@dataclass(frozen=True)
class ComponentIndex:
    component_id: int
    slice_indices: dict
    ind_value: int | None
    consistent: bool


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    evidence: str


@dataclass
class BrowderReport:
    name: str
    config: dict
    components: list  # dicts, one per component, sorted by id
    essential_component_ids: list
    sum_of_indices: int
    checks: list
    n_nodes: int
    # not serialised to JSON; kept for CSV/SVG emission
    component_cells: dict = field(default_factory=dict, repr=False)
    grid: object = field(default=None, repr=False)
    param_points: object = field(default=None, repr=False)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def essential_component_id(self):
        return self.essential_component_ids[0] if self.essential_component_ids else None


# --- ind_* and IND_* -----------------------------------------------------

def ind_star(problem, component, node, afs, opts=None, region=None):
    """ind_* of the component at ``node``: index of F_x on its isolating region."""
    if node not in component.param_coverage:
        raise CannotIsolate(f"node {node} is not covered by component {component.id}")
    if region is None:
        region = isolating_region(component, afs, node, opts)
    return index(problem.slice_map(node), region, opts).value


def ind_star_param(problem, component, afs, opts=None, threads=None, strict=True):
    """IND_* of a component: slice indices at every covered node, which must agree."""
    nodes = sorted(component.param_coverage)

    def one(node):
        return ind_star(problem, component, node, afs, opts)

    workers = worker_count(threads)
    if workers > 1 and len(nodes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            values = list(ex.map(one, nodes))
    else:
        values = [one(k) for k in nodes]
    per_node = dict(zip(nodes, values))
    distinct = sorted(set(values))
    consistent = len(distinct) == 1
    result = ComponentIndex(component.id, per_node, distinct[0] if consistent else None, consistent)
    if strict and not consistent:
        raise InconsistentSliceIndices(
            f"component {component.id} has slice indices {distinct}", component_index=result)
    return result


def disjointify(regions):
    """E_k minus the union of E_j for j < k, cell-wise and per node.

    Each entry is a ``{node: Region}`` mapping (a bare :class:`Region` is
    treated as a single-node mapping and returned as one).
    """
    bare = [isinstance(r, Region) for r in regions]
    maps = [{0: r} if b else dict(r) for r, b in zip(regions, bare)]
    seen = {}
    out = []
    for m in maps:
        cur = {}
        for node, reg in sorted(m.items()):
            prev = seen.get(node)
            cur[node] = reg if prev is None else reg - prev
            seen[node] = reg if prev is None else prev | reg
        out.append(cur)
    return [o[0] if b else o for o, b in zip(out, bare)]


# --- compatibility ------------------------------------------------------

@dataclass(frozen=True)
class CompatibilityResult:
    passed: bool
    region_index: int
    cluster_indices: tuple


def slice_clusters(afs, node):
    """Connected pieces of the retained cells at one node (face adjacency)."""
    flat = afs.slice_cells(node)
    if flat.size == 0:
        return []
    grid = afs.grid
    cells = [grid.unflat(c) for c in flat]
    pos = {c: i for i, c in enumerate(cells)}
    uf = UnionFind(len(cells))
    for i, c in enumerate(cells):
        for d in range(grid.dim):
            nb = list(c)
            nb[d] += 1
            j = pos.get(tuple(nb))
            if j is not None:
                uf.union(i, j)
    groups = {}
    for i, c in enumerate(cells):
        groups.setdefault(uf.find(i), []).append(grid.flat(c))
    return sorted((np.array(sorted(g)) for g in groups.values()), key=lambda g: g[0])


def compatibility_check(problem, node, region, afs, opts=None):
    """ind(Z, F_x) against the summed ind_* of the slice clusters inside Z.

    A cluster only partly inside Z means Z's boundary runs through retained
    cells, which is reported as :class:`BoundaryFixedPoint`.
    """
    f = problem.slice_map(node)
    total = index(f, region, opts).value
    retained = {afs.grid.unflat(c) for c in afs.slice_cells(node)}
    parts = []
    for cluster in slice_clusters(afs, node):
        cells = {afs.grid.unflat(c) for c in cluster}
        inside = cells & region.cells
        if not inside:
            continue
        if inside != cells:
            raise BoundaryFixedPoint(f"region boundary cuts a cluster of fixed cells at node {node}")
        z = slice_region(afs, cluster).dilate(1)
        if z.cells & (retained - cells):
            raise CannotIsolate(f"cluster at node {node} cannot be separated from its neighbours")
        parts.append(index(f, z, opts).value)
    return CompatibilityResult(total == sum(parts), total, tuple(parts))


# --- end-to-end ----------------------------------------------------------

def _run_once(problem, config, cells_per_dim):
    grid = build_grid(problem.box, cells_per_dim)
    opts = config.index_options()
    afs = approximate_fixed_set(problem, grid, tol=config.tol, threads=config.threads)
    comps = connected_components(afs)
    indices = [ind_star_param(problem, c, afs, opts, threads=config.threads) for c in comps]
    return grid, afs, comps, indices


def certify_browder(problem, config=None):
    """Fixed set -> components -> IND_* per component -> checks.

    Isolation or consistency failures trigger up to ``config.retries`` reruns
    with the Y resolution doubled; X sampling is never changed.
    """
    config = config or CertifyConfig()
    cpd = config.cells_per_dim(problem.box.dim)
    attempts = []
    for attempt in range(config.retries + 1):
        try:
            grid, afs, comps, indices = _run_once(problem, config, cpd)
            break
        except (CannotIsolate, InconsistentSliceIndices) as exc:
            attempts.append({"cells_per_dim": list(cpd), "error": f"{type(exc).__name__}: {exc}"})
            cpd = tuple(2 * c for c in cpd)
    else:
        raise ResolutionExhausted(
            f"{len(attempts)} attempt(s) failed; last: {attempts[-1]['error']}")

    n_nodes = problem.param_space.size
    rows = []
    for comp, ci in zip(comps, indices):
        rows.append({
            "id": comp.id,
            "n_cells": int(comp.size),
            "covered_nodes": len(comp.param_coverage),
            "coverage_fraction": comp.coverage_fraction(n_nodes),
            "ind_value": ci.ind_value,
            "consistent": ci.consistent,
            "isolation_margin": None if math.isinf(comp.isolation_margin) else comp.isolation_margin,
            "slice_indices": {str(k): v for k, v in sorted(ci.slice_indices.items())},
        })
    essential = [r["id"] for r in rows if r["ind_value"] != 0]
    total = sum(r["ind_value"] for r in rows)
    checks = _checks(rows, essential, total, indices, n_nodes)
    cfg = {
        "cells_per_dim": list(cpd),
        "n_nodes": n_nodes,
        "tol_mode": afs.tol_mode,
        "tol": afs.tol,
        "tol_factor": 1.5 if config.tol is None else None,
        "margin": "auto" if config.margin is None else config.margin,
        "max_refine": config.max_refine,
        "seed_density": config.seed_density,
        "retries": config.retries,
        "failed_attempts": attempts,
    }
    return BrowderReport(
        name=problem.name, config=cfg, components=rows, essential_component_ids=essential,
        sum_of_indices=total, checks=checks, n_nodes=n_nodes,
        component_cells={c.id: c.cells for c in comps}, grid=grid,
        param_points=problem.param_space.points)


def _checks(rows, essential, total, indices, n_nodes):
    checks = [Check("total_index", total == 1, f"sum of component indices = {total}")]
    checks.append(Check("essential_component", bool(essential),
                        f"nonzero-index components: {essential or 'none'}"))
    short = [r["id"] for r in rows if r["id"] in essential and r["covered_nodes"] != n_nodes]
    cover = ", ".join(f"{r['id']}:{r['covered_nodes']}/{n_nodes}" for r in rows if r["id"] in essential)
    checks.append(Check("essential_coverage", bool(essential) and not short,
                        f"coverage {cover or 'n/a'}" + (f"; short: {short}" if short else "")))
    rng = random.Random(0)
    bad = []
    sampled = 0
    for ci in indices:
        if ci.component_id not in essential:
            continue
        nodes = sorted(ci.slice_indices)
        pick = rng.sample(nodes, min(LOCALITY_SAMPLES, len(nodes)))
        sampled += len(pick)
        if len({ci.slice_indices[k] for k in pick}) != 1 or not ci.consistent:
            bad.append(ci.component_id)
    checks.append(Check("locality", bool(essential) and not bad,
                        f"{sampled} sampled slice indices" + (f"; disagree in {bad}" if bad else " agree")))
    partial_nonzero = [r["id"] for r in rows if r["covered_nodes"] < n_nodes and r["ind_value"] != 0]
    checks.append(Check("empty_slice_rule", not partial_nonzero,
                        "partially covering components all have index 0" if not partial_nonzero
                        else f"partial components with nonzero index: {partial_nonzero}"))
    return checks
