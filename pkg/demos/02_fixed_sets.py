"""
Approximate fixed-point sets and their components
=================================================

Each parameter node gets a slice of Y cells; a cell is kept when the residual
at its center is small compared with how fast the residual changes nearby.
"""

import numpy as np

from browder import approximate_fixed_set, build_grid, builtin_fixture, connected_components

problem = builtin_fixture("island")
grid = build_grid(problem.box, (1025,))
afs = approximate_fixed_set(problem, grid)
comps = connected_components(afs)
xs = problem.param_space.points[:, 0]

print(f"{len(afs.cells)} retained (node, cell) pairs, tolerance mode {afs.tol_mode}")
for c in comps:
    nodes = sorted(c.param_coverage)
    print(f"component {c.id}: {c.size} cells over x in [{xs[nodes[0]]:.3f}, {xs[nodes[-1]]:.3f}], "
          f"margin {c.isolation_margin:g} cells")

# %%
# At x = 0.5 the island shows up as two clusters, near y = 0.3 and y = 0.7.
ys = grid.centers()[afs.slice_cells(128), 0]
print("slice x=0.5:", np.round(ys, 3))

# %%
# A fixed tolerance keeps far more cells where the residual is flat, so the
# island spreads over most of the parameter range.
wide = connected_components(approximate_fixed_set(problem, build_grid(problem.box, (1024,)), tol=0.02))
print("fixed tol 0.02 island coverage:", len(wide[1].param_coverage), "nodes")
