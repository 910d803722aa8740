"""
Fixed-point indices of single maps
==================================

The index of f on a region Z counts the fixed points of f inside Z with a
sign each. Three engines compute it, picked by the dimension of Z.
"""

import numpy as np

from browder import Box, Region, builtin_fixture, index, index_1d

# %%
# In one dimension only the signs of g(y) = y - f(y) at the ends matter.
for a in (0.5, 2.0, -3.0):
    print(f"f(y) = {a:+.1f} y on [-1, 1]: index {index_1d(lambda y: a * y, -1, 1).value}")

# %%
# The scurve slice at x = 0.5 has three fixed points, -1, 0 and 1.
# Each gets its own box; the indices add up over the union.
f = builtin_fixture("scurve").slice_map(128)
boxes = [(-1.5, -0.5), (-0.4, 0.4), (0.6, 1.4)]
vals = [index(f, Region.from_box(Box([a], [b]))).value for a, b in boxes]
print("pieces", vals, "union", index(f, Region.from_box(Box([-1.5], [1.4]))).value)

# %%
# In 2-D the index is a winding number of g around the origin.
square = Region.from_box(Box([-0.5, -0.5], [0.5, 0.5]))
for name in ("rotation", "hyperbolic"):
    cert = index(builtin_fixture(name).slice_map(0), square)
    print(f"{name:>10}: {cert.value:+d}  ({cert.samples_used} evaluations, "
          f"boundary |g| >= {cert.boundary_margin:.3f})")

# %%
# From three dimensions on, fixed points are found by Newton's method and the
# index is the sum of sign det(I - Df) over them.
cube = Region.from_box(Box([-1] * 3, [1] * 3))
cert = index(lambda y: 0.5 * y + np.array([0.1, 0.0, -0.2]), cube)
print(cert.method, cert.value, cert.roots)
