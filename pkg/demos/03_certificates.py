"""
End-to-end certificates
=======================

certify_browder runs the whole chain on a problem and checks that some
component with nonzero index reaches every parameter node.
"""

from browder import CertifyConfig, builtin_fixture, certify_browder, fixture_names
from browder.report import to_text

for name in fixture_names():
    r = certify_browder(builtin_fixture(name))
    inds = [c["ind_value"] for c in r.components]
    print(f"{name:>10}: {'PASS' if r.passed else 'FAIL'}  indices {inds}  essential {r.essential_component_ids}")

# %%
print()
print(to_text(certify_browder(builtin_fixture("island"))))

# %%
# The sine-curve sample is not locally connected near the bar. With the local
# tolerance the fixed set stays in one piece; a fixed tolerance of 0.01 is
# narrower than the jump of the fixed point between tail nodes and breaks it.
bad = certify_browder(builtin_fixture("sine-v"), CertifyConfig(tol=0.01))
print("sine-v, tol=0.01:", len(bad.components), "components;",
      [c.name for c in bad.checks if not c.passed], "fail")
