import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from browder.certify import default_resolution  # noqa: E402
from browder.fixset import approximate_fixed_set, connected_components  # noqa: E402
from browder.geometry import build_grid  # noqa: E402
from browder.mapdef import builtin_fixture  # noqa: E402

_CACHE = {}


def fixed_set(name, cells=None, tol=None):
    """Cached (problem, afs, components) for a fixture at a given resolution."""
    key = (name, cells, tol)
    if key not in _CACHE:
        p = builtin_fixture(name)
        n = p.box.dim
        grid = build_grid(p.box, (cells or default_resolution(n),) * n)
        afs = approximate_fixed_set(p, grid, tol=tol)
        _CACHE[key] = (p, afs, connected_components(afs))
    return _CACHE[key]


@pytest.fixture
def scurve_set():
    return fixed_set("scurve")


@pytest.fixture
def island_set():
    return fixed_set("island")


ACCEPTANCE = {}


def record(criterion, passed, detail):
    ACCEPTANCE[criterion] = (passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if passed else 'FAIL'}  {detail}")
