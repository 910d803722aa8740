"""Fixed-point indices and Browder-type certificates for parametrized maps."""

from .certify import (
    BrowderReport,
    CertifyConfig,
    ComponentIndex,
    certify_browder,
    compatibility_check,
    disjointify,
    ind_star,
    ind_star_param,
)
from .errors import *  # noqa: F401,F403
from .fixset import (
    ApproxFixedSet,
    Component,
    approximate_fixed_set,
    connected_components,
    isolating_neighborhood,
)
from .geometry import (
    Box,
    ParamSpace,
    Region,
    YGrid,
    build_grid,
    clamp_to_box,
    make_interval_space,
    make_sine_curve_space,
)
from .index_core import IndexCertificate, IndexOptions, index, index_1d, index_2d, index_regular_sum, residual
from .mapdef import MapExpr, ProblemDef, builtin_fixture, eval_map, fixture_names, parse_map
from .problem_file import load_problem
from .report import emit_report

__version__ = "0.1.0"
