"""JSON problem files: load, validate, export.

Layout::

    {
      "name": "scurve",
      "param_space": {"kind": "interval", "nodes": 257},
      "box": {"lo": [-2.0], "hi": [2.0]},
      "map": "y1 + 0.25*(2*x1 - 1 - (y1^3 - y1))",
      "config": {"resolution": 1025}          # optional
    }

``param_space`` is one of ``{"kind": "interval", "nodes": K}``,
``{"kind": "sine-v", "tail": T, "bar": B}`` or
``{"kind": "graph", "points": [[...], ...], "edges": [[i, j], ...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import BrowderError, ParseError, ProblemIOError, ValidationError
from .geometry import Box, make_graph_space, make_interval_space, make_sine_curve_space
from .mapdef import ProblemDef, parse_map

TOP_KEYS = {"name", "param_space", "box", "map", "config"}
REQUIRED_KEYS = ("name", "param_space", "box", "map")
CONFIG_KEYS = {"resolution", "tol", "margin", "max_refine", "seed_density"}
SPACE_KEYS = {"interval": {"nodes"}, "sine-v": {"tail", "bar"}, "graph": {"points", "edges"}}


def _space_from_dict(d):
    if not isinstance(d, dict) or d.get("kind") not in SPACE_KEYS:
        raise ValidationError("param_space", f"kind must be one of {sorted(SPACE_KEYS)}")
    kind = d["kind"]
    keys = set(d) - {"kind"}
    if keys != SPACE_KEYS[kind]:
        raise ValidationError("param_space", f"{kind} needs exactly {sorted(SPACE_KEYS[kind])}")
    try:
        if kind == "interval":
            return make_interval_space(_int(d["nodes"], "param_space"))
        if kind == "sine-v":
            return make_sine_curve_space(_int(d["tail"], "param_space"), _int(d["bar"], "param_space"))
        return make_graph_space(d["points"], d["edges"])
    except BrowderError as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError("param_space", str(exc)) from exc
    except (TypeError, ValueError) as exc:
        raise ValidationError("param_space", str(exc)) from exc


def _int(v, field):
    if isinstance(v, bool) or not isinstance(v, int):
        raise ValidationError(field, f"expected an integer, got {v!r}")
    return v


def problem_from_dict(d):
    if not isinstance(d, dict):
        raise ValidationError("problem", "top level must be a JSON object")
    unknown = set(d) - TOP_KEYS
    if unknown:
        raise ValidationError(sorted(unknown)[0], "unknown key")
    for k in REQUIRED_KEYS:
        if k not in d:
            raise ValidationError(k, "missing")
    if not isinstance(d["name"], str):
        raise ValidationError("name", "must be a string")
    space = _space_from_dict(d["param_space"])
    b = d["box"]
    if not isinstance(b, dict) or set(b) != {"lo", "hi"}:
        raise ValidationError("box", "needs exactly 'lo' and 'hi'")
    try:
        box = Box(b["lo"], b["hi"])
    except (BrowderError, TypeError, ValueError) as exc:
        raise ValidationError("box", str(exc)) from exc
    if not isinstance(d["map"], str):
        raise ValidationError("map", "must be a string")
    try:
        expr = parse_map(d["map"], space.dim, box.dim)
    except BrowderError as exc:
        raise ValidationError("map", str(exc)) from exc
    config = d.get("config")
    if config is not None:
        if not isinstance(config, dict):
            raise ValidationError("config", "must be an object")
        bad = set(config) - CONFIG_KEYS
        if bad:
            raise ValidationError(f"config.{sorted(bad)[0]}", "unknown key")
        config = dict(config)
    try:
        return ProblemDef(space, box, expr, d["name"], config)
    except BrowderError as exc:
        raise ValidationError("map", str(exc)) from exc


def problem_to_dict(problem):
    out = {
        "name": problem.name,
        "param_space": dict(problem.param_space.source or {
            "kind": "graph",
            "points": problem.param_space.points.tolist(),
            "edges": [list(e) for e in problem.param_space.edges],
        }),
        "box": {"lo": problem.box.lo.tolist(), "hi": problem.box.hi.tolist()},
        "map": problem.map.text or str(problem.map),
    }
    if problem.config:
        out["config"] = dict(problem.config)
    return out


def dumps_problem(problem):
    return json.dumps(problem_to_dict(problem), indent=2, sort_keys=True) + "\n"


def loads_problem(text):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from exc
    return problem_from_dict(d)


def load_problem(path):
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ProblemIOError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8 (byte {exc.start})") from exc
    return loads_problem(text)


def save_problem(problem, path):
    try:
        Path(path).write_text(dumps_problem(problem), encoding="utf-8")
    except OSError as exc:
        raise ProblemIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
