"""Serialise certification reports as JSON, text, CSV or SVG.

All emitters are byte-stable: keys are sorted and floats are written with
9 significant digits.
"""

from __future__ import annotations

import io
import json
from pathlib import Path

import numpy as np

from .errors import ProblemIOError

SCHEMA_VERSION = 1
FORMATS = ("json", "text", "csv", "svg")

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")


def _fmt(v):
    return f"{v:.9g}"


def _round_floats(obj):
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (float, np.floating)):
        return float(_fmt(float(obj)))
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def report_to_dict(report):
    return _round_floats({
        "schema_version": SCHEMA_VERSION,
        "name": report.name,
        "config": report.config,
        "components": report.components,
        "checks": [{"name": c.name, "passed": c.passed, "evidence": c.evidence}
                   for c in report.checks],
        "essential_component_id": report.essential_component_id,
        "essential_component_ids": report.essential_component_ids,
        "sum_of_indices": report.sum_of_indices,
        "passed": report.passed,
    })


def to_json(report):
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True) + "\n"


def to_text(report):
    out = io.StringIO()
    verdict = "PASS" if report.passed else "FAIL"
    cfg = report.config
    out.write(f"problem {report.name}: {verdict}\n")
    out.write(f"nodes {report.n_nodes}, y cells {'x'.join(str(c) for c in cfg['cells_per_dim'])}, "
              f"tol {cfg['tol_mode']} (max {_fmt(cfg['tol'])}), margin {cfg['margin']}\n")
    out.write(f"{'id':>4} {'cells':>7} {'coverage':>11} {'index':>6}  essential\n")
    for row in report.components:
        cov = f"{row['covered_nodes']}/{report.n_nodes}"
        ess = "*" if row["id"] in report.essential_component_ids else ""
        line = f"{row['id']:>4} {row['n_cells']:>7} {cov:>11} {str(row['ind_value']):>6}  {ess}"
        out.write(line.rstrip() + "\n")
    out.write(f"sum of indices: {report.sum_of_indices}\n")
    for c in report.checks:
        out.write(f"[{'pass' if c.passed else 'FAIL'}] {c.name}: {c.evidence}\n")
    return out.getvalue()


def cells_csv(component_cells):
    """One row per (component, node): ``node_index,cell_indices,component_id``.

    ``cell_indices`` is a space-separated list of flat y-cell indices.
    """
    out = io.StringIO()
    out.write("node_index,cell_indices,component_id\n")
    for cid in sorted(component_cells):
        rows = component_cells[cid]
        for node in np.unique(rows[:, 0]):
            cells = rows[rows[:, 0] == node, 1]
            out.write(f"{int(node)},{' '.join(str(int(c)) for c in sorted(cells))},{cid}\n")
    return out.getvalue()


def to_csv(report):
    return cells_csv(report.component_cells)


def to_svg(report, width=800, height=400, pad=40):
    """Projection plot: nodes left to right, each component's y1-extent as a strip."""
    grid = report.grid
    n = report.n_nodes
    lo, hi = float(grid.box.lo[0]), float(grid.box.hi[0])
    h = float(grid.h[0])
    pw, ph = width - 2 * pad, height - 2 * pad
    colw = pw / n

    def ypix(v):
        return pad + ph * (hi - v) / (hi - lo)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<title>{report.name}: components projected on the parameter nodes</title>',
        f'<rect x="{pad}" y="{pad}" width="{pw}" height="{ph}" fill="white" stroke="black"/>',
    ]
    essential = set(report.essential_component_ids)
    for cid in sorted(report.component_cells):
        rows = report.component_cells[cid]
        color = PALETTE[cid % len(PALETTE)]
        attrs = (f'fill="{color}" fill-opacity="0.9" stroke="black" stroke-width="0.3"'
                 if cid in essential else f'fill="{color}" fill-opacity="0.4"')
        parts.append(f'<g id="component-{cid}" class="{"essential" if cid in essential else "other"}" {attrs}>')
        for node in np.unique(rows[:, 0]):
            cells = rows[rows[:, 0] == node, 1]
            axis0 = np.unravel_index(cells, grid.shape)[0]
            y0 = lo + int(axis0.min()) * h
            y1 = lo + (int(axis0.max()) + 1) * h
            x = pad + int(node) * colw
            parts.append(f'<rect x="{_fmt(x)}" y="{_fmt(ypix(y1))}" width="{_fmt(colw)}" '
                         f'height="{_fmt(ypix(y0) - ypix(y1))}"/>')
        parts.append("</g>")
    parts.append(f'<text x="{pad}" y="{height - 10}" font-size="12">parameter node 0..{n - 1}</text>')
    parts.append(f'<text x="5" y="{pad - 10}" font-size="12">y1 in [{_fmt(lo)}, {_fmt(hi)}]</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


_EMITTERS = {"json": to_json, "text": to_text, "csv": to_csv, "svg": to_svg}


def render_report(report, fmt):
    if fmt not in _EMITTERS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    return _EMITTERS[fmt](report)


def emit_report(report, fmt, path=None):
    """Render ``report`` and write it to ``path`` (returns the text either way)."""
    text = render_report(report, fmt)
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8", newline="\n")
        except OSError as exc:
            raise ProblemIOError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text
