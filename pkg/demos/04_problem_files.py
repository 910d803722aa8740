"""
Problem files and reports
=========================

Problems are JSON documents; reports can be written as JSON, text, CSV or SVG.
"""

import tempfile
from pathlib import Path

from browder import builtin_fixture, certify_browder
from browder.problem_file import dumps_problem, load_problem
from browder.report import emit_report

out = Path(tempfile.mkdtemp())
text = dumps_problem(builtin_fixture("scurve"))
print(text)

# a variant with a steeper cubic
path = out / "steep.json"
path.write_text(text.replace("0.25*(2*x1", "0.2*(3*x1").replace('"scurve"', '"steep"'))
problem = load_problem(path)
print(problem.name, problem.map)

report = certify_browder(problem)
for fmt in ("json", "csv", "svg"):
    emit_report(report, fmt, out / f"steep.{fmt}")
print("wrote", sorted(p.name for p in out.iterdir()))
print("passed:", report.passed)
