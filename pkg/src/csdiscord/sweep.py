"""Deterministic parameter sweeps of the geometric measure, written as CSV.

Sweep files are flat ``key = value`` text.  Top-level keys select the model,
the optimizer method and fixed model parameters; each ``[axis]`` section
declares one grid axis, either as ``start``/``stop``/``steps`` (inclusive,
uniform) or as an explicit ``values`` list::

    model = xxz-dm
    J = 1
    Dx = 1

    [axis]
    name = Jz
    values = 0, 0.4, 0.9

    [axis]
    name = T
    start = 0.1
    stop = 5
    steps = 50
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidState, ParseError, SpecError
from .geodiscord import geometric_measure
from .models import NanoporeParams, XxzDmParams, nanopore_state, xxz_dm_thermal_oracle
from .states import CsParams, XParams, cs_to_matrix, x_to_matrix

MODELS = ("nanopore", "xxz-dm", "file")
METHODS = ("alternating", "grid")

PARAMETERS = {
    "nanopore": ("beta", "n_spins", "coupling", "time"),
    "xxz-dm": ("j", "jz", "dx", "temperature"),
    "file": tuple(f"p{i}" for i in range(1, 8)) + tuple(f"q{i}" for i in range(1, 8)),
}

ALIASES = {
    "N": "n_spins", "n": "n_spins", "D": "coupling", "t": "time", "b": "beta",
    "J": "j", "Jz": "jz", "Dx": "dx", "T": "temperature", "temp": "temperature",
}

RESULT_COLUMNS = ("valid", "g", "g_raw", "lambda_max", "total",
                  "k1", "k2", "k3", "l1", "l2", "l3", "iterations", "converged")


def canonical(model, name):
    name = ALIASES.get(name, name)
    if name not in PARAMETERS[model]:
        raise SpecError(f"unknown parameter {name!r} for model {model!r}")
    return name


@dataclass(frozen=True)
class Axis:
    name: str
    values: tuple

    @classmethod
    def linear(cls, name, start, stop, steps):
        steps = int(steps)
        if steps < 2:
            raise SpecError(f"axis {name!r}: steps must be >= 2")
        if start == stop:
            raise SpecError(f"axis {name!r}: start and stop coincide")
        return cls(name, tuple(float(v) for v in np.linspace(start, stop, steps)))


@dataclass(frozen=True)
class SweepSpec:
    model: str
    fixed: dict
    axes: tuple
    method: str = "alternating"
    jobs: int = 1
    state_path: str | None = None
    base_dir: str = field(default=".", compare=False)

    def __post_init__(self):
        if self.model not in MODELS:
            raise SpecError(f"unknown model {self.model!r}")
        if self.method not in METHODS:
            raise SpecError(f"unknown method {self.method!r}")
        if not 1 <= len(self.axes) <= 2:
            raise SpecError("a sweep needs 1 or 2 axes")
        if int(self.jobs) < 1:
            raise SpecError("jobs must be >= 1")
        fixed = {canonical(self.model, k): float(v) for k, v in self.fixed.items()}
        names = [canonical(self.model, a.name) for a in self.axes]
        if len(set(names)) != len(names):
            raise SpecError("duplicate axis names")
        for a in self.axes:
            if len(a.values) < 1:
                raise SpecError(f"axis {a.name!r} is empty")
        axes = tuple(Axis(n, tuple(a.values)) for n, a in zip(names, self.axes))
        object.__setattr__(self, "fixed", fixed)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "jobs", int(self.jobs))
        if self.model == "file" and self.state_path is None:
            raise SpecError("model 'file' needs a 'path' key")
        missing = set(self.required()) - set(fixed) - set(names)
        if missing:
            raise SpecError(f"missing parameters: {', '.join(sorted(missing))}")

    def required(self):
        if self.model == "nanopore":
            return ("beta", "n_spins", "coupling", "time")
        if self.model == "xxz-dm":
            return ("j", "jz", "dx", "temperature")
        return ()

    def points(self):
        """Grid points in index order (first axis slowest)."""
        for combo in itertools.product(*(a.values for a in self.axes)):
            yield dict(zip((a.name for a in self.axes), combo))

    def with_jobs(self, jobs):
        return SweepSpec(self.model, self.fixed, self.axes, self.method, jobs, self.state_path, self.base_dir)


@dataclass
class SweepTable:
    header: tuple
    rows: list


def build_state(spec: SweepSpec, point):
    """The validated model state at one grid point."""
    values = {**spec.fixed, **point}
    if spec.model == "nanopore":
        return nanopore_state(NanoporeParams(values["beta"], int(values["n_spins"]), values["coupling"],
                                             values["time"]))
    if spec.model == "xxz-dm":
        return xxz_dm_thermal_oracle(XxzDmParams(values["j"], values["jz"], values["dx"],
                                                 values["temperature"]))
    from .qst import read_state  # local import: qst depends on this module's siblings only

    base = read_state(Path(spec.base_dir) / spec.state_path)
    params = base.params
    if isinstance(params, CsParams):
        over = {f"p{i}": v for i, v in enumerate(params.as_tuple(), 1)}
        over.update({k: v for k, v in values.items() if k.startswith("p")})
        return cs_to_matrix(CsParams(*(over[f"p{i}"] for i in range(1, 8))))
    if isinstance(params, XParams):
        over = {f"q{i}": v for i, v in enumerate(params.as_tuple(), 1)}
        over.update({k: v for k, v in values.items() if k.startswith("q")})
        return x_to_matrix(XParams(*(over[f"q{i}"] for i in range(1, 8))))
    raise SpecError("model 'file' needs a state file of kind cs or x")


def header_for(spec: SweepSpec):
    cols = [a.name for a in spec.axes]
    if spec.model == "nanopore":
        cols.append("at")
    return tuple(cols) + RESULT_COLUMNS


def evaluate_point(spec: SweepSpec, point):
    lead = [point[a.name] for a in spec.axes]
    if spec.model == "nanopore":
        values = {**spec.fixed, **point}
        lead.append(1.5 * values["coupling"] * values["time"])
    try:
        rho = build_state(spec, point)
    except (InvalidState, ValueError):
        return tuple(lead) + (0,) + (None,) * (len(RESULT_COLUMNS) - 1)
    res = geometric_measure(rho, spec.method)
    opt = res.opt
    return tuple(lead) + (1, res.g, res.g_raw, opt.lambda_max, res.total, *opt.axes.k, *opt.axes.l,
                          opt.iterations, int(opt.converged))


def _evaluate_indexed(args):
    spec, point = args
    return evaluate_point(spec, point)


def run_sweep(spec: SweepSpec) -> SweepTable:
    points = list(spec.points())
    if spec.jobs == 1:
        rows = [evaluate_point(spec, p) for p in points]
    else:
        # map() yields in submission order, so rows stay in grid index order
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunk = max(1, len(points) // (4 * spec.jobs))
            rows = list(pool.map(_evaluate_indexed, [(spec, p) for p in points], chunksize=chunk))
    return SweepTable(header_for(spec), rows)


def format_cell(value):
    if value is None:
        return "NA"
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if not math.isfinite(value):
        return "NA"
    if value == 0.0:
        value = 0.0  # drop the sign of negative zero
    return "%.17g" % value


def emit_csv(table: SweepTable, sink=None):
    """Write ``table`` to ``sink`` (text stream) if given; always return the CSV bytes."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    text = buf.getvalue()
    if sink is not None:
        sink.write(text)
    return text.encode("utf-8")


def _number(text, lineno):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", lineno) from None


def parse_spec_text(text, base_dir="."):
    top = {}
    sections = []
    current = top
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line != "[axis]":
                raise ParseError(f"unknown section {line!r}", lineno, 1)
            current = {"_line": lineno}
            sections.append(current)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", lineno, 1)
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ParseError("empty key", lineno, 1)
        if key in current:
            raise ParseError(f"duplicate key {key!r}", lineno, 1)
        current[key] = (value, lineno)

    model = top.pop("model", (None, 0))[0]
    if model is None:
        raise SpecError("spec has no 'model' key")
    method = top.pop("method", ("alternating", 0))[0]
    jobs = top.pop("jobs", ("1", 0))
    jobs = int(_number(jobs[0], jobs[1]))
    path = top.pop("path", (None, 0))[0]
    fixed = {k: _number(v, ln) for k, (v, ln) in top.items()}

    axes = []
    for sec in sections:
        line = sec.pop("_line")
        if "name" not in sec:
            raise ParseError("[axis] section without 'name'", line)
        name = sec.pop("name")[0]
        if "values" in sec:
            if set(sec) != {"values"}:
                raise SpecError(f"axis {name!r}: use either 'values' or start/stop/steps")
            vtext, ln = sec["values"]
            axes.append(Axis(name, tuple(_number(v.strip(), ln) for v in vtext.split(",") if v.strip())))
        else:
            if set(sec) != {"start", "stop", "steps"}:
                raise SpecError(f"axis {name!r}: needs start, stop and steps")
            start = _number(*sec["start"])
            stop = _number(*sec["stop"])
            steps = _number(*sec["steps"])
            if steps != int(steps):
                raise SpecError(f"axis {name!r}: steps must be an integer")
            axes.append(Axis.linear(name, start, stop, int(steps)))
    return SweepSpec(model, fixed, tuple(axes), method, jobs, path, str(base_dir))


def load_spec(path):
    path = Path(path)
    return parse_spec_text(path.read_text(encoding="utf-8"), base_dir=path.parent)
