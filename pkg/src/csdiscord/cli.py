"""Command-line interface: ``csdiscord analyze|convert|model|sweep|verify``.

Exit codes: 0 on success, 1 on a domain error (message on stderr), 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import states
from .errors import DiscordError
from .geodiscord import geometric_measure
from .models import (NanoporeParams, XxzDmParams, nanopore_state, xxz_dm_thermal_closed,
                     xxz_dm_thermal_oracle)
from .qst import format_state, read_state
from .sweep import emit_csv, load_spec, run_sweep
from .verify import run_checks


def _g17(v):
    return "%.17g" % v


def _vec(v):
    return " ".join(_g17(x) for x in v)


def gresult_lines(res):
    opt = res.opt
    return [
        f"G = {_g17(res.g)}",
        f"G_raw = {_g17(res.g_raw)}",
        f"lambda_max = {_g17(opt.lambda_max)}",
        f"total = {_g17(res.total)}",
        f"k = {_vec(opt.axes.k)}",
        f"l = {_vec(opt.axes.l)}",
        f"iterations = {opt.iterations}",
        f"converged = {str(opt.converged).lower()}",
        f"restarts = {opt.restarts_used}",
    ]


def cmd_analyze(args, out):
    sf = read_state(args.input)
    rho = sf.matrix
    res = geometric_measure(rho, args.method)
    b = res.bloch
    lines = [f"shape = {states.classify(rho)}", f"method = {args.method}"]
    lines += gresult_lines(res)
    lines += [f"x = {_vec(b.x)}", f"y = {_vec(b.y)}"]
    lines += [f"T{i + 1} = {_vec(row)}" for i, row in enumerate(b.t)]
    lines.append(f"summary: G = {res.g:.6f}, lambda_max = {res.opt.lambda_max:.6f}")
    out.write("\n".join(lines) + "\n")
    return 0


def cmd_convert(args, out):
    sf = read_state(args.input)
    rho = sf.matrix
    if args.to == "x":
        p = sf.params if isinstance(sf.params, states.CsParams) else states.extract_cs_params(rho)
        q = states.derive_x_from_cs(p)
        result = q
    else:
        q = sf.params if isinstance(sf.params, states.XParams) else states.extract_x_params(rho)
        p = states.derive_cs_from_x(q)
        result = p
    report = states.check_condition6(p, q)
    comments = ["condition report (CS p, X q):"] + report.lines()
    text = format_state(result, comments)
    if args.out:
        Path(args.out).write_text(format_state(result), encoding="utf-8")
    out.write(text)
    return 0


def cmd_model(args, out):
    if args.model == "nanopore":
        rho = nanopore_state(NanoporeParams(args.beta, args.n, args.coupling, args.time))
        desc = f"nanopore beta={args.beta} N={args.n} D={args.coupling} t={args.time}"
    else:
        params = XxzDmParams(args.j, args.jz, args.dx, args.temp)
        rho = xxz_dm_thermal_closed(params) if args.closed else xxz_dm_thermal_oracle(params)
        desc = (f"xxz-dm J={args.j} Jz={args.jz} Dx={args.dx} T={args.temp} "
                f"({'closed form' if args.closed else 'oracle'})")
    comments = [desc, f"shape {states.classify(rho)}"]
    if args.analyze:
        comments += gresult_lines(geometric_measure(rho, args.method))
    out.write(format_state(rho, comments))
    return 0


def cmd_sweep(args, out):
    spec = load_spec(args.spec)
    if args.jobs is not None:
        spec = spec.with_jobs(args.jobs)
    table = run_sweep(spec)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        emit_csv(table, fh)
    valid = sum(1 for r in table.rows if r[table.header.index("valid")] == 1)
    out.write(f"wrote {len(table.rows)} rows ({valid} valid) to {args.out}\n")
    return 0


def cmd_verify(args, out):
    results = run_checks(args.samples, args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        out.write(f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}\n")
    failed = sum(not r.passed for r in results)
    out.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return 0 if failed == 0 else 1


def build_parser():
    parser = argparse.ArgumentParser(prog="csdiscord",
                                     description="Geometric discord of two-qubit CS and X states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="geometric measure of a qst1 state")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("alternating", "grid"), default="alternating")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("convert", help="Hadamard conversion between CS and X parameters")
    p.add_argument("--input", required=True)
    p.add_argument("--to", choices=("x", "cs"), required=True)
    p.add_argument("--out", help="also write the converted state (without report) here")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("model", help="generate a model state")
    msub = p.add_subparsers(dest="model", required=True)
    n = msub.add_parser("nanopore")
    n.add_argument("--beta", type=float, required=True)
    n.add_argument("--n", type=int, required=True)
    n.add_argument("--coupling", type=float, required=True)
    n.add_argument("--time", type=float, required=True)
    x = msub.add_parser("xxz-dm")
    x.add_argument("--j", type=float, required=True)
    x.add_argument("--jz", type=float, required=True)
    x.add_argument("--dx", type=float, required=True)
    x.add_argument("--temp", type=float, required=True)
    route = x.add_mutually_exclusive_group()
    route.add_argument("--oracle", action="store_true", help="exp(-H/T)/Z (default)")
    route.add_argument("--closed", action="store_true", help="printed closed form")
    for q in (n, x):
        q.add_argument("--analyze", action="store_true")
        q.add_argument("--method", choices=("alternating", "grid"), default="alternating")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("sweep", help="run a sweep spec file and write CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except DiscordError as exc:
        print(f"csdiscord: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"csdiscord: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
