"""Command-line entry point.

    surfcalc run --scenario <path> [--out <dir>] [--threads N]
    surfcalc list
    surfcalc orders --report <csv>

The thread count falls back to the SURFCALC_THREADS environment variable.
"""

import argparse
import inspect
import os
import sys

from .constitutive import CONSTITUTIVE_CATALOG
from .errors import ConfigError
from .fields import FIELD_CATALOG
from .flowmap import CATALOG as SURFACE_CATALOG
from .report import fmt, span_order
from .scenario import SUITE_NAMES, load_scenario, run_scenario


def _signature_of(factory):
    try:
        sig = inspect.signature(factory)
    except (TypeError, ValueError):
        return ""
    parts = []
    for name, par in sig.parameters.items():
        if par.kind in (par.VAR_KEYWORD, par.VAR_POSITIONAL):
            continue
        if par.default is inspect.Parameter.empty:
            parts.append(name)
        else:
            parts.append(f"{name}={par.default!r}")
    return ", ".join(parts)


def cmd_list(_args) -> int:
    print("surfaces:")
    for name in sorted(SURFACE_CATALOG):
        print(f"  {name}({_signature_of(SURFACE_CATALOG[name])})")
    print("fields:")
    for name in sorted(FIELD_CATALOG):
        print(f"  {name}({_signature_of(FIELD_CATALOG[name])})")
    print("constitutive sets:")
    for name in sorted(CONSTITUTIVE_CATALOG):
        print(f"  {name}({_signature_of(CONSTITUTIVE_CATALOG[name])})")
    print("suites:")
    for name in SUITE_NAMES:
        print(f"  {name}")
    return 0


def cmd_run(args) -> int:
    try:
        scn = load_scenario(args.scenario)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    threads = args.threads
    if threads is None:
        threads = int(os.environ.get("SURFCALC_THREADS", "1"))
    outcomes = run_scenario(scn, args.out, threads)
    status = 0
    for oc in outcomes:
        if oc.failures:
            status = 1
            print(f"[FAIL] {scn.name}/{oc.suite} -> {oc.csv_path}")
            for msg in oc.failures:
                print(f"       {msg}")
        else:
            print(f"[ok]   {scn.name}/{oc.suite} -> {oc.csv_path}")
    return status


def cmd_orders(args) -> int:
    try:
        with open(args.report) as f:
            lines = [ln.rstrip("\n") for ln in f if ln.strip()]
    except FileNotFoundError:
        print(f"error: no such report {args.report}", file=sys.stderr)
        return 2
    header = lines[0].split(",")
    try:
        i_name = header.index("name")
        i_res = header.index("abs_residual")
    except ValueError:
        print("error: report lacks name/abs_residual columns", file=sys.stderr)
        return 2
    series = {}
    for ln in lines[1:]:
        cells = ln.split(",")
        series.setdefault(cells[i_name], []).append(float(cells[i_res]))
    width = max((len(n) for n in series), default=4)
    print(f"{'name':<{width}}  first         last          order")
    for name, vals in series.items():
        print(f"{name:<{width}}  {fmt(vals[0]):<12.12s}  {fmt(vals[-1]):<12.12s}  "
              f"{span_order(vals):.2f}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="surfcalc",
        description="Verification suites and tangential flow on parametrized "
                    "evolving surfaces with boundary.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file")
    p_run.add_argument("--scenario", required=True, help="path to scenario JSON")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--threads", type=int, default=None,
                       help="concurrent suites (default SURFCALC_THREADS or 1)")
    p_run.set_defaults(func=cmd_run)

    p_list = sub.add_parser("list", help="list catalog surfaces, fields, sets")
    p_list.set_defaults(func=cmd_list)

    p_orders = sub.add_parser("orders", help="summarize convergence orders")
    p_orders.add_argument("--report", required=True, help="CSV produced by run")
    p_orders.set_defaults(func=cmd_orders)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
