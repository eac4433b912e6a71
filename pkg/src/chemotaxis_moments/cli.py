"""Command line entry point: ``run``, ``table build``, ``compare``, ``list-scenarios``."""
from __future__ import annotations

import argparse
import sys
import warnings

from . import closures as cl
from .chemo import ChemoSolverError
from .io import ConfigError, compare_runs, parse_config, write_snapshots
from .runner import NumericalFailure, run
from .scenarios import MODELS, SCENARIOS

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="chemotaxis-moments", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="run one scenario and write CSV snapshots")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--model", choices=MODELS)
    r.add_argument("--dx", type=float)
    r.add_argument("--tfinal", type=float)

    t = sub.add_parser("table", help="closure tables")
    tsub = t.add_subparsers(dest="table_command", required=True, parser_class=_Parser)
    tb = tsub.add_parser("build", help="build and save a closure table")
    tb.add_argument("--kind", required=True, choices=["half", "quarter", "m1_1d", "m1_2d"])
    tb.add_argument("--out", required=True)

    c = sub.add_parser("compare", help="per-snapshot density error between two runs")
    c.add_argument("--a", required=True)
    c.add_argument("--b", required=True)
    c.add_argument("--norm", default="l1", choices=["l1", "l2", "linf"])

    sub.add_parser("list-scenarios", help="list scenario ids")
    return p


def _cmd_run(args):
    cfg = parse_config(args.config, {"model": args.model, "dx": args.dx, "t_final": args.tfinal})
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print(f"warning: {msg}", file=sys.stderr)
        result = run(cfg)
    path = write_snapshots(result, args.out)
    print(
        f"{cfg.scenario}/{cfg.model}: {result.stats.steps} steps, dt={result.dt:.6g}, "
        f"projections={result.stats.projected_cells}, wall={result.wall_time:.3f}s -> {path}"
    )


def _cmd_table(args):
    table = cl.build_table(args.kind)
    path = cl.save_table(table, args.out)
    print(f"{args.kind} table with {table.b.size} points per axis -> {path}")


def _cmd_compare(args):
    rows = compare_runs(args.a, args.b, args.norm)
    print(f"time,{args.norm},relative")
    for t, err, rel in rows:
        print(f"{t:.17g},{err:.17g},{rel:.17g}")


def _cmd_list(_args):
    print("id,dim,domain,dx,t_final,description")
    for name, sc in SCENARIOS.items():
        dom = "x".join(f"[{sc.domain[i]:g};{sc.domain[i + 1]:g}]" for i in range(0, len(sc.domain), 2))
        print(f"{name},{sc.dim},{dom},{sc.dx:g},{sc.t_final:g},{sc.description}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {"run": _cmd_run, "table": _cmd_table, "compare": _cmd_compare, "list-scenarios": _cmd_list}[args.command]
    try:
        handler(args)
    except (NumericalFailure, ChemoSolverError, cl.RealizabilityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
