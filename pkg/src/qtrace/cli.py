"""Command-line entry point: ``qtrace run`` and ``qtrace eval``.

Exit status is 0 when every record passes, 1 when any fails, and 2 on
configuration, input or domain errors.
"""
import argparse
import sys

from . import functionals as fx
from . import linalg as la
from .errors import QTraceError
from .records import Tolerances
from .suite import SUITES, TrialConfig, run_suite

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2
FUNCTIONALS = ("tsallis", "relative_functional", "phi", "gibbs_objective", "tsallis_entropy")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="qtrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run verification suites")
    run.add_argument("--suite", action="append", metavar="NAME",
                     help=f"suite to run (repeatable): {', '.join(SUITES)}, all")
    run.add_argument("--dim", action="append", type=int, metavar="N")
    run.add_argument("--q", action="append", type=float, metavar="VALUE")
    run.add_argument("--trials", type=int, default=500)
    run.add_argument("--seed", type=int, default=42)
    run.add_argument("--tol-eq", type=float, default=Tolerances.eq_tol_scale)
    run.add_argument("--tol-dir", type=float, default=Tolerances.dir_slack)
    run.add_argument("--tol-opt", type=float, default=Tolerances.opt_tol_rel)
    run.add_argument("--out", metavar="PATH", help="report file (default stdout)")
    run.add_argument("--format", choices=("json", "csv"), default="json")

    ev = sub.add_parser("eval", help="evaluate one trace functional on matrix files")
    ev.add_argument("name", choices=FUNCTIONALS)
    ev.add_argument("files", nargs="+", metavar="FILE")
    ev.add_argument("--q", type=float)
    ev.add_argument("--p", type=float)
    ev.add_argument("--H", action="append", metavar="FILE",
                    help="contraction file (repeatable for phi)")
    return parser


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise argparse.ArgumentTypeError(f"{args.name} needs --{name}")
    return value


def _count(args, k):
    if len(args.files) != k:
        raise argparse.ArgumentTypeError(
            f"{args.name} takes {k} matrix file(s), got {len(args.files)}")


def evaluate(args):
    """Value of the requested functional."""
    mats = [la.load_matrix(path) for path in args.files]
    Hs = [la.load_matrix(path) for path in args.H or []]
    name = args.name
    if name == "tsallis":
        _count(args, 2)
        return fx.tsallis_relative_entropy(mats[0], mats[1], _need(args, "p"))
    q = _need(args, "q")
    if name == "relative_functional":
        _count(args, 2)
        if len(Hs) > 1:
            raise argparse.ArgumentTypeError("relative_functional takes at most one --H")
        return fx.relative_functional(mats[0], mats[1], Hs[0] if Hs else None, q)
    if name == "phi":
        return fx.phi_multi(mats, Hs or None, q)
    if name == "gibbs_objective":
        _count(args, 2)
        return fx.gibbs_objective(mats[0], mats[1], q)
    _count(args, 1)
    return fx.tsallis_entropy_functional(mats[0], q)


def _run(args):
    tol = Tolerances(args.tol_eq, args.tol_dir, args.tol_opt)
    config = TrialConfig(suites=args.suite or ["all"],
                         dims=args.dim or TrialConfig().dims,
                         q_grid=args.q if args.q is not None else TrialConfig().q_grid,
                         trials=args.trials, seed=args.seed, tolerances=tol)
    report = run_suite(config)
    text = report.render(args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    s = report.summary
    print(f"{s['passed']} passed, {s['failed']} failed, {s['skipped']} skipped "
          f"in {report.wall_time_seconds:.1f}s", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _run(args)
        print(f"{float(evaluate(args)):.15g}")
        return EXIT_OK
    except (QTraceError, argparse.ArgumentTypeError, OSError) as exc:
        print(f"qtrace: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
