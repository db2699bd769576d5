"""Command-line front end.

Exit status: 0 success, 1 infeasible instance, 2 malformed input or usage,
3 an exhaustive evaluator's size cap was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile

from . import analysis
from .exact import solve_exact
from .fast import solve_fast
from .model import (
    InfeasibleError,
    ProblemFormatError,
    TooLargeError,
    make_report,
    problem_from_dict,
)
from .supernode import CapacityProfile, expand_independent, solve_correlated

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_MALFORMED = 2
EXIT_TOO_LARGE = 3


class UsageError(Exception):
    pass


def _probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must fit in an unsigned 64-bit integer: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="msalloc",
        description="Minimal spreading storage allocation for multi-class storage systems.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, input_required=True):
        if input_required:
            p.add_argument("--input", required=True, help="problem document (JSON)")
        p.add_argument("--out", help="output file (default: standard output)")

    def grid(p):
        p.add_argument("--p-min", type=_probability, default=0.01)
        p.add_argument("--p-max", type=_probability, default=0.99)
        p.add_argument("--steps", type=_positive_int, default=99)
        p.add_argument("--seed", type=_seed, required=True)
        p.add_argument("--realizations", type=_positive_int, default=analysis.DEFAULT_REALIZATIONS)

    p = sub.add_parser("solve", help="solve one instance")
    common(p)
    p.add_argument("--method", choices=("exact", "fast", "oracle", "random"), default="exact")
    p.add_argument("--seed", type=_seed, help="required with --method random")

    p = sub.add_parser("sweep", help="CSV sweep over the access probability")
    common(p)
    grid(p)

    p = sub.add_parser("bound", help="upper bound on the weighted recovery sum")
    common(p)

    p = sub.add_parser("threshold", help="access-probability threshold for a gap below epsilon")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)

    p = sub.add_parser("supernode", help="allocate over super-nodes given by 'capacities'")
    common(p)
    p.add_argument("--access", choices=("independent", "correlated"), default="independent")
    p.add_argument("--method", choices=("exact", "fast"), default="exact")

    p = sub.add_parser("simulate", help="Monte Carlo check of a solved allocation")
    common(p)
    p.add_argument("--method", choices=("exact", "fast", "oracle"), default="exact")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--trials", type=_positive_int, default=analysis.DEFAULT_TRIALS)

    p = sub.add_parser("presets", help="sweep a built-in instance")
    p.add_argument("name", choices=sorted(analysis.PRESETS))
    common(p, input_required=False)
    grid(p)
    return parser


def _load(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ProblemFormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ProblemFormatError(f"{path}: invalid JSON ({exc})") from None
    return problem_from_dict(doc)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


_SOLVERS = {"exact": solve_exact, "fast": solve_fast, "oracle": analysis.brute_force_msa}


def _solve(problem, method, seed=None):
    if method == "random":
        if seed is None:
            raise UsageError("--method random requires --seed")
        rng = analysis._streams(seed, 1)[0]
        counts = analysis.random_allocation(problem, rng)
        return make_report(counts, problem, "random", [f"seed {seed}"])
    return _SOLVERS[method](problem)


def _sweep(problem, args) -> str:
    if args.p_min > args.p_max:
        raise UsageError("--p-min must not exceed --p-max")
    if args.steps == 1 and args.p_min != args.p_max:
        raise UsageError("--steps 1 needs --p-min equal to --p-max")
    rows = analysis.sweep(problem, args.p_min, args.p_max, args.steps, args.seed, args.realizations)
    return analysis.sweep_csv(rows)


def render(args) -> str:
    """Produce the full output document for ``args`` without writing it."""
    cmd = args.command
    if cmd == "presets":
        return _sweep(analysis.preset(args.name), args)

    problem, capacities = _load(args.input)
    if cmd == "solve":
        return _json(_solve(problem, args.method, args.seed).to_dict())
    if cmd == "sweep":
        return _sweep(problem, args)
    if cmd == "bound":
        return _json({"bound": analysis.upper_bound(problem)})
    if cmd == "threshold":
        if args.epsilon <= 0:
            raise UsageError("--epsilon must be positive")
        th = analysis.gap_threshold_p(problem.weights, problem.node_count, args.epsilon)
        return _json(th.to_dict())
    if cmd == "supernode":
        if capacities is None:
            raise ProblemFormatError("supernode needs a 'capacities' array in the document")
        profile = CapacityProfile(capacities, args.access)
        if args.access == "independent":
            report = _SOLVERS[args.method](expand_independent(problem, profile))
            doc = {"access": "independent", "nodes": profile.total, "report": report.to_dict()}
        else:
            placement, report = solve_correlated(problem, profile)
            doc = {"access": "correlated", **placement.to_dict(), "report": report.to_dict()}
        doc["capacities"] = list(profile.capacities)
        return _json(doc)
    if cmd == "simulate":
        report = _solve(problem, args.method)
        placement = report.allocation.to_placement(problem.node_count)
        classes = []
        for i, row in enumerate(placement.placement):
            est, err = analysis.monte_carlo_recovery(
                row, problem.access_success, args.trials, seed=args.seed + i
            )
            classes.append(
                {
                    "nodes": report.counts[i],
                    "analytic": report.per_class_success[i],
                    "estimate": est,
                    "stderr": err,
                }
            )
        return _json({"method": report.method, "trials": args.trials, "classes": classes})
    raise UsageError(f"unknown command {cmd!r}")


def _write(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".msalloc-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text = render(args)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except TooLargeError as exc:
        print(f"too large: {exc}", file=sys.stderr)
        return EXIT_TOO_LARGE
    except (ProblemFormatError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    _write(text, args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
