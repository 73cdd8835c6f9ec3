"""Command-line interface.

Exit codes: 0 success, 1 suite failure, 2 usage or input error, 3 budget
exhausted (or undecided instances) with no failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import bounds, harness
from .enumeration import DEFAULT_EVAL_BUDGET, count_all, count_zeros, find_nonsingular
from .errors import BudgetExceededError, NonsingularError, SlicesExhaustedError
from .field import parse_field
from .irreducible import DEFAULT_SEARCH_BUDGET
from .poly import parse_poly
from .slicing import (SliceVector, classify_slice, find_nonsingular_via_slicing,
                      sample_bad_slice_fraction, slice_poly)

SEED_ENV = "NONSINGULAR_SEED"
EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_UNDECIDED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--budget-evals", type=int, default=DEFAULT_EVAL_BUDGET)
    common.add_argument("--budget-search", type=int, default=DEFAULT_SEARCH_BUDGET,
                        help="candidate-divisor budget for irreducibility tests")
    common.add_argument("--json", metavar="PATH", help="also write the JSON report here")
    common.add_argument("--timing", action="store_true", help="include wall-clock times")

    poly_args = argparse.ArgumentParser(add_help=False)
    poly_args.add_argument("--field", required=True, help="p or p^k")
    poly_args.add_argument("--nvars", type=int, required=True)
    poly_args.add_argument("--poly", required=True, help='e.g. "x0*x2 - x1^2"')

    p = argparse.ArgumentParser(prog="nonsingular",
                                description="Point counts and non-singular zeros over finite fields.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", parents=[common], help="thresholds and bound right-hand sides")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--e", type=int, default=0)
    b.add_argument("--q", type=int)
    b.add_argument("--n", type=int)

    c = sub.add_parser("count", parents=[common, poly_args], help="exhaustive zero counts")
    c.add_argument("--mode", choices=["affine", "projective", "all"], default="all")
    c.add_argument("--h", dest="hpoly", help="second form H for S2")

    f = sub.add_parser("find-nonsingular", parents=[common, poly_args],
                       help="find a certified non-singular zero")
    f.add_argument("--h", dest="hpoly", help="require H(x) != 0")
    f.add_argument("--via-slicing", action="store_true")
    f.add_argument("--max-slices", type=int, default=50)

    s = sub.add_parser("slice", parents=[common, poly_args], help="slice a polynomial by a plane")
    s.add_argument("--xi", type=_int_list, help="slice vector as comma-separated field codes")
    s.add_argument("--trials", type=int, help="estimate the bad-slice fraction over this many slices")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=harness.SUITES)
    v.add_argument("--d", type=int, default=2)
    v.add_argument("--d2", type=int, help="second degree for lemma-bounds (default: d)")
    v.add_argument("--e", type=int, default=1)
    v.add_argument("--n", "--nvars", dest="n", type=int, default=3)
    v.add_argument("--q", type=_int_list, required=True, help="field order(s), comma-separated")
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--mode", choices=["direct", "via-slicing"], default="direct")
    v.add_argument("--max-slices", type=int, default=50)
    v.add_argument("--exhaustive", action="store_true")
    v.add_argument("--exploratory", action="store_true",
                   help="allow q below the threshold; missing witnesses are recorded only")
    v.add_argument("--csv", metavar="PATH", help="also write a CSV projection")

    g = sub.add_parser("gen", parents=[common], help="sample random forms")
    g.add_argument("--field", required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--n", "--nvars", dest="n", type=int, default=3)
    g.add_argument("--e", type=int, default=0)
    g.add_argument("--constraint", choices=["any", "absolutely-irreducible", "pair"], default="any")
    g.add_argument("--samples", type=int, default=1)
    return p


def _emit(doc: dict, args) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")


def _poly(args, text=None):
    spec = parse_field(args.field)
    return parse_poly(text if text is not None else args.poly, spec, args.nvars)


def cmd_bounds(args) -> int:
    doc = bounds.threshold_report(args.d, args.e).to_dict()
    if args.q is not None:
        doc["q"] = args.q
        doc["thm2_satisfied"] = bounds.thm2_satisfied(args.q, args.d, args.e)
        doc["thm3_satisfied"] = bounds.thm3_satisfied(args.q, args.d)
        doc["leep_yeomans_lower"] = bounds.leep_yeomans_lower(args.d, args.q)
        if args.n is not None:
            doc["n"] = args.n
            doc["cafure_matera_rhs"] = bounds.cafure_matera_rhs(args.d, args.n, args.q).to_dict()
    _emit(doc, args)
    return EXIT_OK


def cmd_count(args) -> int:
    F = _poly(args)
    H = _poly(args, args.hpoly) if args.hpoly else None
    kw = {"threads": args.threads, "budget_evals": args.budget_evals}
    if args.mode == "all":
        rep = count_all(F, H, **kw)
    else:
        rep = count_zeros(F, args.mode, **kw)
    doc = {"poly": str(F), "field": F.spec.designator, **rep.to_dict(timing=args.timing)}
    if H is not None:
        doc["H"] = str(H)
    _emit(doc, args)
    return EXIT_OK


def cmd_find(args) -> int:
    F = _poly(args)
    H = _poly(args, args.hpoly) if args.hpoly else None
    doc = {"poly": str(F), "field": F.spec.designator}
    if args.via_slicing:
        if H is not None:
            raise UsageError("--h cannot be combined with --via-slicing")
        try:
            w = find_nonsingular_via_slicing(F, seed=_seed(args), max_slices=args.max_slices,
                                             budget=args.budget_search,
                                             budget_evals=args.budget_evals, threads=args.threads)
        except SlicesExhaustedError as exc:
            doc.update(witness=None, slices_tried=exc.slices_tried, bad_slices=exc.bad,
                       undecided_slices=exc.undecided)
            _emit(doc, args)
            return EXIT_UNDECIDED
    else:
        w = find_nonsingular(F, H, threads=args.threads, budget_evals=args.budget_evals)
    doc["witness"] = w.to_dict() if w is not None else None
    _emit(doc, args)
    return EXIT_OK if w is not None else EXIT_FAIL


def cmd_slice(args) -> int:
    F = _poly(args)
    doc = {"poly": str(F), "field": F.spec.designator}
    if args.trials is not None:
        rep = sample_bad_slice_fraction(F, args.trials, _seed(args), budget=args.budget_search)
        doc["bad_slices"] = rep.to_dict()
        _emit(doc, args)
        return EXIT_OK if rep.undecided == 0 else EXIT_UNDECIDED
    if args.xi is not None:
        xi = SliceVector.from_codes(F.spec, args.xi)
    else:
        xi = SliceVector.random(F.spec, F.nvars, np.random.default_rng(_seed(args)))
    sliced = slice_poly(F, xi)
    status = classify_slice(F, sliced, args.budget_search)
    doc.update(slice=xi.to_list(), sliced=str(sliced), classification=status)
    _emit(doc, args)
    return EXIT_UNDECIDED if status == "undecided" else EXIT_OK


def cmd_verify(args) -> int:
    seed, qs = _seed(args), args.q
    common = {"threads": args.threads, "budget_evals": args.budget_evals}
    search = {"search_budget": args.budget_search}
    single = qs[0]
    if args.suite in ("thm2", "thm3", "lemma-bounds", "chevalley-warning", "slicing-identity") \
            and len(qs) != 1:
        raise UsageError(f"suite {args.suite} takes a single --q")
    if args.suite == "thm2":
        run = harness.verify_thm2(args.d, args.e, args.n, single, args.samples, seed,
                                  exploratory=args.exploratory, **common, **search)
    elif args.suite == "thm3":
        run = harness.verify_thm3(args.d, args.n, single, args.samples, seed, args.mode,
                                  max_slices=args.max_slices, exploratory=args.exploratory,
                                  **common, **search)
    elif args.suite == "cafure-matera":
        run = harness.verify_cafure_matera(args.d, args.n, qs, args.samples, seed,
                                           exhaustive=args.exhaustive, **common, **search)
    elif args.suite == "leep-yeomans":
        run = harness.verify_leep_yeomans(args.d, qs, args.samples, seed, **common, **search)
    elif args.suite == "lemma-bounds":
        run = harness.verify_lemma_bounds(args.d, args.d2 or args.d, args.n, single,
                                          args.samples, seed, **common, **search)
    elif args.suite == "chevalley-warning":
        run = harness.verify_chevalley_warning(args.d, args.n, single, args.samples, seed, **common)
    else:
        run = harness.verify_slicing_identity(args.d, args.n, single, args.samples, seed,
                                              exhaustive=args.exhaustive, threads=args.threads)
    _emit(run.to_dict(timing=args.timing), args)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(run.to_csv())
    print(f"{run.suite}: pass={run.count('pass')} fail={run.count('fail')} "
          f"undecided={run.count('undecided')}", file=sys.stderr)
    return run.exit_code


def cmd_gen(args) -> int:
    spec = parse_field(args.field)
    seed = _seed(args)
    samples = []
    for i in range(args.samples):
        s = harness.gen_random_form(harness.RandomFormSpec(
            args.d, args.n, spec, args.constraint, [seed, i], e=args.e,
            search_budget=args.budget_search))
        item = {"index": i, "G": str(s.G), "rejections": s.rejections}
        if s.H is not None:
            item["H"] = str(s.H)
        samples.append(item)
    _emit({"field": spec.designator, "d": args.d, "n": args.n, "constraint": args.constraint,
           "seed": seed, "samples": samples}, args)
    return EXIT_OK


def _seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


COMMANDS = {"bounds": cmd_bounds, "count": cmd_count, "find-nonsingular": cmd_find,
            "slice": cmd_slice, "verify": cmd_verify, "gen": cmd_gen}


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (UsageError, NonsingularError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(cli_main())
