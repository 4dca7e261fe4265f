"""``dipstr`` command line: ``lr``, ``sweep``, ``validate`` and ``stats``.

Exit codes: 0 success, 2 input error, 3 model error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Optional, Sequence

from .errors import InputError, ModelError
from .genetics import AlleleDatabase, augment
from .io import format_record, read_cases, read_database, write_sweep_csv
from .lr import Method, combine_loci, compute_lr, empirical_k_hat, empirical_k_hat_raw, sensitivity_sweep
from .oracle import ValidationInstance, builtin_instances, validate_instance
from .posterior import PriorConfig, parse_k_prior, side_stats

EXIT_OK, EXIT_INPUT, EXIT_MODEL, EXIT_VALIDATION = 0, 2, 3, 4


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(message)


def parse_methods(text: str) -> list[Method]:
    methods = [Method.parse(x) for x in text.split(",") if x.strip()]
    if not methods:
        raise InputError("no method given")
    return methods


def parse_alpha_grid(text: str) -> list[float]:
    """``start:stop:step`` (inclusive of stop) or a comma-separated list."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise InputError(f"grid step must be positive: {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [round(start + i * step, 12) for i in range(max(count, 0))]
        else:
            values = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"malformed alpha grid {text!r}") from None
    if not values:
        raise InputError(f"alpha grid {text!r} is empty")
    return values


def parse_m_grid(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"malformed m grid {text!r}") from None
    if not values:
        raise InputError(f"m grid {text!r} is empty")
    return values


def _load_databases(specs: Optional[list[str]]):
    """``--db PATH`` applies to every locus; ``--db LOCUS=PATH`` to one."""
    default, per_locus = None, {}
    for spec in specs or []:
        locus, sep, path = spec.partition("=")
        if sep and path:
            per_locus[locus] = read_database(path)
        else:
            default = read_database(spec)

    def lookup(locus: str) -> AlleleDatabase:
        if locus in per_locus:
            return per_locus[locus]
        if default is None:
            raise InputError(f"no database given for locus {locus!r}")
        return default

    return lookup


def _prior(args) -> PriorConfig:
    return PriorConfig(args.m, args.alpha, parse_k_prior(args.k_prior))


def cmd_lr(args, out) -> int:
    prior = _prior(args)
    methods = parse_methods(args.method)
    cases = read_cases(args.case)
    db_for = _load_databases(args.db)
    for method in methods:
        results = []
        for case in cases:
            result = compute_lr(case, db_for(case.locus), prior, method)
            results.append(result)
            print(format_record(result, prior), file=out)
        if len(results) > 1:
            print(format_record(combine_loci(results), prior), file=out)
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    alphas = parse_alpha_grid(args.alpha_grid) if args.alpha_grid else [args.alpha]
    m_values = parse_m_grid(args.m_grid) if args.m_grid else [args.m]
    priors = [parse_k_prior(p) for p in (args.k_prior_list or [args.k_prior])]
    methods = parse_methods(args.method)
    cases = read_cases(args.case)
    if len(cases) != 1:
        raise InputError("sweep takes a single-locus case file")
    case = cases[0]
    rows = sensitivity_sweep(case, _load_databases(args.db)(case.locus), alphas, m_values,
                             priors, methods)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_sweep_csv(rows, fh)
    else:
        write_sweep_csv(rows, out)
    return EXIT_OK


def cmd_validate(args, out) -> int:
    instances = builtin_instances()
    if args.case:
        db_for = _load_databases(args.db) if args.db else (lambda _locus: AlleleDatabase())
        for case in read_cases(args.case):
            instances.append(ValidationInstance(f"user:{case.locus or 'case'}", case,
                                                db_for(case.locus), _prior(args)))
    header = ("quantity", "closed_form", "estimate", "std_error", "ess", "verdict")
    print("\t".join(header), file=out)
    all_pass = True
    for inst in instances:
        row = validate_instance(inst, args.samples, args.seed)
        all_pass &= row.verdict == "PASS"
        print("\t".join([row.quantity, format(row.closed_form, ".6g"), format(row.estimate, ".6g"),
                         format(row.std_error, ".3g"), format(row.ess, ".1f"), row.verdict]),
              file=out)
    print("overall: " + ("PASS" if all_pass else "FAIL"), file=out)
    return EXIT_OK if all_pass else EXIT_VALIDATION


def cmd_stats(args, out) -> int:
    db_for = _load_databases(args.db)
    for case in read_cases(args.case):
        adb = augment(db_for(case.locus), case.suspect, case.victim)
        print(f"locus: {case.locus or '-'}", file=out)
        print(f"n: {adb.n}", file=out)
        for dip in ("L", "S"):
            print(f"n_{dip}: {adb.n_side(dip)}", file=out)
            print(f"k_b_{dip}: {adb.k_b(dip)}", file=out)
            print(f"n1_{dip}: {adb.n1(dip)}", file=out)
            counts = " ".join(f"{a}:{c}" for a, c in adb.counts(dip).items())
            print(f"counts_{dip}: {counts}", file=out)
            if adb.n_side(dip):
                stats = side_stats(adb, dip)
                raw = empirical_k_hat_raw(stats, args.alpha)
                k_hat = empirical_k_hat(stats, args.alpha, args.m)
                print(f"k_hat_{dip}: {k_hat} (raw {raw:.6g})", file=out)
            else:
                print(f"k_hat_{dip}: -", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="dipstr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def common(p, need_case=True):
        p.add_argument("--db", action="append", metavar="[LOCUS=]PATH",
                       help="allele database, one label per line (repeatable)")
        p.add_argument("--case", required=need_case, help="JSON case file")
        p.add_argument("--alpha", type=float, default=1.0)
        p.add_argument("--m", type=int, default=100)
        p.add_argument("--k-prior", default="uniform",
                       help="uniform | poisson:<lam> | negbin:<r>,<p> | fixed:<k0>")

    p = sub.add_parser("lr", help="likelihood ratio per locus and method")
    common(p)
    p.add_argument("--method", default="full", help="comma list of full, plugin, gt")
    p.set_defaults(func=cmd_lr)

    p = sub.add_parser("sweep", help="log10 LR over alpha / m / prior grids, as CSV")
    common(p)
    p.add_argument("--method", default="full,plugin,gt")
    p.add_argument("--alpha-grid", help="start:stop:step or comma list")
    p.add_argument("--m-grid", help="comma list of m values")
    p.add_argument("--k-prior-grid", dest="k_prior_list", action="append",
                   help="additional prior per occurrence; replaces --k-prior")
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="check closed forms against importance sampling")
    common(p, need_case=False)
    p.set_defaults(m=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="augmented-database summary counts")
    common(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_INPUT
    except ModelError as exc:
        print(f"model error: {exc}", file=err)
        return EXIT_MODEL


if __name__ == "__main__":
    sys.exit(main())
