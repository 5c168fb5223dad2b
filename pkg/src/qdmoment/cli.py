"""Command-line front end: every verification as a subcommand.

Exit codes: 0 success, 1 tolerance failure, 2 usage error.
All floating-point output uses 17 significant digits so values round-trip.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from .arith import CharSpec, FactorTable, chi_8d
from .eulerprod import eval_product
from .lfun import check_fe_nonprimitive, l_central_afe, l_general_afe, l_oracle
from .moment import (
    MomentReport,
    build_constants,
    empirical_moment,
    predict_central,
    predict_general,
    report_rows_csv,
    report_rows_json,
    residual_report,
)

G = "{:.17g}".format


def _fmt_complex(z) -> dict:
    z = complex(z)
    return {"re": float(z.real), "im": float(z.imag)}


def _load_config(path: str | None) -> dict:
    """Simple key=value config file; later flags override these."""
    if not path:
        return {}
    out = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise SystemExit(f"bad config line: {line!r}")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


def _default_workers() -> int:
    return int(os.environ.get("QDMOMENT_WORKERS", "2"))


def _emit(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table_for(limit: int) -> FactorTable:
    return FactorTable(max(int(limit), 2_000))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_moment(args) -> int:
    X = float(args.X)
    table = _table_for(2 * X + 10)
    const = build_constants()
    s = 0.5 if args.s is None else complex(args.s)
    emp, count, secs = empirical_moment(
        X, table, s="central" if s == 0.5 else s, workers=args.workers)
    main, secondary = predict_central(X, const)
    from .moment import P2_of_logX
    import math
    denom = X ** (1.0 / 3.0) * P2_of_logX(math.log(X), const)
    emp_re = float(np.real(emp))
    row = MomentReport(X, s, emp_re, main, secondary,
                       emp_re - main - secondary,
                       (emp_re - main) / denom, count, secs)
    text = report_rows_csv([row]) if args.format == "csv" \
        else report_rows_json([row])
    header = f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}\n" \
        if args.format == "csv" else ""
    _emit(args, header + text)
    return 0


def cmd_predict(args) -> int:
    X = float(args.X)
    if args.s is None:
        const = build_constants()
        main, secondary = predict_central(X, const)
        payload = {"X": X, "s": 0.5, "main": main, "secondary": secondary,
                   "constants": {k: v for k, v in const.__dict__.items()}}
    else:
        terms = predict_general(complex(args.s), X)
        payload = {"X": X, "s": _fmt_complex(complex(args.s)),
                   **{k: _fmt_complex(v) for k, v in terms.items()}}
    _emit(args, json.dumps(payload, indent=2, default=float) + "\n")
    return 0


def cmd_residuals(args) -> int:
    xs = [float(x) for x in args.X_list.split(",")]
    table = _table_for(2 * max(xs) + 10)
    rows = residual_report(xs, table, workers=args.workers)
    if args.format == "csv":
        header = f"# generated {time.strftime('%Y-%m-%dT%H:%M:%S')}\n"
        _emit(args, header + report_rows_csv(rows))
    else:
        _emit(args, report_rows_json(rows))
    return 0


def cmd_check_fe(args) -> int:
    if args.kind == "s":
        from .mds import check_fe_s
        table = _table_for(16 * args.d_max)
        disc = check_fe_s(complex(args.s), complex(args.w), args.d_max,
                          table, workers=args.workers)
        tol = args.tolerance if args.tolerance else 1e-3
    else:
        chi = CharSpec("bottom", args.modulus)
        disc = check_fe_nonprimitive(complex(args.s), chi)
        tol = args.tolerance if args.tolerance else 1e-6
    payload = {"kind": args.kind, "discrepancy": disc, "tolerance": tol,
               "pass": disc < tol}
    _emit(args, json.dumps(payload, indent=2, default=float) + "\n")
    return 0 if disc < tol else 1


def cmd_check_identities(args) -> int:
    from .acceptance import (criterion_4, criterion_6, criterion_7,
                             criterion_8, criterion_9)
    table = FactorTable(2_600_000)
    suites = {
        "euler-recurrence": lambda: criterion_6(table),
        "b-decomposition": lambda: criterion_7(table),
        "cross-representation": lambda: criterion_4(table, args.workers),
        "residues": lambda: criterion_9(table, args.workers),
        "residue-w1": lambda: criterion_8(table, args.workers),
    }
    if args.suite not in suites:
        print(f"unknown suite {args.suite!r}; options: "
              f"{', '.join(sorted(suites))}", file=sys.stderr)
        return 2
    res = suites[args.suite]()
    print(res.line())
    return 0 if res.passed else 1


def cmd_euler(args) -> int:
    kw = {}
    if args.which == "PLemma52":
        if args.w is None:
            print("PLemma52 needs --w", file=sys.stderr)
            return 2
        kw["w"] = complex(args.w)
    v = eval_product(args.which, complex(args.s), int(float(args.p_max)),
                     accelerated=not args.naive, **kw)
    payload = {"which": args.which, "s": _fmt_complex(complex(args.s)),
               "value": _fmt_complex(v.value), "p_max": v.p_max,
               "tail_bound": v.tail_bound, "accelerated": v.accelerated}
    _emit(args, json.dumps(payload, indent=2, default=float) + "\n")
    return 0


def cmd_lvalue(args) -> int:
    s = 0.5 if args.s is None else complex(args.s)
    if args.method == "oracle":
        val = l_oracle(s, chi_8d(args.d))
    elif s == 0.5:
        val = l_central_afe(args.d)
    else:
        val = l_general_afe(s, args.d)
    payload = {"d": args.d, "s": _fmt_complex(s), "method": args.method,
               "value": _fmt_complex(val)}
    _emit(args, json.dumps(payload, indent=2, default=float) + "\n")
    return 0


def cmd_selftest(args) -> int:
    from .acceptance import run_all
    numbers = None
    if args.criteria:
        numbers = [int(x) for x in args.criteria.split(",")]
    results = run_all(numbers, workers=args.workers)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qdmoment",
        description="Verification toolkit for the first moment of the "
                    "quadratic Dirichlet L-function family chi_8d.")
    ap.add_argument("--config", help="key=value file with flag defaults")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("moment", help="empirical moment at one X")
    p.add_argument("--X", required=True)
    p.add_argument("--s", default=None)
    add_common(p)
    p.set_defaults(fn=cmd_moment)

    p = sub.add_parser("predict", help="predicted main/secondary terms")
    p.add_argument("--X", required=True)
    p.add_argument("--s", default=None,
                   help="general s for the four-term prediction")
    add_common(p)
    p.set_defaults(fn=cmd_predict)

    p = sub.add_parser("residuals", help="dyadic residual table")
    p.add_argument("--X-list", required=True,
                   help="comma-separated ascending X values")
    add_common(p)
    p.set_defaults(fn=cmd_residuals)

    p = sub.add_parser("check-fe", help="functional-equation checks")
    p.add_argument("--kind", choices=("s", "nonprimitive"), required=True)
    p.add_argument("--s", required=True)
    p.add_argument("--w", default=None)
    p.add_argument("--modulus", type=int, default=45)
    p.add_argument("--d-max", type=int, default=5_000)
    p.add_argument("--tolerance", type=float, default=None)
    add_common(p)
    p.set_defaults(fn=cmd_check_fe)

    p = sub.add_parser("check-identities", help="series identity suites")
    p.add_argument("--suite", required=True)
    add_common(p)
    p.set_defaults(fn=cmd_check_identities)

    p = sub.add_parser("euler", help="Euler product values")
    p.add_argument("--which", required=True,
                   choices=("P", "E", "Q", "Q2", "Qprod", "PLemma52"))
    p.add_argument("--s", required=True)
    p.add_argument("--w", default=None)
    p.add_argument("--p-max", default="1000000")
    p.add_argument("--naive", action="store_true")
    add_common(p)
    p.set_defaults(fn=cmd_euler)

    p = sub.add_parser("lvalue", help="L(s, chi_8d) one-off values")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s", default=None)
    p.add_argument("--method", choices=("afe", "oracle"), default="afe")
    add_common(p)
    p.set_defaults(fn=cmd_lvalue)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--criteria", help="comma-separated criterion numbers")
    add_common(p)
    p.set_defaults(fn=cmd_selftest)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    cfg = _load_config(args.config)
    if args.workers is None:
        args.workers = int(cfg.get("workers", _default_workers()))
    for key, val in cfg.items():
        if key != "workers" and hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, val)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
