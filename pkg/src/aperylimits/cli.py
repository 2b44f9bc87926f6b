"""Command-line front end: verify cases, check identities, dump data.

Exit codes are a stable contract: 0 all checks pass, 1 a check failed
(report still written), 2 usage error.
"""

import argparse
import csv
import json
import sys
import threading
import time
from concurrent.futures import ThreadPoolExecutor

from . import lfunctions, limits
from .operators import run_sequences
from .registry import case_ids, load_case

# the multiprecision float context is process-global, so the numeric core
# of each worker serializes on this lock; threads still overlap report
# assembly and any I/O
_NUMERIC_LOCK = threading.Lock()

STABILIZER_CHECKS = (
    ("zeta2_f", (1, 0, 5, 1)),
    ("f6", (7, -3, 12, -5)),
)


def build_parser():
    p = argparse.ArgumentParser(
        prog="apery",
        description="verify modular-form limit cases, L-value identities, "
                    "and dump exact series data")
    sub = p.add_subparsers(dest="command")

    pv = sub.add_parser("verify", help="run one case (or all) end to end")
    pv.add_argument("--case", default="all",
                    help="case id or 'all' (default all)")
    pv.add_argument("--n", type=int, default=None,
                    help="sequence length; default is per-case")
    pv.add_argument("--digits", type=int, default=25,
                    help="report digits (default 25)")
    pv.add_argument("--prec-bits", type=int, default=None,
                    help="working precision; default is per-case")
    pv.add_argument("--format", default="json", choices=("json", "text"))
    pv.add_argument("--out", default=None, help="write report to this path")

    pi = sub.add_parser("identities",
                        help="stabilizer and residue-class L-value identities")
    pi.add_argument("--which", default="all",
                    choices=("all", "stabilizer", "mod12", "mod16"))
    pi.add_argument("--digits", type=int, default=8,
                    help="agreement tolerance 10^-digits (default 8)")
    pi.add_argument("--stream-length", type=int, default=200000)
    pi.add_argument("--format", default="json", choices=("json", "text"))
    pi.add_argument("--out", default=None)

    pd = sub.add_parser("dump", help="dump exact sequences or q-series")
    pd.add_argument("--case", required=True)
    pd.add_argument("--what", default="sequences",
                    choices=("sequences", "tseries", "aseries", "integrand"))
    pd.add_argument("--n", type=int, default=200)
    pd.add_argument("--format", default="json", choices=("json", "csv"))
    pd.add_argument("--out", default=None)
    return p


def _validate(args):
    if getattr(args, "n", None) is not None and args.n < 1:
        return "--n must be at least 1"
    if getattr(args, "digits", 25) < 6:
        return "--digits must be at least 6"
    pb = getattr(args, "prec_bits", None)
    if pb is not None and pb < 64:
        return "--prec-bits must be at least 64"
    return None


def _emit(payload, args):
    if args.format == "json":
        text = json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n"
    else:
        text = payload if isinstance(payload, str) else str(payload)
        if not text.endswith("\n"):
            text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _timestamp():
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


# --- verify --------------------------------------------------------------

def _run_one(cid, args):
    with _NUMERIC_LOCK:
        return limits.run_case(cid, N=args.n, prec_bits=args.prec_bits,
                               target_digits=args.digits)


def cmd_verify(args):
    known = case_ids()
    if args.case == "all":
        targets = known
    elif args.case in known:
        targets = [args.case]
    else:
        sys.stderr.write("unknown case id %r (known: %s)\n"
                         % (args.case, ", ".join(known)))
        return 2
    with ThreadPoolExecutor(max_workers=min(8, len(targets))) as pool:
        reports = list(pool.map(lambda c: _run_one(c, args), targets))
    payload = {"command": "verify", "generated_at": _timestamp(),
               "cases": reports,
               "pass": all(r["pass"] for r in reports)}
    if args.format == "text":
        lines = ["%-10s %-5s err=%-12s fit=%s %s"
                 % (r["case"], "pass" if r["pass"] else "FAIL",
                    r["abs_error"], r["fitted_rate"],
                    ("; ".join(str(f) for f in r["failures"])
                     if r["failures"] else ""))
                 for r in reports]
        _emit("\n".join(lines), args)
    else:
        _emit(payload, args)
    return 0 if payload["pass"] else 1


# --- identities ----------------------------------------------------------

def cmd_identities(args):
    tol = 10.0 ** (-args.digits)
    eval_digits = max(args.digits + 12, 20)
    checks = []
    ok = True
    if args.which in ("all", "stabilizer"):
        for stream, gamma in STABILIZER_CHECKS:
            with _NUMERIC_LOCK:
                rep = lfunctions.verify_stabilizer_identity(
                    stream, gamma, eval_digits,
                    stream_length=args.stream_length)
            dev = float(rep["max_pairwise_deviation"])
            entry = {"kind": "stabilizer", "stream": stream,
                     "gamma": list(gamma), "alpha": rep["alpha"],
                     "eps": str(rep["eps"]), "eps_star": str(rep["eps_star"]),
                     "L2": str(rep["L2"]), "L2_star": str(rep["L2_star"]),
                     "L_alpha": str(rep["L_alpha"]),
                     "max_pairwise_deviation": dev,
                     "ok": dev < tol}
            ok = ok and entry["ok"]
            checks.append(entry)
    for fam in ("mod12", "mod16"):
        if args.which in ("all", fam):
            with _NUMERIC_LOCK:
                rows = lfunctions.corollary_checks(
                    fam, eval_digits, stream_length=args.stream_length)
            for row in rows:
                err = float(row["abs_error"])
                entry = {"kind": fam, "identity": row["identity"],
                         "lhs": str(row["lhs"]), "rhs": str(row["rhs"]),
                         "abs_error": err, "method": row["method"],
                         "ok": err < tol}
                ok = ok and entry["ok"]
                checks.append(entry)
    payload = {"command": "identities", "which": args.which,
               "digits": args.digits, "generated_at": _timestamp(),
               "checks": checks, "pass": ok}
    if args.format == "text":
        lines = ["%-12s %-28s dev=%-12.3e %s"
                 % (c["kind"],
                    c.get("identity", c.get("stream", "")),
                    c.get("abs_error", c.get("max_pairwise_deviation", 0.0)),
                    "ok" if c["ok"] else "FAIL")
                 for c in checks]
        _emit("\n".join(lines), args)
    else:
        _emit(payload, args)
    return 0 if ok else 1


# --- dump ----------------------------------------------------------------

def _series_rows(series, n_cap):
    lo = int(series.lead_exp)
    hi = min(int(series.abs_order), n_cap)
    rows = []
    for e in range(lo, hi + 1):
        c = series.coefficient(e)
        if c is not None:
            rows.append((e, str(c)))
    return rows


def cmd_dump(args):
    known = case_ids()
    if args.case not in known:
        sys.stderr.write("unknown case id %r (known: %s)\n"
                         % (args.case, ", ".join(known)))
        return 2
    case = load_case(args.case)
    with _NUMERIC_LOCK:
        if args.what == "sequences":
            pair = run_sequences(case.recurrence(), args.n)
            rows = [(n, str(pair.a[n]), str(pair.b[n]))
                    for n in range(args.n + 1)]
            payload = {"command": "dump", "case": case.id,
                       "what": "sequences", "n": args.n,
                       "generated_at": _timestamp(),
                       "a": [r[1] for r in rows], "b": [r[2] for r in rows]}
            header = ("n", "a_n", "b_n")
        else:
            if args.what == "tseries":
                series = case.t_series(args.n)
            elif args.what == "aseries":
                series = case.A_series(args.n)
            else:
                series = case.integrand_closed_form(args.n)
            rows = _series_rows(series, args.n)
            payload = {"command": "dump", "case": case.id,
                       "what": args.what, "n": args.n,
                       "generated_at": _timestamp(),
                       "exponents": [r[0] for r in rows],
                       "coefficients": [r[1] for r in rows]}
            header = ("exponent", "coefficient")
    if args.format == "csv":
        out = sys.stdout if not args.out else open(args.out, "w", newline="")
        try:
            w = csv.writer(out)
            w.writerow(header)
            w.writerows(rows)
        finally:
            if args.out:
                out.close()
    else:
        _emit(payload, args)
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    problem = _validate(args)
    if problem:
        sys.stderr.write(problem + "\n")
        return 2
    try:
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "identities":
            return cmd_identities(args)
        return cmd_dump(args)
    except OSError as exc:
        sys.stderr.write("i/o failure: %s\n" % exc)
        return 2


if __name__ == "__main__":
    sys.exit(main())
