"""Scan ratio-error decay for one case and compare fit windows.

Usage: python scripts/rate_scan.py [case_id] [N] [prec_bits]

Prints the error table (every tenth index), the fitted rate over the
registered window, and how stable the fit is under window shrinkage.
"""

import sys

import mpmath

from aperylimits.limits import (
    DEFAULT_N,
    DEFAULT_PREC,
    expected_limit_value,
    fit_rate,
    sequence_ratios,
)
from aperylimits.registry import load_case


def main(argv):
    cid = argv[1] if len(argv) > 1 else "zeta3"
    case = load_case(cid)
    N = int(argv[2]) if len(argv) > 2 else DEFAULT_N.get(cid, 200)
    prec = int(argv[3]) if len(argv) > 3 else DEFAULT_PREC.get(cid, 256)
    model = case.expected_rate["model"]
    ratios = sequence_ratios(case, N, prec)
    lo, hi = case.fit_window or (max(1, N // 10), N)
    hi = min(hi, N)
    with mpmath.workprec(prec + 32):
        target = expected_limit_value(case.expected_limit, prec)
        print("case %s  model %s  target %s" % (cid, model,
                                                mpmath.nstr(target, 20)))
        print("%6s  %s" % ("n", "|b_n/a_n - target|"))
        step = max(1, (hi - lo) // 12)
        for n in range(lo, hi + 1, step):
            print("%6d  %s" % (n, mpmath.nstr(abs(ratios[n] - target), 6)))
        print()
        for frac in (1.0, 0.5, 0.25):
            w_lo = hi - max(20, int((hi - lo) * frac))
            w_lo = max(lo, w_lo)
            fit = fit_rate(ratios, target, model, window=(w_lo, hi),
                           prec_bits=prec)
            print("window [%d, %d]: %s" % (w_lo, hi, fit))


if __name__ == "__main__":
    main(sys.argv)
