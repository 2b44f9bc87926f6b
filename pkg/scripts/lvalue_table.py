"""Tabulate the smoothed L(2) values with detected root numbers, next to
the limit each sequence converges to.

Usage: python scripts/lvalue_table.py [digits]
"""

import sys

import mpmath

from aperylimits.lfunctions import (
    detect_root_number,
    fe_residual,
    fricke_data,
    lvalue_smoothed,
)
from aperylimits.limits import estimate_limit, expected_limit_value

FORMS = (
    ("f7", "sqrt(7)"),
    ("f6", "sqrt(12)"),
    ("f4", "4"),
)

SEQUENCE_CASES = ("l2f7", "l2f6")


def main(argv):
    digits = int(argv[1]) if len(argv) > 1 else 25
    for name, scale in FORMS:
        spec = fricke_data(name, scale, 40000)
        spec.eps = detect_root_number(spec)
        val = lvalue_smoothed(spec, 2, digits)
        res = fe_residual(spec, digits)
        print("%-4s eps=%-8s L(2) = %s   (law residual %s)"
              % (name, "%+g%+gi" % (spec.eps.real, spec.eps.imag),
                 mpmath.nstr(val.to_mpc().real, digits),
                 mpmath.nstr(res, 3)))
    print()
    for cid in SEQUENCE_CASES:
        est = estimate_limit(cid)
        with mpmath.workprec(300):
            print("%-5s  b_n/a_n -> %s   |gap to target| = %s"
                  % (cid, mpmath.nstr(est.value, digits),
                     mpmath.nstr(est.error_vs_target, 3)))


if __name__ == "__main__":
    main(sys.argv)
