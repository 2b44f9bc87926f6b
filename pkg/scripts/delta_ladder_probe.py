"""Probe Abel-regularization accuracy against ladder depth and stream length.

Usage: python scripts/delta_ladder_probe.py [stream] [phase_num/phase_den]

The damped sums carry delta^p and delta^p log(delta) error terms at a
cusp; the doubled Richardson schedule removes both, and this script shows
the achieved deviation from the smoothed reference as the ladder deepens
and as the stream gets longer (the tail needs delta_min * length >> 1).
"""

import sys

import mpmath
from gmpy2 import mpq

from aperylimits.lfunctions import (
    abel_regularized_twisted_sum,
    coefficient_stream,
    detect_root_number,
    fricke_data,
    lvalue_smoothed,
)


def main(argv):
    stream = argv[1] if len(argv) > 1 else "f6"
    phase = mpq(argv[2]) if len(argv) > 2 else mpq(0)
    scale = {"f7": "sqrt(7)", "f6": "sqrt(12)", "f4": "4"}.get(stream)
    ref = None
    if scale is not None and phase == 0:
        spec = fricke_data(stream, scale, 20000)
        spec.eps = detect_root_number(spec)
        ref = lvalue_smoothed(spec, 2, 30).to_mpc()
        print("smoothed reference:", mpmath.nstr(ref.real, 25))
    for length in (50000, 100000, 200000):
        coeffs = coefficient_stream(stream, length)
        for start, rungs in ((6, 4), (8, 5), (8, 7)):
            deltas = [mpq(1, 2 ** (start + j)) for j in range(rungs)]
            val = abel_regularized_twisted_sum(coeffs, phase, 2,
                                               deltas=deltas, prec_bits=256)
            with mpmath.workprec(280):
                dev = (mpmath.nstr(abs(val.to_mpc() - ref), 4)
                       if ref is not None else "-")
            print("N=%6d  deltas 2^-%d..2^-%d  value %s  bound %s  dev %s"
                  % (length, start, start + rungs - 1,
                     mpmath.nstr(val.to_mpc().real, 18),
                     mpmath.nstr(mpmath.mpf(val.bound), 3), dev))


if __name__ == "__main__":
    main(sys.argv)
