"""Arbitrary-precision evaluation in the upper half-plane.

Eichler integrals are evaluated as plain q-series sum c_n/n^order q^n with a
certified geometric tail bound derived from |c_n| <= C n^sigma; the term
count always comes from the bound, never from a fixed cutoff.  The module
also provides the classical constants the limit targets are built from and
the Lambert-type sum of the closed evaluation at q = -e^{-pi/sqrt(3)}.
"""

import re as _re

import mpmath
from gmpy2 import mpq, mpz

from .series import theta_q

GUARD_BITS = 32


def digits_to_bits(digits):
    return int(digits * 3.3219280948873626) + GUARD_BITS


class HPComplex:
    """Complex value pinned to a working precision.

    bound, when set, is the certified truncation error of the series
    evaluation that produced the value (rounding is controlled separately
    by guard bits and is not tracked per operation).
    """

    __slots__ = ("re", "im", "prec_bits", "bound")

    def __init__(self, re, im=0, prec_bits=53, bound=None):
        self.prec_bits = int(prec_bits)
        with mpmath.workprec(self.prec_bits + GUARD_BITS):
            self.re = mpmath.mpf(re)
            self.im = mpmath.mpf(im)
        self.bound = bound

    @classmethod
    def from_mpc(cls, z, prec_bits, bound=None):
        return cls(z.real, z.imag, prec_bits, bound)

    def to_mpc(self):
        # constructors round to the ambient precision, so pin it first
        with mpmath.workprec(self.prec_bits + GUARD_BITS):
            return mpmath.mpc(self.re, self.im)

    def __abs__(self):
        with mpmath.workprec(self.prec_bits + GUARD_BITS):
            return mpmath.hypot(self.re, self.im)

    def __add__(self, other):
        other = _as_hp(other, self.prec_bits)
        prec = max(self.prec_bits, other.prec_bits)
        bound = _merge_bounds(self.bound, other.bound)
        with mpmath.workprec(prec + GUARD_BITS):
            return HPComplex(self.re + other.re, self.im + other.im, prec, bound)

    def __sub__(self, other):
        other = _as_hp(other, self.prec_bits)
        prec = max(self.prec_bits, other.prec_bits)
        bound = _merge_bounds(self.bound, other.bound)
        with mpmath.workprec(prec + GUARD_BITS):
            return HPComplex(self.re - other.re, self.im - other.im, prec, bound)

    def __repr__(self):
        return "HPComplex(%s, %s, prec_bits=%d)" % (self.re, self.im, self.prec_bits)


def _as_hp(x, prec_bits):
    if isinstance(x, HPComplex):
        return x
    with mpmath.workprec(prec_bits + GUARD_BITS):
        z = _as_mpc(x)
        return HPComplex(z.real, z.imag, prec_bits)


def _merge_bounds(b1, b2):
    if b1 is None and b2 is None:
        return None
    return (b1 or 0) + (b2 or 0)


def _as_mpc(tau):
    """Convert to mpc; call under the intended working precision, since
    mpmath constructors round to whatever precision is ambient."""
    if isinstance(tau, HPComplex):
        return tau.to_mpc()
    if isinstance(tau, mpmath.mpc):
        return tau
    return mpmath.mpc(tau)


def cusp_exponential(tau, prec_bits):
    """q = e^{2 pi i tau} through the real exp/cos/sin decomposition."""
    with mpmath.workprec(prec_bits + GUARD_BITS):
        tau = _as_mpc(tau)
        two_pi = 2 * mpmath.pi
        radius = mpmath.exp(-two_pi * tau.imag)
        angle = two_pi * tau.real
        return mpmath.mpc(radius * mpmath.cos(angle), radius * mpmath.sin(angle))


_INT_LITERAL = _re.compile(r"(?<![\w.])(\d+)(?![\w.])")


def parse_point(expr, prec_bits):
    """Evaluate a point expression like 'i/sqrt(6)' or '(3+i*sqrt(3))/6'.

    Integer literals are promoted to arbitrary precision before any
    division happens, so rational pieces keep full accuracy.
    """
    with mpmath.workprec(prec_bits + GUARD_BITS):
        promoted = _INT_LITERAL.sub(r"__int('\1')", expr)
        namespace = {
            "__int": lambda s: mpmath.mpf(int(s)),
            "i": mpmath.mpc(0, 1),
            "sqrt": mpmath.sqrt,
            "pi": mpmath.pi,
            "__builtins__": {},
        }
        return mpmath.mpc(eval(promoted, namespace))


class EichlerSeries:
    """Integer coefficient stream c_n with the divided-power sum in mind.

    order is the power of n dividing each term of the iterated integral;
    coeff_bound = (C, sigma) certifies |c_n| <= C n^sigma and is re-verified
    whenever the stream is extended.
    """

    def __init__(self, coeffs, order, coeff_bound=None):
        # coeffs[n] is c_n; index 0 must be zero (no constant term)
        self.coeffs = [mpz(c) for c in coeffs]
        if self.coeffs and self.coeffs[0] != 0:
            raise ValueError("Eichler stream must have no constant term")
        self.order = int(order)
        if coeff_bound is None:
            coeff_bound = self._default_bound(self.order)
        self.coeff_bound = coeff_bound
        self._verify_bound()

    @classmethod
    def from_qseries(cls, f, order, sigma=None):
        f = f.normalized()
        if f.lead_exp != int(f.lead_exp) or f.lead_exp < 1:
            raise ValueError("series must vanish at q = 0 with integer exponents")
        lead = int(f.lead_exp)
        coeffs = [mpz(0)] * lead
        for c in f.coeffs:
            if c.denominator != 1:
                raise ValueError("Eichler stream requires integer coefficients")
            coeffs.append(mpz(c))
        return cls(coeffs, order, None if sigma is None
                   else cls._bound_for(coeffs, sigma))

    def _default_bound(self, sigma):
        return self._bound_for(self.coeffs, sigma)

    @staticmethod
    def _bound_for(coeffs, sigma):
        C = mpq(1)
        for n in range(1, len(coeffs)):
            ratio = mpq(abs(coeffs[n]), mpz(n) ** sigma)
            if ratio > C:
                C = ratio
        return (C, sigma)

    def _verify_bound(self):
        C, sigma = self.coeff_bound
        for n in range(1, len(self.coeffs)):
            if abs(self.coeffs[n]) > C * mpq(n) ** sigma:
                raise ValueError("coefficient bound violated at n = %d" % n)

    def extend(self, more):
        self.coeffs.extend(mpz(c) for c in more)
        C, sigma = self.coeff_bound
        self.coeff_bound = self._bound_for(self.coeffs, sigma)
        self._verify_bound()

    def known_through(self):
        return len(self.coeffs) - 1

    def theta_derivative(self):
        """Same stream viewed with one less power of n dividing each term."""
        if self.order < 2:
            raise ValueError("already at order 1")
        C, sigma = self.coeff_bound
        return EichlerSeries(self.coeffs, self.order - 1, (C, sigma))


def _tail_bound(C, excess, absq, M):
    """Upper bound for sum_{n>M} C n^excess absq^n, or inf if not provable."""
    if absq >= 1:
        return mpmath.inf
    if excess <= 0:
        return C * absq ** (M + 1) / (1 - absq)
    r = absq * (1 + mpmath.mpf(1) / (M + 1)) ** excess
    if r >= 1:
        return mpmath.inf
    return C * mpmath.mpf(M + 1) ** excess * absq ** (M + 1) / (1 - r)


def eichler_eval(E, tau, target_digits):
    """Sum c_n / n^order q^n at q = e^{2 pi i tau}, certified tail bound.

    Raises if tau is not in the upper half-plane or the materialized stream
    is too short for the requested accuracy.
    """
    prec_bits = digits_to_bits(target_digits)
    with mpmath.workprec(prec_bits + GUARD_BITS):
        tau = _as_mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        tol = mpmath.mpf(10) ** (-target_digits)
        absq = mpmath.exp(-2 * mpmath.pi * tau.imag)
        C, sigma = E.coeff_bound
        C = mpmath.mpf(int(C.numerator)) / mpmath.mpf(int(C.denominator))
        excess = sigma - E.order
        # rough solve of C r^M = tol, then certify and adjust
        M = max(8, int(mpmath.log(tol / (C + 1)) / mpmath.log(absq)) + 2)
        while _tail_bound(C, excess, absq, M) > tol:
            M *= 2
            if M > 10 ** 9:
                raise ValueError("tail bound unattainable at this tau")
        while M > 8 and _tail_bound(C, excess, absq, M - 1) <= tol:
            M -= 1
        if M > E.known_through():
            raise ValueError(
                "stream has %d coefficients but the bound needs %d"
                % (E.known_through(), M))
        q = cusp_exponential(tau, prec_bits)
        acc = mpmath.mpc(0)
        for n in range(M, 0, -1):
            c = E.coeffs[n]
            if c:
                acc += mpmath.mpf(int(c)) / mpmath.mpf(n) ** E.order
            if n > 1:
                acc *= q
        acc *= q
        bound = _tail_bound(C, excess, absq, M)
    return HPComplex(acc.real, acc.imag, prec_bits, bound=bound)


def qseries_eval(f, tau, prec_bits):
    """Evaluate a truncated q-expansion at tau, all materialized terms.

    Fractional exponents use q^e = e^{2 pi i e tau}, the natural branch on
    the upper half-plane.  No certified bound: the last included term is
    returned as a heuristic error scale via the .bound field.
    """
    with mpmath.workprec(prec_bits + GUARD_BITS):
        tau = _as_mpc(tau)
        if not tau.imag > 0:
            raise ValueError("tau must lie in the upper half-plane")
        q = cusp_exponential(tau, prec_bits)
        acc = mpmath.mpc(0)
        for i in range(len(f.coeffs) - 1, -1, -1):
            c = f.coeffs[i]
            if c:
                acc += mpmath.mpf(int(c.numerator)) / mpmath.mpf(int(c.denominator))
            if i > 0:
                acc *= q
        last = abs(acc) * 0
        if f.coeffs:
            tail_c = f.coeffs[-1]
            last = (abs(mpmath.mpf(int(tail_c.numerator))) /
                    mpmath.mpf(int(tail_c.denominator))) * abs(q) ** len(f.coeffs)
        if f.lead_exp != 0:
            e = f.lead_exp
            phase = mpmath.mpc(2 * mpmath.pi * tau * mpmath.mpf(int(e.numerator))
                               / mpmath.mpf(int(e.denominator)) * mpmath.mpc(0, 1))
            acc *= mpmath.exp(phase)
        return HPComplex(acc.real, acc.imag, prec_bits, bound=last)


def elliptic_point_value(integrand, A, order, mode, tau_expr, target_digits):
    """Value of the Eichler integral at an elliptic fixed point.

    mode 'direct' sums the series at the point.  mode 'branch_corrected'
    applies the order-two branch-point correction E + A theta_q E / theta_q A
    (from requiring B - cA to lie in the non-analytic branch, B = A E).
    """
    prec_bits = digits_to_bits(target_digits)
    tau = parse_point(tau_expr, prec_bits)
    E = EichlerSeries.from_qseries(integrand, order)
    value = eichler_eval(E, tau, target_digits)
    if mode == "direct":
        return value
    if mode != "branch_corrected":
        raise ValueError("unknown elliptic evaluation mode %r" % (mode,))
    dE = E.theta_derivative()
    dE_val = eichler_eval(dE, tau, target_digits)
    with mpmath.workprec(prec_bits + GUARD_BITS):
        A_val = qseries_eval(A, tau, prec_bits).to_mpc()
        dA_val = qseries_eval(theta_q(A), tau, prec_bits).to_mpc()
        corrected = value.to_mpc() + A_val * dE_val.to_mpc() / dA_val
    bound = _merge_bounds(value.bound, dE_val.bound)
    return HPComplex(corrected.real, corrected.imag, prec_bits, bound=bound)


_CONSTANT_NAMES = ("pi", "zeta2", "zeta3", "L2_chi3", "L2_chi_minus1")


def constants(name, prec_bits):
    """Classical constants at the requested precision.

    Dirichlet L-values go through the Hurwitz-zeta decomposition
    L(2, chi) = m^{-2} sum_r chi(r) zeta(2, r/m).
    """
    if name not in _CONSTANT_NAMES:
        raise ValueError("unknown constant %r" % (name,))
    with mpmath.workprec(prec_bits + GUARD_BITS):
        if name == "pi":
            value = +mpmath.pi
        elif name == "zeta2":
            value = mpmath.pi ** 2 / 6
        elif name == "zeta3":
            value = mpmath.zeta(3)
        elif name == "L2_chi3":
            value = (mpmath.zeta(2, mpmath.mpf(1) / 3)
                     - mpmath.zeta(2, mpmath.mpf(2) / 3)) / 9
        else:
            value = (mpmath.zeta(2, mpmath.mpf(1) / 4)
                     - mpmath.zeta(2, mpmath.mpf(3) / 4)) / 16
        return +value


def chi3(n):
    r = n % 3
    return 1 if r == 1 else (-1 if r == 2 else 0)


def ramanujan_sum(x, target_digits):
    """sum_{n>=1} chi3(n) x^n / (n^2 (1 - x^n)) for |x| < 1, certified tail."""
    prec_bits = digits_to_bits(target_digits)
    with mpmath.workprec(prec_bits + GUARD_BITS):
        x = _as_mpc(x)
        ax = abs(x)
        if not ax < 1:
            raise ValueError("x must lie strictly inside the unit disk")
        tol = mpmath.mpf(10) ** (-target_digits)
        # |term_n| <= |x|^n / (n^2 (1-|x|)); geometric tail past M
        M = 8
        def tail(M):
            return ax ** (M + 1) / ((1 - ax) ** 2 * (M + 1) ** 2)
        while tail(M) > tol:
            M *= 2
            if M > 10 ** 9:
                raise ValueError("tail bound unattainable for this x")
        while M > 8 and tail(M - 1) <= tol:
            M -= 1
        acc = mpmath.mpc(0)
        xn = mpmath.mpc(1)
        for n in range(1, M + 1):
            xn *= x
            c = chi3(n)
            if c:
                acc += c * xn / (mpmath.mpf(n) ** 2 * (1 - xn))
        bound = tail(M)
    return HPComplex(acc.real, acc.imag, prec_bits, bound=bound)
