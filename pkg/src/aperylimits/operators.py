"""Theta-form differential operators and their exact recurrences.

An operator L = theta^order + t*P_1(theta) + ... + t^d*P_d(theta) acting on
power series in t translates into the recurrence

    m^order u_m + P_1(m-1) u_{m-1} + ... + P_d(m-d) u_{m-d} = rhs_m,

which this module runs exactly (gmpy2 rationals) or in a guarded
arbitrary-precision float path.  It also certifies the operator against a
(t(q), A(q)) pair in the q-variable and builds the associated integrand.
"""

import math

from gmpy2 import mpq
import mpmath

from .series import QSeries, theta_q, _q


# -- small exact polynomial helpers (coeff vectors, low degree first) ------


def poly_eval(coeffs, x):
    acc = _q(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_eval_int(coeffs, x):
    # integer-arithmetic evaluation (used by the float path; coeffs integral)
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def poly_shift(coeffs, s):
    """Coefficient vector of P(x + s)."""
    s = _q(s)
    out = [_q(0)] * len(coeffs)
    for i, c in enumerate(coeffs):
        c = _q(c)
        # expand c*(x+s)^i
        binom = 1
        power = _q(1)
        for j in range(i, -1, -1):
            out[j] += c * binom * power
            binom = binom * j // (i - j + 1)
            power *= s
    return out


def _trim(coeffs):
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


class ThetaOperator:
    """L = theta^order + sum_j t^j P_j(theta), P_0 = theta^order exactly."""

    def __init__(self, order, polys):
        # polys lists P_0..P_d as rational coefficient vectors in theta
        self.order = int(order)
        self.polys = [[_q(c) for c in p] for p in polys]
        p0 = _trim(self.polys[0])
        if p0 != [_q(0)] * self.order + [_q(1)]:
            raise ValueError("P_0 must be exactly theta^order")
        for p in self.polys:
            if len(_trim(p)) - 1 > self.order:
                raise ValueError("deg P_j must not exceed the theta order")

    @classmethod
    def from_tails(cls, order, tails):
        """Build from P_1..P_d, supplying the monic P_0 = theta^order."""
        p0 = [0] * order + [1]
        return cls(order, [p0] + list(tails))

    @property
    def degree(self):
        return len(self.polys) - 1

    def __repr__(self):
        return "ThetaOperator(order=%d, degree=%d)" % (self.order, self.degree)


class Recurrence:
    """Exact recurrence sum_i T_i(m) u_{m-i} = rhs_m with T_0(m) = m^order."""

    def __init__(self, order, terms, rhs):
        self.order = int(order)
        self.terms = [[_q(c) for c in t] for t in terms]
        self.rhs = [_q(c) for c in rhs]

    @property
    def depth(self):
        return len(self.terms) - 1

    def rhs_at(self, m):
        return self.rhs[m] if m < len(self.rhs) else _q(0)

    def residual(self, u, m, rhs_active=True):
        """Exact value of the recurrence at index m minus its source term."""
        acc = _q(0)
        for i, T in enumerate(self.terms):
            if m - i >= 0:
                acc += poly_eval(T, m) * u[m - i]
        if rhs_active:
            acc -= self.rhs_at(m)
        return acc

    def shifted_terms(self):
        """Coefficient polynomials of u_{n+d-i} in the variable n (m = n+d)."""
        d = self.depth
        return [poly_shift(T, d) for T in self.terms]


class SequencePair:
    """Homogeneous and inhomogeneous solutions of one recurrence."""

    def __init__(self, a, b, j=1):
        self.a = list(a)
        self.b = list(b)
        self.j = j

    def ratios(self):
        return [bn / an for an, bn in zip(self.a, self.b)]

    def recheck(self, rec):
        """Re-verify both sequences satisfy the recurrence exactly everywhere."""
        for m in range(1, len(self.a)):
            if rec.residual(self.a, m, rhs_active=False) != 0:
                return False
            if rec.residual(self.b, m) != 0:
                return False
        return True


def ode_to_recurrence(op, rhs):
    """Translate a theta operator plus polynomial source into its recurrence.

    The coefficient of t^m in L(sum u_n t^n) is
    m^order u_m + sum_i P_i(m-i) u_{m-i}; setting this equal to rhs_m for
    all m is the returned recurrence.
    """
    rhs = [_q(c) for c in rhs]
    if len(_trim(rhs)) - 1 >= len(op.polys):
        raise ValueError("rhs degree must stay below the operator degree")
    terms = [list(op.polys[0])]
    for i in range(1, len(op.polys)):
        terms.append(poly_shift(op.polys[i], -i))
    return Recurrence(op.order, terms, rhs)


def run_sequences(rec, N):
    """Exact rational a_n (homogeneous, a_0 = 1) and b_n (sourced, b_0 = 0)."""
    if N < rec.depth:
        raise ValueError("N must be at least the recurrence depth")
    a = [mpq(1)]
    b = [mpq(0)]
    for m in range(1, N + 1):
        lead = mpq(m) ** rec.order
        acc_a = mpq(0)
        acc_b = mpq(0)
        for i in range(1, rec.depth + 1):
            if m - i < 0:
                break
            ci = poly_eval(rec.terms[i], m)
            if ci != 0:
                acc_a += ci * a[m - i]
                acc_b += ci * b[m - i]
        a.append(-acc_a / lead)
        b.append((rec.rhs_at(m) - acc_b) / lead)
    return SequencePair(a, b)


def run_sequences_float(rec, N, prec_bits):
    """Float-path sequence iteration at a caller-chosen working precision.

    Coefficient polynomials are evaluated in exact integer arithmetic
    (after clearing denominators) and only the running values are floats.
    """
    lcm = 1
    for T in rec.terms:
        for c in T:
            lcm = math.lcm(lcm, int(c.denominator))
    for c in rec.rhs:
        lcm = math.lcm(lcm, int(c.denominator))
    terms_i = [[int(c * lcm) for c in T] for T in rec.terms]
    rhs_i = [int(c * lcm) for c in rec.rhs]
    with mpmath.workprec(prec_bits):
        a = [mpmath.mpf(1)]
        b = [mpmath.mpf(0)]
        for m in range(1, N + 1):
            lead = mpmath.mpf(lcm * m ** rec.order)
            acc_a = mpmath.mpf(0)
            acc_b = mpmath.mpf(0)
            for i in range(1, rec.depth + 1):
                if m - i < 0:
                    break
                ci = poly_eval_int(terms_i[i], m)
                if ci:
                    acc_a += ci * a[m - i]
                    acc_b += ci * b[m - i]
            rm = rhs_i[m] if m < len(rhs_i) else 0
            a.append(-acc_a / lead)
            b.append((rm - acc_b) / lead)
    return SequencePair(a, b)


def theta_t(f, t, theta_t_ratio=None):
    """theta in the t-variable computed in q: (theta_q f) * t / (theta_q t)."""
    if theta_t_ratio is None:
        theta_t_ratio = t / theta_q(t)
    return theta_q(f) * theta_t_ratio


def apply_operator(op, t, A):
    """L A as a q-series, everything exact."""
    ratio = t / theta_q(t)
    thetas = [A]
    for _ in range(op.order):
        thetas.append(theta_q(thetas[-1]) * ratio)
    total = thetas[op.order]
    t_pow = None
    for i in range(1, len(op.polys)):
        t_pow = t if t_pow is None else t_pow * t
        part = None
        for c, th in zip(op.polys[i], thetas):
            if c == 0:
                continue
            piece = th * c
            part = piece if part is None else part + piece
        if part is not None:
            total = total + t_pow * part
    return total


def verify_ode(op, t, A, N):
    """Certify L A = O(q^{N+1}) exactly; report the first failing order."""
    t = t.normalized()
    if t.lead_exp != 1:
        raise ValueError("t must vanish to first order at q = 0")
    if A.coefficient(0) != 1:
        raise ValueError("A must have constant term 1")
    if theta_q(t).normalized().is_zero():
        raise ValueError("theta_q t has zero leading coefficient")
    LA = apply_operator(op, t, A)
    checkable = min(N, int(LA.abs_order))
    first_fail = None
    for e in range(checkable + 1):
        c = LA.coefficient(e)
        if c != 0:
            first_fail = e
            break
    return {
        "ok": first_fail is None and checkable >= N,
        "verified_to": (first_fail - 1) if first_fail is not None else checkable,
        "requested": N,
        "first_failure_order": first_fail,
    }


def poly_series(coeffs, t):
    """Evaluate a polynomial (coeff vector) at a QSeries argument."""
    N = t.trunc_order
    acc = QSeries.const(coeffs[-1], N)
    for c in reversed(coeffs[:-1]):
        acc = acc * t + QSeries.const(c, N)
    return acc


def build_integrand(t, A, g_num, g_den, order, N):
    """f(q) = (theta_q t / t)^order * g_num(t) / (g_den(t) * A), through q^N.

    The result must have zero constant term (t vanishes at the cusp and A
    is 1 there); a nonzero constant term signals bad case data.
    """
    t = t.truncate(min(t.trunc_order, N))
    den0 = poly_eval(g_den, 0)
    if den0 == 0:
        raise ValueError("g_den must not vanish at t = 0")
    W = theta_q(t) / t
    f = W ** order * poly_series(g_num, t) / (poly_series(g_den, t) * A)
    c0 = f.coefficient(0)
    if c0 is not None and c0 != 0:
        raise ValueError("integrand has nonvanishing constant term (registry error)")
    return f


def match_order(s1, s2):
    """Largest exponent through which two series agree exactly (-1 if they
    differ at or below their common lead)."""
    hi = min(s1.abs_order, s2.abs_order)
    lo = min(s1.lead_exp, s2.lead_exp)
    e = lo
    while e <= hi:
        c1 = s1.coefficient(e)
        c2 = s2.coefficient(e)
        if (c1 or mpq(0)) != (c2 or mpq(0)):
            return int(e) - 1
        e += 1
    return int(hi)
