"""Exact truncated q-series arithmetic and the modular building blocks.

Everything here is exact rational arithmetic (gmpy2.mpq), no floats.
A QSeries represents sum_{i=0..N} c_i * q**(lead_exp + i), known through
q**(lead_exp + N); arithmetic follows min-truncation rules.
"""

import json
from gmpy2 import mpq, mpz


def _q(x):
    # coerce ints/strings/Fractions/mpz/mpq to mpq
    if isinstance(x, type(mpq())):
        return x
    if isinstance(x, str):
        return mpq(x)
    if hasattr(x, "numerator"):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


class QSeries:
    """Truncated q-expansion with exact rational coefficients.

    lead_exp is the exponent of the first stored coefficient (a rational;
    fractional leads arise from eta prefactors q^(m e/24)).  coeffs[i] is
    the coefficient of q**(lead_exp+i).  The series is known exactly for
    every exponent <= lead_exp + trunc_order; exponents below lead_exp
    are known to be zero.
    """

    __slots__ = ("lead_exp", "coeffs", "trunc_order")

    def __init__(self, lead_exp, coeffs, trunc_order=None):
        coeffs = tuple(_q(c) for c in coeffs)
        if trunc_order is None:
            trunc_order = len(coeffs) - 1
        if trunc_order < 0 or len(coeffs) != trunc_order + 1:
            raise ValueError("coeffs must hold exactly trunc_order+1 entries")
        self.lead_exp = _q(lead_exp)
        self.coeffs = coeffs
        self.trunc_order = trunc_order

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, N, lead_exp=0):
        return cls(lead_exp, (mpq(0),) * (N + 1), N)

    @classmethod
    def one(cls, N):
        return cls.const(1, N)

    @classmethod
    def const(cls, c, N):
        return cls(0, (_q(c),) + (mpq(0),) * N, N)

    @classmethod
    def q_power(cls, e, N):
        """q**e known through q**(e+N)."""
        return cls(e, (mpq(1),) + (mpq(0),) * N, N)

    # -- bookkeeping -------------------------------------------------------

    @property
    def abs_order(self):
        """Largest exponent whose coefficient is known."""
        return self.lead_exp + self.trunc_order

    def is_zero(self):
        return all(c == 0 for c in self.coeffs)

    def normalized(self):
        """Strip leading zero coefficients (absolute knowledge unchanged)."""
        k = 0
        while k < len(self.coeffs) and self.coeffs[k] == 0:
            k += 1
        if k == 0:
            return self
        if k == len(self.coeffs):
            # zero series: park the lead at the last known order
            return QSeries(self.abs_order, (mpq(0),), 0)
        return QSeries(self.lead_exp + k, self.coeffs[k:], self.trunc_order - k)

    def coefficient(self, e):
        """Exact coefficient of q**e, or None if e is beyond the known range."""
        e = _q(e)
        if e > self.abs_order:
            return None
        d = e - self.lead_exp
        if d.denominator != 1:
            return mpq(0)
        d = int(d)
        if d < 0:
            return mpq(0)
        return self.coeffs[d]

    def truncate(self, N):
        """Restrict to relative order N (must not exceed what is known)."""
        if N > self.trunc_order:
            raise ValueError("cannot extend a truncated series")
        return QSeries(self.lead_exp, self.coeffs[: N + 1], N)

    # -- arithmetic --------------------------------------------------------

    def __neg__(self):
        return QSeries(self.lead_exp, tuple(-c for c in self.coeffs), self.trunc_order)

    def _add_like(self, other, sign):
        if not isinstance(other, QSeries):
            other = QSeries.const(other, self.trunc_order)
        if (self.lead_exp - other.lead_exp).denominator != 1:
            raise ValueError("incompatible fractional lead exponents under add")
        lead = min(self.lead_exp, other.lead_exp)
        hi = min(self.abs_order, other.abs_order)
        N = int(hi - lead)
        if N < 0:
            raise ValueError("no shared known range")
        out = []
        for i in range(N + 1):
            e = lead + i
            ca = self.coefficient(e) or mpq(0)
            cb = other.coefficient(e) or mpq(0)
            out.append(ca + sign * cb)
        return QSeries(lead, out, N)

    def __add__(self, other):
        return self._add_like(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        return self._add_like(other, -1)

    def __rsub__(self, other):
        return (-self)._add_like(other, 1)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            c = _q(other)
            return QSeries(self.lead_exp, tuple(c * x for x in self.coeffs), self.trunc_order)
        N = min(self.trunc_order, other.trunc_order)
        a, b = self.coeffs, other.coeffs
        out = [mpq(0)] * (N + 1)
        for i in range(min(len(a), N + 1)):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(min(len(b), N + 1 - i)):
                if b[j] != 0:
                    out[i + j] += ai * b[j]
        return QSeries(self.lead_exp + other.lead_exp, out, N)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            c = _q(other)
            return QSeries(self.lead_exp, tuple(x / c for x in self.coeffs), self.trunc_order)
        b = other.normalized()
        if b.is_zero():
            raise ZeroDivisionError("division by series with zero leading coefficient")
        a = self.normalized()
        if a.is_zero():
            return QSeries.zero(0, a.abs_order - b.lead_exp)
        N = min(a.trunc_order, b.trunc_order)
        inv_b0 = 1 / b.coeffs[0]
        out = [mpq(0)] * (N + 1)
        for i in range(N + 1):
            acc = a.coeffs[i] if i < len(a.coeffs) else mpq(0)
            for j in range(1, min(i, b.trunc_order) + 1):
                if b.coeffs[j] != 0:
                    acc -= b.coeffs[j] * out[i - j]
            out[i] = acc * inv_b0
        return QSeries(a.lead_exp - b.lead_exp, out, N)

    def __rtruediv__(self, other):
        return QSeries.const(other, self.trunc_order) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("series powers must be integers")
        if n < 0:
            return (1 / self) ** (-n)
        if n == 0:
            return QSeries.one(self.trunc_order)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- comparison --------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries.const(other, 0)
        hi = min(self.abs_order, other.abs_order)
        exps = set()
        for s in (self, other):
            for i, c in enumerate(s.coeffs):
                e = s.lead_exp + i
                if e <= hi:
                    exps.add(e)
        for e in exps:
            if (self.coefficient(e) or mpq(0)) != (other.coefficient(e) or mpq(0)):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            e = self.lead_exp + i
            if e == 0:
                terms.append(str(c))
            else:
                terms.append("%s*q^(%s)" % (c, e))
            if len(terms) >= 6:
                break
        body = " + ".join(terms) if terms else "0"
        return "QSeries(%s + O(q^(%s)))" % (body, self.abs_order + 1)

    # -- serialization -----------------------------------------------------

    def to_json(self):
        return {"lead_exp": str(self.lead_exp), "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(mpq(obj["lead_exp"]), [mpq(c) for c in obj["coeffs"]])


def series_arith(a, b, op):
    """Named dispatch over the QSeries arithmetic ops."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    if op == "int_pow":
        return a ** b
    raise ValueError("unknown op %r" % (op,))


def theta_q(a):
    """q d/dq: multiply the coefficient of q^e by e (rational e allowed)."""
    return QSeries(
        a.lead_exp,
        tuple(c * (a.lead_exp + i) for i, c in enumerate(a.coeffs)),
        a.trunc_order,
    )


# -- eta quotients ---------------------------------------------------------


class EtaQuotient:
    """A finite product prod eta(m tau)^e, stored as (m, e) factor pairs."""

    def __init__(self, factors):
        factors = [(int(m), int(e)) for m, e in factors]
        if any(m < 1 for m, _ in factors):
            raise ValueError("eta multipliers must be positive")
        self.factors = tuple(factors)

    @property
    def lead_exp(self):
        return sum(mpq(m * e, 24) for m, e in self.factors)

    @property
    def weight(self):
        return sum(mpq(e, 2) for _, e in self.factors)

    def __repr__(self):
        return "EtaQuotient(%r)" % (list(self.factors),)


def euler_series(m, N):
    """prod_{n>=1} (1 - q^{mn}) through q^N, via the pentagonal sparse form."""
    coeffs = [mpq(0)] * (N + 1)
    coeffs[0] = mpq(1)
    k = 1
    while True:
        hit = False
        for e in (m * k * (3 * k - 1) // 2, m * k * (3 * k + 1) // 2):
            if e <= N:
                coeffs[e] += mpq(-1) ** k
                hit = True
        if not hit:
            break
        k += 1
    return QSeries(0, coeffs, N)


def eta_quotient_expand(eq, N):
    """Exact q-expansion of an EtaQuotient through relative order N."""
    out = QSeries.one(N)
    for m, e in eq.factors:
        out = out * euler_series(m, N) ** e
    return QSeries(eq.lead_exp + out.lead_exp, out.coeffs, out.trunc_order)


def residue_power_product(modulus, exponents, N):
    """prod_{n>=1} (1 - q^n)^{e(n mod modulus)} through q^N.

    Computed through the logarithmic derivative: with G = theta_q log F =
    -sum_N q^N sum_{n|N} e(n) n, the coefficients of F satisfy
    N f_N = sum_j G_j f_{N-j}.  O(N^2) exact rational ops.
    """
    exponents = tuple(_q(e) for e in exponents)
    g = [mpq(0)] * (N + 1)
    for n in range(1, N + 1):
        en = exponents[n % modulus]
        if en == 0:
            continue
        step = -en * n
        for k in range(n, N + 1, n):
            g[k] += step
    f = [mpq(0)] * (N + 1)
    f[0] = mpq(1)
    for n in range(1, N + 1):
        acc = mpq(0)
        for j in range(1, n + 1):
            if g[j] != 0:
                acc += g[j] * f[n - j]
        f[n] = acc / n
    return QSeries(0, f, N)


# -- Eisenstein series -----------------------------------------------------


def _divisor_power_sums(power, N):
    sig = [mpz(0)] * (N + 1)
    for d in range(1, N + 1):
        dp = mpz(d) ** power
        for n in range(d, N + 1, d):
            sig[n] += dp
    return sig


def eisenstein(kind, multiplier, N):
    """E2 or E4 at q^multiplier: 1 - 24 sum sigma_1(n) q^{mn}, 1 + 240 sum sigma_3(n) q^{mn}."""
    if kind not in ("E2", "E4"):
        raise ValueError("kind must be E2 or E4")
    m = int(multiplier)
    if m < 1:
        raise ValueError("multiplier must be >= 1")
    power, scale = (1, -24) if kind == "E2" else (3, 240)
    sig = _divisor_power_sums(power, N // m)
    coeffs = [mpq(0)] * (N + 1)
    coeffs[0] = mpq(1)
    for n in range(1, N // m + 1):
        coeffs[m * n] = mpq(scale) * sig[n]
    return QSeries(0, coeffs, N)


# -- Lambert-type series ---------------------------------------------------


class LambertShape:
    """One of the registered residue-weighted Lambert templates.

    The registry is closed: only the shapes below are accepted, each a
    literal series from the source formulas rather than a general DSL.
    """

    def __init__(self, shape, modulus=None, weights=None, constant=0):
        self.shape = shape
        self.modulus = modulus
        self.weights = tuple(_q(w) for w in weights) if weights is not None else None
        self.constant = _q(constant)

    def __repr__(self):
        return "LambertShape(%r, modulus=%r)" % (self.shape, self.modulus)


REGISTERED_LAMBERT_SHAPES = ("char_qn", "five_term", "sq_char_kn", "sq_residue_qn", "alt_sq")

# the five-term shape: 1 + sum_n (3q^{5n-4}/(1-q^{5n-4}) + q^{5n-3}/(1-q^{5n-3})
#                              - q^{5n-2}/(1-q^{5n-2}) - 3q^{5n-1}/(1-q^{5n-1}))
FIVE_TERM_WEIGHTS = (0, 3, 1, -1, -3)


def lambert_builder(pattern, N):
    """Expand a registered Lambert shape through q^N (exact rationals)."""
    if pattern.shape not in REGISTERED_LAMBERT_SHAPES:
        raise ValueError("unregistered Lambert pattern %r" % (pattern.shape,))
    coeffs = [mpq(0)] * (N + 1)
    if pattern.shape in ("char_qn", "five_term"):
        M = 5 if pattern.shape == "five_term" else pattern.modulus
        w = FIVE_TERM_WEIGHTS if pattern.shape == "five_term" else pattern.weights
        c0 = mpq(1) if pattern.shape == "five_term" else pattern.constant
        # sum_m w(m mod M) q^m/(1-q^m): coefficient of q^n is sum_{m|n} w(m)
        for m in range(1, N + 1):
            wm = w[m % M]
            if wm == 0:
                continue
            for n in range(m, N + 1, m):
                coeffs[n] += wm
        coeffs[0] += c0
    elif pattern.shape == "sq_residue_qn":
        # sum_m w(m mod M) m^2 q^m/(1-q^m)
        M, w = pattern.modulus, pattern.weights
        for m in range(1, N + 1):
            wm = w[m % M]
            if wm == 0:
                continue
            wm = wm * m * m
            for n in range(m, N + 1, m):
                coeffs[n] += wm
        coeffs[0] += pattern.constant
    elif pattern.shape == "sq_char_kn":
        # sum_n n^2 sum_k chi(k) q^{kn}
        M, w = pattern.modulus, pattern.weights
        for n in range(1, N + 1):
            n2 = mpq(n * n)
            for k in range(1, N // n + 1):
                wk = w[k % M]
                if wk != 0:
                    coeffs[k * n] += n2 * wk
        coeffs[0] += pattern.constant
    elif pattern.shape == "alt_sq":
        # sum_n (-1)^(n-1) n^2 q^n/(1+q^{2n})
        for n in range(1, N + 1):
            sn = mpq(n * n) * (1 if n % 2 else -1)
            b = 1
            while n * b <= N:
                coeffs[n * b] += sn * (1 if b % 4 == 1 else -1)
                b += 2
        coeffs[0] += pattern.constant
    return QSeries(0, coeffs, N)


# -- Jacobi triple-product sparse form -------------------------------------


def triple_product_sparse(scale, multiplier, N):
    """scale * sum_{n>=0} (-1)^n (2n+1) q^{multiplier*(2n+1)^2}, through N steps past the lead.

    With multiplier = m/8 this is eta(m tau)^3.  The exponent gaps
    multiplier*((2n+1)^2 - 1) = 8*multiplier*T(n) must be integers.
    """
    scale = _q(scale)
    multiplier = _q(multiplier)
    step = 8 * multiplier
    if step.denominator != 1:
        raise ValueError("8*multiplier must be an integer for an integer-step series")
    lead = multiplier
    coeffs = [mpq(0)] * (N + 1)
    n = 0
    while True:
        off = multiplier * (2 * n + 1) ** 2 - lead
        if off > N:
            break
        coeffs[int(off)] += scale * (2 * n + 1) * (1 if n % 2 == 0 else -1)
        n += 1
    return QSeries(lead, coeffs, N)
