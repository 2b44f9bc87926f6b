"""Tests for the half-plane evaluation layer.

Certified bounds are checked for honesty the blunt way: recompute with far
more terms or precision and require the difference to stay under the bound
the cheaper run reported.
"""

import mpmath
import pytest
from gmpy2 import mpq

from aperylimits.series import QSeries
from aperylimits.registry import load_case
from aperylimits.analytic import (
    GUARD_BITS,
    digits_to_bits,
    HPComplex,
    parse_point,
    cusp_exponential,
    EichlerSeries,
    eichler_eval,
    qseries_eval,
    elliptic_point_value,
    constants,
    chi3,
    ramanujan_sum,
)


def hp(x, prec=200):
    with mpmath.workprec(prec):
        return mpmath.mpf(x)


# --- HPComplex -----------------------------------------------------------

def test_hpcomplex_fields_and_abs():
    z = HPComplex("1.5", "-2", prec_bits=100)
    assert z.prec_bits == 100
    assert z.bound is None
    with mpmath.workprec(120):
        assert abs(abs(z) - mpmath.sqrt(mpmath.mpf(25) / 4)) < mpmath.mpf(2) ** -95

def test_hpcomplex_bound_merging():
    a = HPComplex(1, 0, 100, bound=1e-20)
    b = HPComplex(2, 1, 100, bound=2e-20)
    c = a + b
    assert c.bound == pytest.approx(3e-20)
    d = a - HPComplex(1, 0, 100)
    assert d.bound == pytest.approx(1e-20)


def test_hpcomplex_high_precision_survives_conversion():
    with mpmath.workprec(300):
        x = mpmath.mpf(2) ** mpmath.mpf("0.5")
    z = HPComplex(x, 0, 250)
    back = z.to_mpc()
    with mpmath.workprec(300):
        assert abs(back.real - mpmath.sqrt(2)) < mpmath.mpf(2) ** -245


# --- point parsing and q ------------------------------------------------

def test_parse_point_shapes():
    pb = 200
    with mpmath.workprec(pb + GUARD_BITS):
        i = mpmath.mpc(0, 1)
        cases = {
            "i/sqrt(6)": i / mpmath.sqrt(6),
            "(3+i*sqrt(3))/6": (3 + i * mpmath.sqrt(3)) / 6,
            "i/sqrt(7)": i / mpmath.sqrt(7),
            "2/5+i/(5*sqrt(6))": mpmath.mpf(2) / 5 + i / (5 * mpmath.sqrt(6)),
        }
    for expr, ref in cases.items():
        got = parse_point(expr, pb)
        with mpmath.workprec(pb):
            assert abs(got - ref) < mpmath.mpf(2) ** -(pb - 10), expr


def test_parse_point_rational_parts_keep_precision():
    # 2/5 must not pass through a double
    got = parse_point("2/5+i/(5*sqrt(6))", 250)
    with mpmath.workprec(280):
        assert abs(got.real - mpmath.mpf(2) / 5) < mpmath.mpf(2) ** -240


def test_cusp_exponential_at_i():
    q = cusp_exponential(mpmath.mpc(0, 1), 150)
    with mpmath.workprec(170):
        assert abs(q.real - mpmath.exp(-2 * mpmath.pi)) < mpmath.mpf(2) ** -140
        assert abs(q.imag) < mpmath.mpf(2) ** -140


def test_cusp_exponential_period_one():
    pb = 150
    tau = parse_point("(3+i*sqrt(3))/6", pb)
    q1 = cusp_exponential(tau, pb)
    q2 = cusp_exponential(tau + 1, pb)
    with mpmath.workprec(pb):
        assert abs(q1 - q2) < mpmath.mpf(2) ** -130


# --- EichlerSeries -------------------------------------------------------

def test_eichler_series_from_qseries():
    f = QSeries(1, [mpq(1), mpq(-3), mpq(5)], 2)
    E = EichlerSeries.from_qseries(f, 2)
    assert E.coeffs[0] == 0
    assert E.coeffs[1] == 1
    assert E.coeffs[3] == 5
    assert E.known_through() == 3
    C, sigma = E.coeff_bound
    assert sigma == 2
    assert C >= mpq(5, 9)


def test_eichler_series_rejects_non_integer():
    f = QSeries(1, [mpq(1), mpq(1, 2)], 1)
    with pytest.raises(ValueError):
        EichlerSeries.from_qseries(f, 2)


def test_eichler_series_rejects_constant_term():
    with pytest.raises(ValueError):
        EichlerSeries([3, 1], 2)


def test_eichler_series_bound_verified_on_extend():
    E = EichlerSeries([0, 1, 4], 2)
    E.extend([100])          # c_3 = 100 forces C up to 100/9
    C, sigma = E.coeff_bound
    assert C == mpq(100, 9)
    with pytest.raises(ValueError):
        EichlerSeries([0, 1, 4, 100], 2, coeff_bound=(mpq(1), 2))


def test_theta_derivative_drops_order():
    E = EichlerSeries([0, 1, 4], 3)
    dE = E.theta_derivative()
    assert dE.order == 2
    assert dE.coeffs == E.coeffs
    with pytest.raises(ValueError):
        EichlerSeries([0, 1], 1).theta_derivative()


# --- eichler_eval --------------------------------------------------------

def test_eichler_eval_rejects_lower_half_plane():
    E = EichlerSeries([0, 1], 2)
    with pytest.raises(ValueError):
        eichler_eval(E, mpmath.mpc(0, -1), 10)


def test_eichler_eval_stream_exhaustion():
    E = EichlerSeries([0, 1, 1, 1], 2)
    with pytest.raises(ValueError):
        eichler_eval(E, mpmath.mpc(0, "0.05"), 30)


def test_eichler_eval_decays_at_the_cusp():
    case = load_case("zeta3")
    E = EichlerSeries.from_qseries(case.integrand_closed_form(60), 3)
    val = eichler_eval(E, mpmath.mpc(0, 50), 100)
    assert abs(val) < hp("1e-100")


def test_eichler_eval_single_term_reference():
    # c_1 = 1 with explicit zero padding (the tail bound cannot know that
    # unmaterialized coefficients vanish): value is exactly q
    E = EichlerSeries([0, 1] + [0] * 14, 2)
    val = eichler_eval(E, mpmath.mpc(0, 1), 25)
    with mpmath.workprec(120):
        assert abs(val.re - mpmath.exp(-2 * mpmath.pi)) < mpmath.mpf(10) ** -24


def test_eichler_eval_translation_invariance():
    case = load_case("case_h")
    E = EichlerSeries.from_qseries(case.integrand_closed_form(120), 2)
    tau = parse_point("i/sqrt(3)", 200)
    v1 = eichler_eval(E, tau, 25)
    v2 = eichler_eval(E, tau + 1, 25)
    with mpmath.workprec(120):
        assert abs(v1.to_mpc() - v2.to_mpc()) < mpmath.mpf(10) ** -24


def test_eichler_eval_digits_stable_under_more_precision():
    case = load_case("case_h")
    E = EichlerSeries.from_qseries(case.integrand_closed_form(200), 2)
    tau = parse_point("(3+i*sqrt(3))/6", 300)
    v_lo = eichler_eval(E, tau, 12)
    v_hi = eichler_eval(E, tau, 30)
    with mpmath.workprec(150):
        assert abs(v_lo.to_mpc() - v_hi.to_mpc()) < 2 * v_lo.bound


def test_eichler_eval_tail_bound_honest():
    case = load_case("case_h")
    full = EichlerSeries.from_qseries(case.integrand_closed_form(200), 2)
    tau = parse_point("(3+i*sqrt(3))/6", 300)
    v = eichler_eval(full, tau, 8)
    v_ref = eichler_eval(full, tau, 40)
    with mpmath.workprec(180):
        assert abs(v.to_mpc() - v_ref.to_mpc()) < v.bound


# --- qseries_eval --------------------------------------------------------

def test_qseries_eval_geometric():
    N = 400
    geo = QSeries(0, [mpq(1)] * (N + 1), N)
    val = qseries_eval(geo, mpmath.mpc(0, 1), 150)
    with mpmath.workprec(180):
        ref = 1 / (1 - mpmath.exp(-2 * mpmath.pi))
        assert abs(val.to_mpc() - ref) < mpmath.mpf(2) ** -140


def test_qseries_eval_fractional_lead():
    f = QSeries(mpq(1, 24), [mpq(1)], 0)
    tau = mpmath.mpc(0, 2)
    val = qseries_eval(f, tau, 120)
    with mpmath.workprec(150):
        ref = mpmath.exp(-2 * mpmath.pi * 2 / 24)
        assert abs(val.to_mpc() - ref) < mpmath.mpf(2) ** -110


# --- elliptic point values ----------------------------------------------

def case_h_constant(prec):
    with mpmath.workprec(prec):
        return 2 * mpmath.pi ** 2 / 81 - constants("L2_chi3", prec) / 2


def test_case_h_direct_value():
    case = load_case("case_h")
    val = elliptic_point_value(case.integrand_closed_form(200), case.A_series(200),
                               2, "direct", case.elliptic_eval["tau"], 30)
    with mpmath.workprec(200):
        target = case_h_constant(200)
        assert abs(val.re - target) < mpmath.mpf(10) ** -25
        assert abs(val.im) < mpmath.mpf(10) ** -25


def test_zeta3_branch_corrected_value():
    case = load_case("zeta3")
    val = elliptic_point_value(case.integrand_closed_form(200), case.A_series(200),
                               3, "branch_corrected", case.elliptic_eval["tau"], 30)
    with mpmath.workprec(200):
        target = mpmath.zeta(3) / 6
        assert abs(val.re - target) < mpmath.mpf(10) ** -25


def test_unknown_elliptic_mode_rejected():
    case = load_case("case_h")
    with pytest.raises(ValueError):
        elliptic_point_value(case.integrand_closed_form(60), case.A_series(60),
                             2, "reflected", case.elliptic_eval["tau"], 10)


# --- constants -----------------------------------------------------------

def test_constant_digit_freezes():
    frozen = {
        "pi": "3.141592653589793238462643",
        "zeta2": "1.644934066848226436472415",
        "zeta3": "1.202056903159594285399738",
        "L2_chi3": "0.7813024128964862968671874",
        "L2_chi_minus1": "0.9159655941772190150546035",
    }
    for name, digits in frozen.items():
        v = constants(name, 128)
        with mpmath.workprec(140):
            assert abs(v - mpmath.mpf(digits)) < mpmath.mpf(10) ** -24, name


def test_constants_match_library_references():
    with mpmath.workprec(220):
        refs = {
            "pi": +mpmath.pi,
            "zeta2": mpmath.zeta(2),
            "zeta3": mpmath.zeta(3),
            "L2_chi_minus1": +mpmath.catalan,
        }
    for name, ref in refs.items():
        v = constants(name, 200)
        with mpmath.workprec(220):
            assert abs(v - ref) < mpmath.mpf(2) ** -190, name


def test_unknown_constant_rejected():
    with pytest.raises(ValueError):
        constants("zeta5", 64)


# --- ramanujan sum -------------------------------------------------------

def test_chi3_pattern():
    assert [chi3(n) for n in range(1, 7)] == [1, -1, 0, 1, -1, 0]


def test_ramanujan_sum_at_zero():
    v = ramanujan_sum(0, 20)
    assert abs(v) == 0


def test_ramanujan_sum_rejects_unit_disk_boundary():
    with pytest.raises(ValueError):
        ramanujan_sum(1, 10)
    with pytest.raises(ValueError):
        ramanujan_sum(mpmath.mpc(0, "1.2"), 10)


def test_ramanujan_sum_closed_evaluation():
    with mpmath.workprec(240):
        x = -mpmath.exp(-mpmath.pi / mpmath.sqrt(3))
    v = ramanujan_sum(x, 32)
    with mpmath.workprec(240):
        target = case_h_constant(240)
        assert abs(v.re - target) < mpmath.mpf(10) ** -30
        assert abs(v.im) < mpmath.mpf(10) ** -30


def test_ramanujan_sum_brute_force_agreement():
    # 3/8 is exactly representable, so both routes see the same x
    v = ramanujan_sum(mpmath.mpf(3) / 8, 25)
    with mpmath.workprec(160):
        x = mpmath.mpf(3) / 8
        brute = mpmath.mpf(0)
        for n in range(1, 10 ** 4):
            c = chi3(n)
            if c:
                xn = x ** n
                brute += c * xn / (n * n * (1 - xn))
        assert abs(v.re - brute) < v.bound + mpmath.mpf(10) ** -25
        assert v.re > 0
