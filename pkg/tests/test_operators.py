"""Tests for theta operators, recurrences, and integrand assembly.

The manufactured operators here have closed-form solutions that make the
certification machinery checkable by hand: 1/(1-t) is annihilated by
theta - t(theta+1) for any t, and 1/(1+q) by theta^2 + t(theta+1)^2 when
t = q.
"""

import pytest
from gmpy2 import mpq
import mpmath
from hypothesis import given, settings, strategies as st

from aperylimits.series import QSeries, theta_q
from aperylimits.operators import (
    poly_eval,
    poly_shift,
    ThetaOperator,
    Recurrence,
    SequencePair,
    ode_to_recurrence,
    run_sequences,
    run_sequences_float,
    theta_t,
    apply_operator,
    verify_ode,
    poly_series,
    build_integrand,
    match_order,
)


def geometric_t(N):
    """t = q + 3q^2 - 2q^3 + q^4 repeated with period 4, lead coefficient 1."""
    pattern = [1, 3, -2, 1]
    coeffs = [mpq(pattern[k % 4]) for k in range(N)]
    return QSeries(1, coeffs, N - 1)


# --- polynomial helpers --------------------------------------------------

def test_poly_shift_known():
    # (x+2)^2 = x^2 + 4x + 4 from x^2
    assert poly_shift([0, 0, 1], 2) == [mpq(4), mpq(4), mpq(1)]
    assert poly_shift([1, 1], -1) == [mpq(0), mpq(1)]


@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=6),
       st.integers(min_value=-5, max_value=5),
       st.integers(min_value=-10, max_value=10))
@settings(max_examples=80, deadline=None)
def test_poly_shift_eval_agree(coeffs, s, x):
    shifted = poly_shift(coeffs, s)
    assert poly_eval(shifted, x) == poly_eval(coeffs, x + s)


@given(st.lists(st.integers(min_value=-9, max_value=9), min_size=1, max_size=6),
       st.integers(min_value=-4, max_value=4))
@settings(max_examples=50, deadline=None)
def test_poly_shift_round_trip(coeffs, s):
    back = poly_shift(poly_shift(coeffs, s), -s)
    assert back == [mpq(c) for c in coeffs]


# --- operator construction -----------------------------------------------

def test_from_tails_prepends_theta_power():
    op = ThetaOperator.from_tails(2, [[1, 2, 1]])
    assert op.polys[0] == [mpq(0), mpq(0), mpq(1)]
    assert op.polys[1] == [mpq(1), mpq(2), mpq(1)]
    assert op.degree == 1


def test_leading_poly_must_be_theta_power():
    with pytest.raises(ValueError):
        ThetaOperator(2, [[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        ThetaOperator(2, [[0, 0, 2], [1, 1]])


def test_tail_degree_capped_at_order():
    with pytest.raises(ValueError):
        ThetaOperator.from_tails(2, [[0, 0, 0, 5]])


# --- recurrence conversion and generation --------------------------------

def test_ode_to_recurrence_shifts_tails():
    # theta^2 + t (theta+1)^2: coefficient of t^m in L sum u_n t^n is
    # m^2 u_m + m^2 u_{m-1}, so the shifted tail is again m^2
    op = ThetaOperator.from_tails(2, [[1, 2, 1]])
    rec = ode_to_recurrence(op, [0])
    assert rec.terms[1] == [mpq(0), mpq(0), mpq(1)]
    seq = run_sequences(rec, 10)
    assert seq.a == [mpq((-1) ** n) for n in range(11)]


def test_rhs_degree_validation():
    op = ThetaOperator.from_tails(1, [[1, 1]])
    with pytest.raises(ValueError):
        ode_to_recurrence(op, [0, 1, 1])  # rhs degree 2 but only t^1 in L


def test_recurrence_residual_and_recheck():
    op = ThetaOperator.from_tails(1, [[-1, -1]])
    rec = ode_to_recurrence(op, [0, 1])
    seq = run_sequences(rec, 20)
    assert seq.recheck(rec)
    assert rec.residual(seq.a, 5, rhs_active=False) == 0
    bad = list(seq.a)
    bad[7] += 1
    assert rec.residual(bad, 7, rhs_active=False) != 0
    assert not SequencePair(bad, seq.b).recheck(rec)


def test_run_sequences_classic_cubic():
    # m^3 u_m - (34(m-1)^3 + 51(m-1)^2 + 27(m-1) + 5) u_{m-1}
    #         + (m-1)^3 u_{m-2} = 0 generates 1, 5, 73, 1445, 33001
    op = ThetaOperator.from_tails(3, [[-5, -27, -51, -34], [1, 3, 3, 1]])
    rec = ode_to_recurrence(op, [0, 1])
    seq = run_sequences(rec, 6)
    assert seq.a == [1, 5, 73, 1445, 33001, 819005, 21460825]
    assert seq.b[0] == 0
    assert seq.b[1] == 1
    assert seq.b[2] == mpq(117, 8)


def test_sourced_sequence_picks_up_rhs():
    op = ThetaOperator.from_tails(1, [[-1, -1]])
    rec = ode_to_recurrence(op, [0, 1])
    seq = run_sequences(rec, 8)
    # m u_m = m u_{m-1} + [m == 1]; a_m = 1 and b_m = 1/m summed telescope
    assert all(x == 1 for x in seq.a)
    assert seq.b[1] == 1
    assert seq.b[2] == 1
    assert rec.residual(seq.b, 1) == 0


def test_float_path_tracks_exact_path():
    op = ThetaOperator.from_tails(3, [[-5, -27, -51, -34], [1, 3, 3, 1]])
    rec = ode_to_recurrence(op, [0, 1])
    exact = run_sequences(rec, 60)
    approx = run_sequences_float(rec, 60, 256)
    with mpmath.workprec(300):
        for n in range(61):
            ea = mpmath.mpf(int(exact.a[n].numerator)) / int(exact.a[n].denominator)
            err = abs(approx.a[n] - ea) / abs(ea)
            assert err < mpmath.mpf(2) ** -200


def test_ratios_converge_for_contractive_recurrence():
    op = ThetaOperator.from_tails(3, [[-5, -27, -51, -34], [1, 3, 3, 1]])
    rec = ode_to_recurrence(op, [0, 1])
    seq = run_sequences(rec, 30)
    r = seq.ratios()
    assert abs(r[30] - r[29]) < abs(r[11] - r[10])


def test_shifted_terms_display_form():
    # depth-1 recurrence in m rewritten at m = n+1
    rec = Recurrence(1, [[0, 1], [2, 3]], [0])
    shifted = rec.shifted_terms()
    assert shifted[0] == [mpq(1), mpq(1)]   # m -> n+1
    assert shifted[1] == [mpq(5), mpq(3)]   # 3m+2 -> 3n+5


# --- operator application and certification ------------------------------

def test_theta_t_fixes_t_itself():
    N = 30
    t = geometric_t(N)
    assert theta_t(t, t) == t
    t2 = t * t
    assert theta_t(t2, t) == t2 * 2


def test_apply_operator_matches_manual_sum():
    N = 25
    t = geometric_t(N)
    A = QSeries.one(N) + t * 5
    op = ThetaOperator.from_tails(2, [[1, 2, 1]])
    manual = (theta_t(theta_t(A, t), t)
              + t * (A + theta_t(A, t) * 2 + theta_t(theta_t(A, t), t)))
    assert apply_operator(op, t, A) == manual


def test_verify_ode_geometric_solution():
    # theta - t(theta+1) annihilates 1/(1-t) for every t with lead 1
    N = 40
    t = geometric_t(N)
    A = QSeries.one(N)
    t_pow = QSeries.one(N)
    for _ in range(N):
        t_pow = t_pow * t
        A = A + t_pow
    op = ThetaOperator.from_tails(1, [[-1, -1]])
    rep = verify_ode(op, t, A, N - 2)
    assert rep["ok"]
    assert rep["verified_to"] >= N - 2
    assert rep["first_failure_order"] is None


def test_verify_ode_flags_wrong_operator():
    N = 20
    t = geometric_t(N)
    A = QSeries.one(N)
    t_pow = QSeries.one(N)
    for _ in range(N):
        t_pow = t_pow * t
        A = A + t_pow
    op = ThetaOperator.from_tails(1, [[-1, -2]])
    rep = verify_ode(op, t, A, N - 2)
    assert not rep["ok"]
    assert rep["first_failure_order"] is not None
    assert rep["verified_to"] == rep["first_failure_order"] - 1


def test_verify_ode_input_validation():
    N = 10
    op = ThetaOperator.from_tails(1, [[-1, -1]])
    bad_t = QSeries(0, [mpq(1)] * (N + 1), N)
    with pytest.raises(ValueError):
        verify_ode(op, bad_t, QSeries.one(N), 5)
    good_t = QSeries(1, [mpq(1)] * N, N - 1)
    bad_A = QSeries(0, [mpq(2)] + [mpq(0)] * N, N)
    with pytest.raises(ValueError):
        verify_ode(op, good_t, bad_A, 5)


def test_verify_ode_reports_short_truncation():
    N = 12
    t = geometric_t(N)
    A = QSeries.one(N)
    t_pow = QSeries.one(N)
    for _ in range(N):
        t_pow = t_pow * t
        A = A + t_pow
    op = ThetaOperator.from_tails(1, [[-1, -1]])
    rep = verify_ode(op, t, A, 500)
    assert not rep["ok"]  # cannot certify past the data
    assert rep["first_failure_order"] is None
    assert rep["verified_to"] < 500


# --- integrand assembly --------------------------------------------------

def test_poly_series_horner():
    N = 10
    t = geometric_t(N)
    direct = QSeries.one(N) - t * 3 + t * t * 2
    assert poly_series([1, -3, 2], t) == direct


def test_build_integrand_simple_case():
    # t = q makes theta_q t / t = 1, so with g = t and A = 1/(1+q) the
    # integrand collapses to t * (1 + q) = q + q^2
    N = 15
    t = QSeries(1, [mpq(1)] + [mpq(0)] * (N - 1), N - 1)
    A = QSeries(0, [mpq((-1) ** n) for n in range(N + 1)], N)
    f = build_integrand(t, A, [0, 1], [1], 2, N - 1)
    assert f.coefficient(1) == 1
    assert f.coefficient(2) == 1
    for e in range(3, int(f.abs_order) + 1):
        assert f.coefficient(e) == 0


def test_build_integrand_rejects_constant_term():
    N = 12
    t = QSeries(1, [mpq(1)] + [mpq(0)] * (N - 1), N - 1)
    A = QSeries.one(N)
    with pytest.raises(ValueError):
        build_integrand(t, A, [1], [1], 2, N - 1)  # g_num(0) = 1 != 0


def test_build_integrand_rejects_vanishing_denominator():
    N = 12
    t = QSeries(1, [mpq(1)] + [mpq(0)] * (N - 1), N - 1)
    A = QSeries.one(N)
    with pytest.raises(ValueError):
        build_integrand(t, A, [0, 1], [0, 1], 2, N - 1)


def test_match_order_detects_divergence_point():
    N = 20
    a = QSeries(1, [mpq(1)] * N, N - 1)
    coeffs = [mpq(1)] * N
    coeffs[7] = mpq(2)
    b = QSeries(1, coeffs, N - 1)
    assert match_order(a, b) == 7  # exponents 1..7 agree, 8 differs
    assert match_order(a, a) == a.abs_order
