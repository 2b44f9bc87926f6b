"""Exact q-series machinery, theta-operator recurrences, and the analytic
evaluators used to verify Apery limits of modular origin."""

__version__ = "0.1.0"

from .series import (
    QSeries,
    EtaQuotient,
    eta_quotient_expand,
    series_arith,
    theta_q,
    lambert_builder,
    LambertShape,
    eisenstein,
    triple_product_sparse,
)
from .operators import (
    ThetaOperator,
    Recurrence,
    SequencePair,
    ode_to_recurrence,
    run_sequences,
    verify_ode,
    build_integrand,
)
from .analytic import (
    HPComplex,
    EichlerSeries,
    eichler_eval,
    elliptic_point_value,
    constants,
    ramanujan_sum,
)
from .lfunctions import (
    LSeriesData,
    coefficient_stream,
    lvalue_smoothed,
    detect_root_number,
    abel_regularized_twisted_sum,
    verify_stabilizer_identity,
    corollary_checks,
)
from .limits import (
    LimitEstimate,
    estimate_limit,
    expected_limit_value,
    fit_rate,
    audit_stated_values,
    run_case,
)
from .registry import load_case, case_ids
