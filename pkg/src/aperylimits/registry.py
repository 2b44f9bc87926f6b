"""The case registry: one JSON document per registered case.

A case file bundles the theta operator, the closed forms for t and A, the
inhomogeneous source polynomial, g(t), the integrand's closed form, the
singularity table, expected-limit/rate tags, and the source-stated
recurrence data used by the audit report.  The directory can be overridden
with the APERY_REGISTRY environment variable.
"""

import json
import os
from pathlib import Path

from gmpy2 import mpq

from .series import (
    QSeries,
    EtaQuotient,
    eta_quotient_expand,
    lambert_builder,
    LambertShape,
    eisenstein,
    residue_power_product,
)
from .operators import ThetaOperator, ode_to_recurrence

DEFAULT_SERIES_ORDER = 200


def registry_dir():
    env = os.environ.get("APERY_REGISTRY")
    if env:
        return Path(env)
    return Path(__file__).parent / "cases"


def case_ids():
    return sorted(p.stem for p in registry_dir().glob("*.json"))


def _rat(x):
    if isinstance(x, str):
        return mpq(x)
    return mpq(x)


def _rat_list(xs):
    return [_rat(x) for x in xs]


class CaseSpec:
    """A registered case, materializing series on demand."""

    def __init__(self, raw):
        self.raw = raw
        self.id = raw["id"]
        self.weight_k = raw["weight_k"]
        op = raw["operator"]
        self.operator = ThetaOperator.from_tails(
            op["order"], [_rat_list(p) for p in op["tails"]]
        )
        self.rhs = _rat_list(raw["rhs"])
        self.g_num = _rat_list(raw["g_num"])
        self.g_den = _rat_list(raw["g_den"])
        self.t_form = raw["t_form"]
        self.A_form = raw["A_form"]
        self.integrand_form = raw["integrand_form"]
        self.singularities = raw.get("singularities", [])
        self.expected_limit = raw["expected_limit"]
        self.expected_rate = raw["expected_rate"]
        self.paper_stated = raw.get("paper_stated", {})
        self.elliptic_eval = raw.get("elliptic_eval")
        self.lfunction = raw.get("lfunction")
        self.growth_log2 = raw.get("growth_log2", 5.0)
        self.fit_window = raw.get("fit_window")

    def recurrence(self):
        return ode_to_recurrence(self.operator, self.rhs)

    def t_series(self, N=DEFAULT_SERIES_ORDER):
        return build_form(self.t_form, N)

    def A_series(self, N=DEFAULT_SERIES_ORDER):
        return build_form(self.A_form, N, t=lambda: self.t_series(N))

    def integrand_closed_form(self, N=DEFAULT_SERIES_ORDER):
        return build_form(self.integrand_form, N)

    def __repr__(self):
        return "CaseSpec(%r)" % (self.id,)


def build_form(form, N, t=None):
    """Materialize a closed-form template as an exact QSeries."""
    kind = form["kind"]
    if kind == "eta":
        return eta_quotient_expand(EtaQuotient(form["factors"]), N)
    if kind == "char_power_q":
        # q^shift * prod (1-q^n)^(e(n mod M))
        base = residue_power_product(form["modulus"], _rat_list(form["exponents"]), N)
        shift = form.get("q_shift", 0)
        return QSeries(base.lead_exp + shift, base.coeffs, base.trunc_order)
    if kind == "lambert":
        return lambert_builder(_shape(form), N)
    if kind == "lambert_over_poly":
        # a Lambert numerator divided by a polynomial in t
        if t is None:
            raise ValueError("lambert_over_poly needs the case's t series")
        from .operators import poly_series

        num = lambert_builder(_shape(form["lambert"]), N)
        return num / poly_series(_rat_list(form["poly"]), t())
    if kind == "reciprocal_sum":
        # 1 / (u + shift + conj_scale/u) for an eta-quotient u
        u = eta_quotient_expand(EtaQuotient(form["eta_factors"]), N)
        denom = u + _rat(form["shift"]) + _rat(form["conj_scale"]) / u
        return 1 / denom
    if kind == "eisenstein_combo":
        scale = _rat(form.get("scale", 1))
        ekind = form.get("eisenstein", "E4")
        acc = None
        for m, c in form["terms"]:
            piece = eisenstein(ekind, m, N) * _rat(c)
            acc = piece if acc is None else acc + piece
        return acc * scale
    raise ValueError("unknown form kind %r" % (kind,))


def _shape(obj):
    return LambertShape(
        obj["shape"],
        modulus=obj.get("modulus"),
        weights=_rat_list(obj["weights"]) if "weights" in obj else None,
        constant=_rat(obj.get("constant", 0)),
    )


def load_case(case_id):
    path = registry_dir() / ("%s.json" % case_id)
    if not path.exists():
        raise KeyError("unknown case id %r" % (case_id,))
    with open(path) as fh:
        return CaseSpec(json.load(fh))


def load_all():
    return [load_case(cid) for cid in case_ids()]
