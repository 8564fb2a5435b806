import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hoquant.dsl import Domain, Potential, evaluate, parse, power_sum, to_text
from hoquant.dsl.expr import const
from hoquant.errors import AiryCase, NonSchrodingerForm, NoRealSolution
from hoquant.grid import GridSpec
from hoquant.potentials import builtin
from hoquant.reduction import (
    BUILTIN_PLANS,
    DiffOp2,
    PGParams,
    ReductionPlan,
    THOParams,
    bound_state_energies,
    cancelling_exponent,
    change_variable,
    conjugate,
    gauge,
    gauge_by,
    get_plan,
    inverse_square_constant,
    pg_coefficients,
    pg_expression,
    pg_quadratic_model,
    predict_spectrum,
    reduction_check,
    reduction_residual,
    sample_coefficients,
    schrodinger,
    tho_normalize,
    tho_operator,
)

CHECK = GridSpec.closed(0.3, 5.0, 200)


def test_tho_normalize_examples():
    assert tho_normalize(THOParams(1.0, 2.0, 3.0)) == (1.0, 2.0)
    assert tho_normalize(THOParams(2.0, 0.0, 1.0)) == (0.0, 1.0)
    with pytest.raises(AiryCase):
        tho_normalize(THOParams(0.0, 1.0, 0.0))


@settings(max_examples=100, deadline=None)
@given(st.floats(0.2, 3), st.floats(-3, 3), st.floats(-3, 3), st.floats(-4, 4))
def test_tho_normalize_is_completed_square(w, r, lam, z):
    center, offset = tho_normalize(THOParams(w, r, lam))
    assert w * w * (z + center) ** 2 + offset == pytest.approx(w * w * z * z + r * z + lam, abs=1e-9)


def test_example1_plan_reproduces_potential():
    plan = BUILTIN_PLANS["example1"]
    V = builtin("example1", {"omega": 1.0, "lambda": 1.0})
    res = reduction_check(plan, V, CHECK, THOParams(1.0, 1.0, 1.0))
    assert res.residual < 1e-9
    assert res.shift_value == 1.0
    assert inverse_square_constant(plan) == Fraction(-5, 36)


def test_example2_plan_reproduces_potential():
    plan = BUILTIN_PLANS["example2"]
    tho = THOParams(1.3, -0.7, 0.4)
    V = builtin("example2", tho.as_params())
    assert reduction_residual(plan, V, CHECK, tho) < 1e-9
    assert inverse_square_constant(plan) == Fraction(-3, 16)


@pytest.mark.parametrize("name", ["example1", "example2"])
def test_both_conjugation_orders_agree(name):
    plan = BUILTIN_PLANS[name]
    a = plan.conjugated()
    b = plan.conjugated(substitute_first=True)
    assert power_sum(a.c0) == power_sum(b.c0)
    assert power_sum(a.c1) == power_sum(b.c1) == {}
    V = builtin(name, {"omega": 1.0, "lambda": 1.0, "rho": 1.0})
    assert reduction_residual(plan, V, CHECK, THOParams(1.0, 1.0, 1.0), substitute_first=True) < 1e-9


def test_identity_plan():
    plan = BUILTIN_PLANS["identity"]
    op = plan.conjugated()
    x = 1.7
    p = {"omega": 2.0, "rho": 0.5, "lambda": -1.0}
    assert evaluate(op.c0, x, p) == pytest.approx(4 * x * x + 0.5 * x - 1.0)
    assert plan.free_parameter is None


def test_wrong_multiplier_exponent_rejected():
    with pytest.raises(NonSchrodingerForm) as exc:
        conjugate(tho_operator(), Fraction(1, 3), Fraction(3, 2), Fraction(2, 3))
    assert exc.value.args


def test_gauge_in_isolation():
    # z^mu (-d^2) z^-mu = -d^2 + (2 mu / z) d - mu (mu + 1) / z^2
    op = gauge(schrodinger(const(0), "z"), Fraction(1, 2))
    z = 1.9
    assert evaluate(op.c1, z) == pytest.approx(1 / z)
    assert evaluate(op.c0, z) == pytest.approx(-0.75 / z**2)


@settings(max_examples=60, deadline=None)
@given(st.fractions(-2, 2, max_denominator=6), st.floats(0.5, 3.0))
def test_gauge_is_a_similarity(mu, z):
    # (z^mu L z^-mu) f = z^mu L (z^-mu f), checked on f = exp(z/3) with L the THO operator
    L = tho_operator()
    p = {"omega": 1.1, "rho": 0.3, "lambda": -0.4}
    f = parse("exp(z/3)", variable="z")
    lhs = evaluate(gauge(L, mu).apply(f), z, p)
    inner = parse(f"z^({-mu})*exp(z/3)", variable="z")
    rhs = z ** float(mu) * evaluate(L.apply(inner), z, p)
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.fractions(-2, 2, max_denominator=6).filter(lambda g: g != 0), st.fractions(1, 3, max_denominator=4))
def test_cancelling_exponent_kills_first_order_term(g, c):
    mu = cancelling_exponent(g)
    out = conjugate(tho_operator(), mu, c, g)
    assert power_sum(out.c1) == {}
    assert power_sum(out.c2) == {(Fraction(0), (), ()): Fraction(-1)}


def test_change_variable_normalises_leading_coefficient():
    op = change_variable(tho_operator(), parse("q^2"))
    xs = np.linspace(0.5, 3, 7)
    c = sample_coefficients(op, xs, {"omega": 1.0, "rho": 0.0, "lambda": 0.0})
    assert np.allclose(c["c2"], -1.0)


def test_gauge_by_matches_gauge_for_powers():
    L = tho_operator()
    a = gauge(L, Fraction(1, 4))
    b = gauge_by(L, parse("z^(-1/4)", variable="z"))
    assert power_sum(a.c0) == power_sum(b.c0) and power_sum(a.c1) == power_sum(b.c1)


def test_predict_spectrum_rho():
    plan = BUILTIN_PLANS["example1"]
    preds = predict_spectrum(plan, THOParams(1.0, 0.0, 1.0), 2)
    for p in preds:
        r = 2 * math.sqrt(1.0 + (2 * p.n + 1))
        assert p.solutions == pytest.approx((-r, r))
        assert p.energies == pytest.approx((r, -r))
    with pytest.raises(NoRealSolution):
        predict_spectrum(plan, THOParams(1.0, 0.0, -5.0), 0)


def test_predict_spectrum_omega_root_solves_relation():
    plan = BUILTIN_PLANS["example2"]
    tho = THOParams(1.0, -1.0, 1.0)
    for p in predict_spectrum(plan, tho, 3):
        (w,) = p.solutions
        n = p.n
        assert w * (2 * n + 1) + tho.lam - tho.rho**2 / (4 * w * w) == pytest.approx(0.0, abs=1e-12)
        assert p.energies == pytest.approx((-(w * w),))
    with pytest.raises(NoRealSolution):
        predict_spectrum(plan, THOParams(1.0, 0.0, 1.0), 0)


def test_predicted_energies_monotone():
    plan = BUILTIN_PLANS["example1"]
    E = bound_state_energies(predict_spectrum(plan, THOParams(1.0, 0.0, 1.0), 6))
    assert all(b > a for a, b in zip(E, E[1:]))


def test_predict_spectrum_lambda_and_none():
    plan = ReductionPlan(1, 1, 0, parse("lambda"), "lam")
    (p,) = predict_spectrum(plan, THOParams(2.0, 4.0, 0.0), 0)
    assert p.solutions == pytest.approx((16.0 / 16.0 - 2.0,))
    (p,) = predict_spectrum(BUILTIN_PLANS["identity"], THOParams(1.0, 0.0, -1.0), 0)
    assert p.energies == (0.0,)


def test_plan_json_round_trip(tmp_path):
    for plan in BUILTIN_PLANS.values():
        again = ReductionPlan.from_json(json.loads(json.dumps(plan.to_json())))
        assert again.to_json() == plan.to_json()
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(BUILTIN_PLANS["example2"].to_json()))
    assert get_plan(str(path)).to_json() == BUILTIN_PLANS["example2"].to_json()
    with pytest.raises(KeyError):
        get_plan("no-such-plan")


def test_pg_coefficients_and_model():
    p = PGParams(1, 1, 2)
    assert pg_coefficients(p) == [Fraction(1), Fraction(2), Fraction(3, 2)]
    assert evaluate(pg_expression(p), 0.0) == 2.0
    assert to_text(pg_quadratic_model(p)) == "1 + q^2"
    with pytest.raises(ValueError):
        PGParams(1, 1, 0)


def test_pg_origin_is_flat_to_second_order():
    # the q^2 terms cancel, so the origin is a degenerate minimum
    V = Potential(pg_expression(PGParams(1, 1, 2)))
    assert V.derivative(0.0, 2) == pytest.approx(0.0, abs=1e-12)
    # Taylor oracle: (2 + 2q^2 + 1.5q^4)(1 - q^2 + q^4/2) = 2 + 0 q^2 + 0.5 q^4 + O(q^6)
    q = 1e-2
    assert V(q) == pytest.approx(2 + 0.5 * q**4, abs=1e-11)


def test_reduction_check_parts_report_each_coefficient():
    plan = BUILTIN_PLANS["example1"]
    V = Potential.from_text("q^2", Domain.half_line())
    res = reduction_check(plan, V, CHECK, THOParams(1.0, 1.0, 1.0))
    assert res.parts["c1"] < 1e-12 and res.parts["c2"] < 1e-12
    assert res.parts["c0"] > 1.0


def test_diffop_apply():
    op = DiffOp2(const(-1), const(0), parse("q^2"))
    out = op.apply(parse("exp(-q^2/2)"))
    x = 0.7
    assert evaluate(out, x) == pytest.approx(math.exp(-x * x / 2))
