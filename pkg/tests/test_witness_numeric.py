import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import cached_solve
from mahler_measures.certificates import forms_at_level
from mahler_measures.exponent_engine import pattern_growth
from mahler_measures.hermite_pade import degree_pattern
from mahler_measures.mahler_catalog import builtin
from mahler_measures.witness_numeric import (
    BallValue,
    decay_report,
    decay_tsv,
    eval_gamma,
    integer_forms,
    lambda_upper,
    power_at_most,
    remainder_ball,
    scaler_exponent,
    tail_majorant,
)

small = st.fractions(min_value=-20, max_value=20, max_denominator=50)
radii = st.fractions(min_value=0, max_value=5, max_denominator=50)
unit = st.fractions(min_value=-1, max_value=1, max_denominator=50)


def ball_and_member(center, radius, t):
    return BallValue(center, radius), center + t * radius


@given(small, radii, unit, small, radii, unit)
def test_ball_operations_enclose(c1, r1, t1, c2, r2, t2):
    a, x = ball_and_member(c1, r1, t1)
    b, y = ball_and_member(c2, r2, t2)
    assert (a + b).contains(x + y)
    assert (a - b).contains(x - y)
    assert (a * b).contains(x * y)
    assert (a * 3).contains(3 * x)
    assert abs(x) <= a.abs_upper()


def test_ball_rejects_negative_radius():
    with pytest.raises(ValueError):
        BallValue(Fraction(0), Fraction(-1))


def test_sign_definite():
    assert BallValue(Fraction(1), Fraction(1, 2)).sign_definite()
    assert not BallValue(Fraction(1), Fraction(1)).sign_definite()


@given(st.integers(0, 5), st.integers(0, 5), st.fractions(min_value=0, max_value=Fraction(9, 10), max_denominator=20),
       st.integers(0, 30), st.integers(1, 30))
def test_tail_majorant_differences_are_partial_sums(alpha, beta, x, N, extra):
    M = N + extra
    partial = sum((alpha + beta * n) * x ** n for n in range(N + 1, M + 1))
    assert tail_majorant(alpha, beta, x, N) - tail_majorant(alpha, beta, x, M) == partial


def test_tail_majorant_domain():
    with pytest.raises(ValueError):
        tail_majorant(1, 0, Fraction(1), 3)


def test_eval_gamma_thue_against_product():
    target = Fraction(1, 2 ** 80)
    f, g = eval_gamma(builtin("thue"), 1, 2, target)
    assert f.radius <= target and g.radius <= target
    coeffs = oracles.thue_series(300)
    approx = oracles.evaluate(coeffs, Fraction(1, 2))
    # the oracle tail is at most sum_{n > 300} 2^-n
    assert f.intersects(BallValue(approx, Fraction(1, 2 ** 300)))
    sq = oracles.convolve(coeffs, coeffs)[:301]
    gq = oracles.evaluate(sq, Fraction(1, 2))
    assert g.intersects(BallValue(gq, Fraction(400, 2 ** 300)))


def test_eval_gamma_lambert_negative_point():
    f, g = eval_gamma(builtin("lambert3"), -1, 3, Fraction(1, 10 ** 20))
    partial = oracles.evaluate(oracles.lambert_double_sum(200), Fraction(-1, 3))
    assert f.intersects(BallValue(partial, Fraction(1, 3 ** 150)))


def test_eval_gamma_preconditions():
    with pytest.raises(ValueError):
        eval_gamma(builtin("thue"), 0, 2, Fraction(1, 10))
    with pytest.raises(ValueError):
        eval_gamma(builtin("thue"), 2, 2, Fraction(1, 10))


@pytest.mark.parametrize("name,pattern,k", [("thue", "thm1", 29), ("rudin", "thm4", 17), ("dilcher", "thm5", 10),
                                            ("lambert3", "thm3", 19), ("stern", "thm2", 29)])
@pytest.mark.parametrize("a,b", [(1, 2), (1, 3), (2, 5)])
def test_integer_forms_are_exact(name, pattern, k, a, b):
    system = builtin(name)
    t = cached_solve(name, degree_pattern(pattern, k))
    growth = pattern_growth(system, pattern, [k])
    for m in range(3):
        form = integer_forms(system, t, m, a, b, growth)
        forms = forms_at_level(system, t, m)
        x = Fraction(a, b)
        assert form.scaler == b ** form.scaler_exponent
        assert form.a_coeff == form.scaler * forms.A(x)
        assert form.b_coeff == form.scaler * forms.B(x)
        assert form.c_coeff == form.scaler * forms.C(x)


def test_scaler_exponent_is_integral_for_builtins():
    growth = pattern_growth(builtin("lambert3"), "thm3", [19])
    # (19 + 1) * 3^m - 1
    assert [scaler_exponent(growth, 19, m) for m in range(3)] == [19, 59, 179]


def test_lambda_upper():
    assert lambda_upper(1, 7) == 0
    assert lambda_upper(4, 8) == Fraction(2, 3)
    lam = lambda_upper(2, 5)
    assert lam >= Fraction(math.log(2) / math.log(5)) - Fraction(1, 10 ** 12)
    assert 2 ** lam.denominator <= 5 ** lam.numerator


def test_power_at_most():
    assert power_at_most(Fraction(1, 8), 2, -3)
    assert not power_at_most(Fraction(1, 7), 2, -3)
    assert power_at_most(Fraction(1, 2), 4, Fraction(-1, 2))


def test_remainder_ball_matches_linear_form():
    system = builtin("rudin")
    t = cached_solve("rudin", (17, 17, 17))
    growth = pattern_growth(system, "thm4", [17])
    form = integer_forms(system, t, 1, 1, 3, growth)
    series_side = remainder_ball(system, t, 1, 1, 3, form.scaler_exponent)
    f, g = eval_gamma(system, 1, 3, Fraction(1, 10 ** 60))
    direct = f * form.a_coeff + g * form.b_coeff + form.c_coeff
    assert direct.intersects(series_side)


def test_decay_report_rudin():
    system = builtin("rudin")
    t = cached_solve("rudin", (17, 17, 17))
    rows = decay_report(system, t, [0, 1, 2], 1, 3, pattern_growth(system, "thm4", [17]))
    assert [r.m for r in rows] == [0, 1, 2]
    assert all(r.enclosure.sign_definite() and r.consistent for r in rows)
    assert all(r.predicted == -35 for r in rows)
    tsv = decay_tsv(rows)
    assert tsv.splitlines()[0].split("\t") == ["m", "r_lower", "r_upper", "empirical_exponent", "predicted"]
    assert len(tsv.splitlines()) == 4


def test_decay_report_level_range():
    system = builtin("rudin")
    t = cached_solve("rudin", (17, 17, 17))
    with pytest.raises(ValueError):
        decay_report(system, t, [4], 1, 3, pattern_growth(system, "thm4", [17]))
