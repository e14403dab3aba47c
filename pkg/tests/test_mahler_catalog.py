import json
from fractions import Fraction

import pytest

import oracles
from mahler_measures.exact_algebra import Poly
from mahler_measures.mahler_catalog import (
    BUILTIN_NAMES,
    MahlerSystem,
    UnderDeterminedError,
    builtin,
    coefficient_bound,
    expand_pair,
    functional_residuals,
    load_system,
    phi,
    ptilde,
    system_from_json,
    system_to_json,
)

N = 500


def ints(series):
    return [int(c) for c in series.coeffs]


def test_thue_polynomials():
    s = builtin("thue")
    assert s.d == 2 and s.P == Poly([1, -2, 1]) and s.P11 == Poly([1, -1]) and s.P22 == Poly([1])
    assert s.P12.is_zero() and s.P21.is_zero() and s.P10.is_zero() and s.P20.is_zero()


def test_lambert_polynomials():
    s = builtin("lambert3")
    assert s.d == 3 and s.P == Poly([1, 0, -1])
    assert s.P10 == Poly([0, -1, -1]) and s.P20 == Poly([0, -1, 1])
    assert s.P11 == s.P22 == Poly([1, 0, -1])


def test_dilcher_polynomials():
    s = builtin("dilcher")
    assert s.d == 4 and s.P == Poly([1]) and s.P11.is_zero() and s.P12 == Poly([1])
    assert s.P21 == Poly([0, -1]) and s.P22 == Poly([1, 1, 1])


def test_unknown_builtin_lists_names():
    with pytest.raises(ValueError, match="thue"):
        builtin("fibonacci")


def test_thue_expansion_small():
    assert ints(expand_pair(builtin("thue"), 7).f) == [1, -1, -1, 1, -1, 1, 1, -1]


def test_lambert_expansion_small():
    assert ints(expand_pair(builtin("lambert3"), 9).f) == [0, 1, 1, 2, 1, 1, 2, 1, 1, 3]


def test_dilcher_constant_term():
    assert expand_pair(builtin("dilcher"), 0).f[0] == 1


def test_series_against_closed_forms():
    thue = expand_pair(builtin("thue"), N)
    t = oracles.thue_series(N)
    assert ints(thue.f) == t == oracles.digit_sum_sign(N)
    assert ints(thue.g) == oracles.convolve(t, t)[: N + 1]

    stern = expand_pair(builtin("stern"), N)
    assert ints(stern.f) == oracles.stern_series(N)
    assert ints(stern.g) == oracles.stern_companion(N)

    lam = expand_pair(builtin("lambert3"), N)
    assert ints(lam.f) == oracles.lambert_double_sum(N)
    assert ints(lam.f)[1:] == [1 + oracles.v3(n) for n in range(1, N + 1)]
    assert ints(lam.g) == oracles.lambert_double_sum(N, alternating=True)

    rudin = expand_pair(builtin("rudin"), N)
    r, q = oracles.rudin_shapiro(N)
    assert ints(rudin.f) == r and ints(rudin.g) == q

    dil = expand_pair(builtin("dilcher"), N)
    f = oracles.dilcher_series(N)
    assert ints(dil.f) == f
    assert ints(dil.g) == [f[n // 4] if n % 4 == 0 else 0 for n in range(N + 1)]


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_functional_equations_hold(name):
    res_f, res_g = functional_residuals(expand_pair(builtin(name), 400))
    assert res_f.is_zero() and res_g.is_zero()


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_expansion_is_prefix_stable(name):
    system = builtin(name)
    short = expand_pair(system, 40)
    long = expand_pair(system, 200)
    assert list(short.f.coeffs) == list(long.f.coeffs[:41])
    assert list(short.g.coeffs) == list(long.g.coeffs[:41])


def test_phi_examples():
    assert phi(builtin("thue")) == Poly([1, -1]) ** 3
    assert phi(builtin("dilcher")) == Poly([0, 1])
    assert phi(builtin("stern")) == -Poly([1, 1, 1])


def test_ptilde_examples():
    assert ptilde(builtin("thue")) == Poly([1, 1])
    assert ptilde(builtin("stern")) == Poly([1])
    assert ptilde(builtin("lambert3")) == Poly([1, 0, 1])


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_coefficient_bounds_hold(name):
    system = builtin(name)
    pair = expand_pair(system, N)
    for n in range(N + 1):
        bound = coefficient_bound(system, n)
        assert abs(pair.f[n]) <= bound and abs(pair.g[n]) <= bound


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_linear_majorant_dominates_bound(name):
    system = builtin(name)
    alpha, beta = system.bound.linear_majorant()
    for n in range(0, 3000, 7):
        assert system.bound(n) <= alpha + beta * n


def test_thue_bound_is_tight_for_square():
    pair = expand_pair(builtin("thue"), 64)
    assert max(abs(c) for c in pair.g.coeffs) > 1


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_json_round_trip(name, tmp_path):
    system = builtin(name)
    data = system_to_json(system)
    path = tmp_path / f"{name}.json"
    path.write_text(json.dumps(data))
    again = load_system(str(path))
    assert system_to_json(again) == data
    assert ints(expand_pair(again, 60).f) == ints(expand_pair(system, 60).f)


def test_json_rejects_unknown_fields():
    data = system_to_json(builtin("thue"))
    data["bogus"] = 1
    with pytest.raises(ValueError):
        system_from_json(data)


def test_invalid_systems_rejected():
    one, zero = Poly([1]), Poly()
    with pytest.raises(ValueError):
        MahlerSystem("bad", 1, one, one, zero, zero, one, zero, zero, (1,), (1,))
    with pytest.raises(ValueError):
        MahlerSystem("bad", 2, zero, one, zero, zero, one, zero, zero, (1,), (1,))
    with pytest.raises(ValueError):
        MahlerSystem("bad", 2, one, one, one, one, one, zero, zero, (1,), (1,))


def test_underdetermined_system_reported():
    # F(z^2) = F(z) leaves every coefficient free without seeds
    one, zero = Poly([1]), Poly()
    system = MahlerSystem("flat", 2, one, one, zero, zero, one, zero, zero, (), ())
    with pytest.raises(UnderDeterminedError, match="under-determined"):
        expand_pair(system, 5)


def test_fraction_seeds_allowed():
    one, zero = Poly([1]), Poly()
    system = MahlerSystem("half", 2, Poly([1, -1]), one, zero, zero, one, zero, zero, (Fraction(1, 2),), (1,))
    pair = expand_pair(system, 6)
    assert pair.f[0] == Fraction(1, 2)
