import json
from fractions import Fraction
from importlib import resources

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cached_space, cached_solve
from mahler_measures.exact_algebra import Poly, matrix_rank
from mahler_measures.hermite_pade import (
    IncreaseSeriesOrderError,
    approximant_space,
    constraint_rows,
    degree_pattern,
    remainder_series,
    scalar_equivalent,
    solve,
    verify_ok,
)
from mahler_measures.mahler_catalog import BUILTIN_NAMES, builtin, expand_pair

REFERENCE_ROWS = json.loads(resources.files("mahler_measures").joinpath("data/golden.json").read_text())["approximants"]
PATTERN_OF = {"lambert3": "thm3", "rudin": "thm4", "dilcher": "thm5"}


def poly_of(strings):
    return Poly([Fraction(s) for s in strings])


def test_degree_patterns():
    assert degree_pattern("thm1", 29) == (29, 30, 28)
    assert degree_pattern("thm3", 19) == (19, 19, 19)
    assert degree_pattern("thm5", 10) == (10, 9, 10)
    with pytest.raises(ValueError):
        degree_pattern("thm9", 3)
    with pytest.raises(ValueError):
        degree_pattern("thm1", 0)


def test_lambert_k19():
    t = cached_solve("lambert3", (19, 19, 19))
    reference = Poly.from_json(["-4", "56", "0", "0", "0", "1", "0", "15", "0", "12", "56", "1", "0", "15",
                              "0", "0", "0", "1", "-4", "-153"])
    assert scalar_equivalent(list(t.A.coeffs), list(reference.coeffs))
    assert t.o == 59
    lead = t.remainder.nonzero_terms(2)
    assert [e for e, _ in lead] == [59, 61] and lead[1][1] == 15 * lead[0][1]


def test_rudin_k17():
    t = cached_solve("rudin", (17, 17, 17))
    reference = Poly({2: 1, 3: -1, 4: -1, 5: -1, 14: 1, 15: -1, 16: 1, 17: 1}.get(i, 0) for i in range(18))
    assert scalar_equivalent(list(t.A.coeffs), list(reference.coeffs))
    assert t.o == 53
    lead = t.remainder.nonzero_terms(2)
    assert [e for e, _ in lead] == [53, 61] and lead[1][1] == -lead[0][1]


def test_dilcher_k10():
    t = cached_solve("dilcher", (10, 9, 10))
    reference = Poly({1: -1, 2: 1, 4: -2, 5: -1, 6: 1, 8: -1, 9: -1, 10: 1}.get(i, 0) for i in range(11))
    assert scalar_equivalent(list(t.A.coeffs), list(reference.coeffs))
    assert t.o == 31
    lead = t.remainder.nonzero_terms(2)
    assert [e for e, _ in lead] == [31, 47] and lead[1][1] == -lead[0][1]


def test_verify_ok():
    t = cached_solve("lambert3", (19, 19, 19))
    assert verify_ok(t, 59) and not verify_ok(t, 60)
    d = cached_solve("dilcher", (26, 25, 26))
    assert verify_ok(d, 79) and not verify_ok(d, 80)


def test_scalar_equivalence():
    assert scalar_equivalent([0, 2, -4], [0, Fraction(-1, 2), 1])
    assert not scalar_equivalent([0, 2, -4], [0, 2, 4])
    assert not scalar_equivalent([0, 0], [0, 0])
    assert not scalar_equivalent([1, 2], [1, 2, 3])


@settings(max_examples=50)
@given(st.lists(st.integers(-9, 9), min_size=1, max_size=6), st.fractions().filter(bool))
def test_scalar_equivalence_property(v, c):
    scaled = [c * x for x in v]
    assert scalar_equivalent(v, scaled) == any(v)


def test_too_short_series_order_is_reported():
    with pytest.raises(IncreaseSeriesOrderError, match="increase series_order"):
        solve(builtin("thue"), (2, 3, 1), series_order=7)


def test_series_order_must_cover_constraints():
    with pytest.raises(ValueError):
        approximant_space(builtin("thue"), (2, 3, 1), series_order=5)


@pytest.mark.parametrize("name", BUILTIN_NAMES)
@pytest.mark.parametrize("k", [3, 6, 11])
def test_approximant_invariants(name, k):
    degrees = (k, k + 1, k - 1) if name in ("thue", "stern") else (k, k, k)
    space = cached_space(name, degrees)
    system = builtin(name)
    n = sum(degrees)
    rows = constraint_rows(*(lambda p: (p.f, p.g))(expand_pair(system, n + 2)), degrees)
    assert space.dimension == n + 3 - matrix_rank(rows, n + 3)
    for t in space.basis:
        assert t.A.degree <= degrees[0] and t.B.degree <= degrees[1] and t.C.degree <= degrees[2]
        assert t.o >= n + 2
        assert all(isinstance(c, int) for c in t.vector())
        # remainder recomputed from scratch at a longer order has the same start
        again = remainder_series(system, t.A, t.B, t.C, t.remainder.order + 10)
        assert again.valuation() == t.o
    t = cached_solve(name, degrees)
    assert t.o == space.min_order


@pytest.mark.parametrize("name", sorted(REFERENCE_ROWS))
def test_reference_approximants_lie_in_solution_space(name):
    """Every reference (A, B) extends to an approximant of the reference order in our space."""
    system = builtin(name)
    for row in REFERENCE_ROWS[name]["rows"]:
        degrees = degree_pattern(PATTERN_OF[name], row["k"])
        A, B = poly_of(row["A"]), poly_of(row["B"])
        pair = expand_pair(system, 3 * sum(degrees))
        S = pair.f * A + pair.g * B
        C = -Poly([S[i] for i in range(degrees[2] + 1)])
        R = S + C
        assert R.valuation() == row["o"]
        space = cached_space(name, degrees)
        vec = ([A.coeff(i) for i in range(degrees[0] + 1)] + [B.coeff(i) for i in range(degrees[1] + 1)]
               + [C.coeff(i) for i in range(degrees[2] + 1)])
        basis = [t.vector() for t in space.basis]
        assert matrix_rank(basis + [vec]) == space.dimension
        assert space.min_order == row["o"]
