"""Rigorous numerical witnesses at rational points z = a/b.

Real numbers are enclosed by balls with exact rational center and radius.
Series tails are bounded with the system's coefficient bound, so every
enclosure is a proof, not an estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .certificates import FormsAtLevel, forms_at_level
from .exact_algebra import Poly, format_scalar
from .exponent_engine import GrowthParams
from .hermite_pade import ApproxTriple, remainder_series
from .mahler_catalog import MahlerSystem, expand_pair


class InsufficientPrecisionError(ValueError):
    pass


@dataclass(frozen=True)
class BallValue:
    center: Fraction
    radius: Fraction

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")

    @classmethod
    def exact(cls, x) -> "BallValue":
        return cls(Fraction(x), Fraction(0))

    def __add__(self, other):
        if not isinstance(other, BallValue):
            other = BallValue.exact(other)
        return BallValue(self.center + other.center, self.radius + other.radius)

    __radd__ = __add__

    def __neg__(self):
        return BallValue(-self.center, self.radius)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, BallValue):
            c = Fraction(other)
            return BallValue(self.center * c, self.radius * abs(c))
        return BallValue(
            self.center * other.center,
            abs(self.center) * other.radius + abs(other.center) * self.radius + self.radius * other.radius,
        )

    __rmul__ = __mul__

    @property
    def lower(self) -> Fraction:
        return self.center - self.radius

    @property
    def upper(self) -> Fraction:
        return self.center + self.radius

    def abs_upper(self) -> Fraction:
        return abs(self.center) + self.radius

    def contains(self, x) -> bool:
        return abs(Fraction(x) - self.center) <= self.radius

    def intersects(self, other: "BallValue") -> bool:
        return abs(self.center - other.center) <= self.radius + other.radius

    def sign_definite(self) -> bool:
        return self.radius < abs(self.center)

    def to_json(self) -> dict:
        return {"center": format_scalar(self.center), "radius": format_scalar(self.radius)}


def tail_majorant(alpha: Fraction, beta: Fraction, x: Fraction, N: int) -> Fraction:
    """Closed form of sum_{n > N} (alpha + beta*n) x^n for 0 <= x < 1."""
    x = Fraction(x)
    if not 0 <= x < 1:
        raise ValueError("tail majorant needs 0 <= x < 1")
    p = x ** (N + 1)
    geometric = alpha * p / (1 - x)
    linear = beta * p * ((N + 1) * (1 - x) + x) / (1 - x) ** 2
    return geometric + linear


def _series_ball(coeffs: Sequence, x: Fraction, tail: Fraction) -> BallValue:
    total = Fraction(0)
    for c in reversed(coeffs):
        total = total * x + c
    return BallValue(total, tail)


def _check_point(a: int, b: int) -> Fraction:
    if b < 2 or a == 0 or abs(a) >= b:
        raise ValueError("need 0 < |a| < b and b >= 2")
    return Fraction(a, b)


def eval_gamma(system: MahlerSystem, a: int, b: int, target_radius) -> tuple:
    """Balls around F(a/b) and G(a/b) with radius at most target_radius."""
    x = _check_point(a, b)
    if system.bound is None:
        raise ValueError(f"system {system.name!r} has no coefficient bound")
    target = Fraction(target_radius)
    if target <= 0:
        raise ValueError("target radius must be positive")
    alpha, beta = system.bound.linear_majorant()
    ax = abs(x)
    N = 16
    while True:
        tail = tail_majorant(alpha, beta, ax, N)
        if tail <= target:
            break
        N *= 2
    pair = expand_pair(system, N)
    return _series_ball(pair.f.coeffs, x, tail), _series_ball(pair.g.coeffs, x, tail)


@dataclass(frozen=True)
class IntegerLinearForm:
    k: int
    m: int
    a_coeff: int
    b_coeff: int
    c_coeff: int
    scaler: int
    scaler_exponent: int

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "m": self.m,
            "a_coeff": str(self.a_coeff),
            "b_coeff": str(self.b_coeff),
            "c_coeff": str(self.c_coeff),
            "scaler_exponent": self.scaler_exponent,
        }


def scaler_exponent(growth: GrowthParams, k: int, m: int) -> int:
    """Exponent of b in Q_{k,m}: (e + tau/(d-1)) d^m - tau/(d-1), rounded up."""
    d = growth.d
    t = Fraction(growth.tau, d - 1)
    value = (growth.e_bar[k] + t) * d ** m - t
    return math.ceil(value)


def _scaled_value(p: Poly, a: int, b: int, q_exp: int) -> int:
    value = Fraction(0)
    for i, c in p.terms():
        value += Fraction(c * a ** i) * Fraction(b) ** (q_exp - i)
    if value.denominator != 1:
        raise ArithmeticError(
            f"scaled form is not an integer (degree {p.degree} exceeds exponent {q_exp}); degree bound violated"
        )
    return value.numerator


def integer_forms(system: MahlerSystem, triple: ApproxTriple, m: int, a: int, b: int, growth: GrowthParams) -> IntegerLinearForm:
    _check_point(a, b)
    k = triple.degrees[0]
    forms = forms_at_level(system, triple, m)
    q_exp = scaler_exponent(growth, k, m)
    return IntegerLinearForm(
        k, m,
        _scaled_value(forms.A, a, b, q_exp),
        _scaled_value(forms.B, a, b, q_exp),
        _scaled_value(forms.C, a, b, q_exp),
        b ** q_exp,
        q_exp,
    )


def lambda_upper(a: int, b: int, q: int = 64) -> Fraction:
    """log|a| / log b exactly when |a|^s = b^r for small s, else a rational upper bound."""
    a = abs(a)
    if a == 1:
        return Fraction(0)
    for s in range(1, q + 1):
        for r in range(1, s + 1):
            lhs, rhs = a ** s, b ** r
            if lhs == rhs:
                return Fraction(r, s)
            if rhs > lhs:
                break
    # smallest p with a^q <= b^p
    p = 0
    aq = a ** q
    while b ** p < aq:
        p += 1
    return Fraction(p, q)


def remainder_ball(system: MahlerSystem, triple: ApproxTriple, m: int, a: int, b: int, q_exp: int, order: Optional[int] = None) -> BallValue:
    """Enclosure of Q * R_{k,m}(a/b) from the series side.

    R_{k,m}(x) = R_k(x^(d^m)) * prod_{j<m} P(x^(d^j)), and the tail of R_k
    is bounded by (|A|_1 + |B|_1) times the coefficient bound.
    """
    x = _check_point(a, b)
    if system.bound is None:
        raise ValueError(f"system {system.name!r} has no coefficient bound")
    N = order if order is not None else max(triple.remainder.order, 4 * sum(triple.degrees) + 16)
    R = remainder_series(system, triple.A, triple.B, triple.C, N)
    y = x ** (system.d ** m)
    alpha, beta = system.bound.linear_majorant()
    scale = Fraction(triple.A.l1_norm() + triple.B.l1_norm())
    tail = scale * tail_majorant(alpha, beta, abs(y), N)
    ball = _series_ball(R.coeffs, y, tail)
    for j in range(m):
        ball = ball * system.P(x ** (system.d ** j))
    return ball * Fraction(b) ** q_exp


@dataclass
class DecayRow:
    m: int
    enclosure: BallValue
    empirical_exponent: float
    predicted: Fraction
    bound_ok: bool
    series_side: BallValue
    consistent: bool

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "r_lower": format_scalar(self.enclosure.lower),
            "r_upper": format_scalar(self.enclosure.upper),
            "empirical_exponent": f"{self.empirical_exponent:.6f}",
            "predicted": format_scalar(self.predicted),
            "bound_ok": self.bound_ok,
            "series_side_consistent": self.consistent,
        }


def _log_abs(x: Fraction) -> float:
    x = abs(Fraction(x))
    return math.log(x.numerator) - math.log(x.denominator)


def power_at_most(value: Fraction, b: int, exponent: Fraction) -> bool:
    """Exact test of value <= b**exponent for value > 0 and rational exponent."""
    exponent = Fraction(exponent)
    p, q = exponent.numerator, exponent.denominator
    return Fraction(value) ** q <= Fraction(b) ** p


def decay_report(system: MahlerSystem, triple: ApproxTriple, m_range: Sequence[int], a: int, b: int,
                 growth: GrowthParams, tolerance=1, max_rounds: int = 40) -> list:
    """Enclose r_{k,m} = a_{k,m} F(a/b) + b_{k,m} G(a/b) + c_{k,m} and compare with -V(k)."""
    _check_point(a, b)
    k = triple.degrees[0]
    lam = lambda_upper(a, b)
    V = growth.V(k, triple.o).at(lam)
    rows = []
    for m in m_range:
        if not 0 <= m <= 3:
            raise ValueError("m must lie in {0, 1, 2, 3}")
        form = integer_forms(system, triple, m, a, b, growth)
        size = abs(form.a_coeff) + abs(form.b_coeff) + 1
        target = Fraction(1, 2 ** 64 * size)
        for _ in range(max_rounds):
            g1, g2 = eval_gamma(system, a, b, target)
            r = g1 * form.a_coeff + g2 * form.b_coeff + form.c_coeff
            if r.sign_definite() and r.radius * 2 ** 16 <= abs(r.center):
                break
            target /= 2 ** 64
        else:
            raise InsufficientPrecisionError(
                f"enclosure of r_{{{k},{m}}} still contains 0; use a smaller target radius"
            )
        series_side = remainder_ball(system, triple, m, a, b, form.scaler_exponent)
        exponent = _log_abs(r.center) / math.log(b) / system.d ** m
        bound_ok = power_at_most(r.abs_upper(), b, -(V - tolerance) * system.d ** m)
        rows.append(DecayRow(m, r, exponent, -V, bound_ok, series_side, r.intersects(series_side)))
    return rows


def decay_tsv(rows: Sequence[DecayRow]) -> str:
    lines = ["m\tr_lower\tr_upper\tempirical_exponent\tpredicted"]
    for row in rows:
        lines.append(
            f"{row.m}\t{format_scalar(row.enclosure.lower)}\t{format_scalar(row.enclosure.upper)}\t"
            f"{row.empirical_exponent:.6f}\t{format_scalar(row.predicted)}"
        )
    return "\n".join(lines) + "\n"
