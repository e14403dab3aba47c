"""Hermite-Pade approximants of F, G and 1.

For degrees (d1, d2, d3) we look for polynomials A, B, C with deg A <= d1,
deg B <= d2, deg C <= d3 such that R = A*F + B*G + C vanishes to order at
least d1+d2+d3+2.  Unknowns are ordered as the coefficients of A, then B,
then C, each in ascending powers of z.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact_algebra import (
    Poly,
    TruncatedSeries,
    format_scalar,
    kernel_basis,
    primitive_integer_vector,
)
from .mahler_catalog import MahlerSystem, expand_pair

PATTERNS = {
    "thm1": (0, 1, -1),
    "thm2": (0, 1, -1),
    "thm3": (0, 0, 0),
    "thm4": (0, 0, 0),
    "thm5": (0, -1, 0),
}


class DegenerateApproximationError(ValueError):
    pass


class IncreaseSeriesOrderError(ValueError):
    pass


@dataclass(frozen=True)
class ApproxTriple:
    A: Poly
    B: Poly
    C: Poly
    degrees: tuple
    remainder: TruncatedSeries
    o: int
    system: str = ""

    @property
    def d_bar(self) -> int:
        return max(self.degrees)

    def vector(self) -> list:
        d1, d2, d3 = self.degrees
        return (
            [self.A.coeff(i) for i in range(d1 + 1)]
            + [self.B.coeff(i) for i in range(d2 + 1)]
            + [self.C.coeff(i) for i in range(d3 + 1)]
        )

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "degrees": list(self.degrees),
            "A": self.A.to_json(),
            "B": self.B.to_json(),
            "C": self.C.to_json(),
            "o": self.o,
            "remainder_prefix": [[e, format_scalar(v)] for e, v in self.remainder.nonzero_terms(8)],
        }


@dataclass(frozen=True)
class ApproximantSpace:
    """All approximants of given degrees, as the reduced-echelon kernel basis.

    ``orders[i]`` is the remainder order of ``basis[i]`` or None when that
    remainder vanishes through the truncation order.
    """

    system: MahlerSystem
    degrees: tuple
    series_order: int
    basis: tuple
    orders: tuple

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def min_order(self):
        known = [o for o in self.orders if o is not None]
        return min(known) if known else None

    def canonical_index(self) -> int:
        """Index of the first basis vector attaining the minimal remainder order."""
        o_min = self.min_order
        if o_min is None:
            raise IncreaseSeriesOrderError(
                f"remainder vanishes through z^{self.series_order} for degrees {self.degrees}; "
                "increase series_order"
            )
        return self.orders.index(o_min)

    def combine(self, weights: Sequence) -> ApproxTriple:
        """Triple for the linear combination sum(weights[i] * basis[i])."""
        if len(weights) != self.dimension:
            raise ValueError("one weight per basis vector is required")
        n = len(self.basis[0].vector())
        vec = [0] * n
        for w, t in zip(weights, self.basis):
            if w:
                for i, x in enumerate(t.vector()):
                    vec[i] += w * x
        return _triple_from_vector(self.system, self.degrees, vec, self.series_order)


def default_series_order(degrees: Sequence[int]) -> int:
    n = sum(degrees)
    return (n + 2) + (n + 4)


def degree_pattern(theorem: str, k: int) -> tuple:
    if theorem not in PATTERNS:
        raise ValueError(f"unknown theorem id {theorem!r}; expected one of {', '.join(PATTERNS)}")
    degrees = tuple(k + off for off in PATTERNS[theorem])
    if min(degrees) < 0:
        raise ValueError(f"k={k} is too small for pattern {theorem}")
    return degrees


def constraint_rows(f: TruncatedSeries, g: TruncatedSeries, degrees: Sequence[int]) -> list:
    """Rows forcing the coefficients 0..d1+d2+d3+1 of A*F + B*G + C to vanish."""
    d1, d2, d3 = degrees
    rows = []
    for i in range(d1 + d2 + d3 + 2):
        row = [f[i - j] if i >= j else 0 for j in range(d1 + 1)]
        row += [g[i - j] if i >= j else 0 for j in range(d2 + 1)]
        row += [1 if i == j else 0 for j in range(d3 + 1)]
        rows.append(row)
    return rows


def _split(vec: Sequence, degrees: Sequence[int]) -> tuple:
    d1, d2, d3 = degrees
    return (
        Poly(vec[: d1 + 1]),
        Poly(vec[d1 + 1: d1 + d2 + 2]),
        Poly(vec[d1 + d2 + 2: d1 + d2 + d3 + 3]),
    )


def remainder_series(system: MahlerSystem, A: Poly, B: Poly, C: Poly, order: int) -> TruncatedSeries:
    pair = expand_pair(system, order)
    return pair.f * A + pair.g * B + C


def _triple_from_vector(system: MahlerSystem, degrees, vec, order) -> ApproxTriple:
    ints = primitive_integer_vector(vec)
    A, B, C = _split(ints, degrees)
    if A.is_zero() and B.is_zero():
        raise DegenerateApproximationError(f"approximant with A = B = 0 for degrees {degrees}")
    R = remainder_series(system, A, B, C, order)
    o = R.valuation()
    return ApproxTriple(A, B, C, tuple(degrees), R, -1 if o is None else o, system.name)


def approximant_space(system: MahlerSystem, degrees: Sequence[int], series_order: int | None = None) -> ApproximantSpace:
    degrees = tuple(int(x) for x in degrees)
    if len(degrees) != 3 or min(degrees) < 0:
        raise ValueError("degrees must be three nonnegative integers")
    n = sum(degrees)
    N = default_series_order(degrees) if series_order is None else series_order
    if N < n + 1:
        raise ValueError(f"series_order must be at least {n + 1}")
    pair = expand_pair(system, N)
    rows = constraint_rows(pair.f, pair.g, degrees)
    basis = []
    orders = []
    for v in kernel_basis(rows, n + 3):
        t = _triple_from_vector(system, degrees, v, N)
        basis.append(t)
        orders.append(None if t.o < 0 else t.o)
    if not basis:
        raise DegenerateApproximationError(f"empty kernel for degrees {degrees}")
    return ApproximantSpace(system, degrees, N, tuple(basis), tuple(orders))


def solve(system: MahlerSystem, degrees: Sequence[int], series_order: int | None = None) -> ApproxTriple:
    """Canonical approximant of the given degrees.

    When the solution space has dimension one this is its primitive integer
    generator.  Otherwise the first reduced-echelon basis vector whose
    remainder order equals the minimum over the space is returned, so the
    reported o is the order of a generic approximant.
    """
    space = approximant_space(system, degrees, series_order)
    return space.basis[space.canonical_index()]


def verify_ok(triple: ApproxTriple, expected_o: int) -> bool:
    return triple.o == expected_o


def scalar_equivalent(u: Sequence, v: Sequence) -> bool:
    """True iff u = c*v for a nonzero rational c (cross-multiplication test)."""
    if len(u) != len(v):
        return False
    u = [Fraction(x) for x in u]
    v = [Fraction(x) for x in v]
    iu = next((i for i, x in enumerate(u) if x), None)
    iv = next((i for i, x in enumerate(v) if x), None)
    if iu is None or iv is None or iu != iv:
        return False
    return all(x * v[iu] == y * u[iu] for x, y in zip(u, v))
