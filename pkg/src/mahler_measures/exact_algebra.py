"""Exact arithmetic substrate: polynomials, truncated power series, kernels.

Everything here works over Python integers and ``fractions.Fraction``.
No floating point is used anywhere in this module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

Scalar = Union[int, Fraction]

INFINITY = math.inf


def _normalize_scalar(x: Scalar) -> Scalar:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, int):
        return x
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def parse_scalar(text: str) -> Scalar:
    """Parse an integer or a "num/den" string into an exact scalar."""
    return _normalize_scalar(Fraction(text.strip()))


def format_scalar(x: Scalar) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class Poly:
    """Dense univariate polynomial with exact coefficients.

    ``coeffs[i]`` is the coefficient of z**i.  Trailing zeros are trimmed, so
    the zero polynomial has an empty coefficient tuple.  Integer-valued
    coefficients are stored as ``int`` so integer polynomials stay cheap.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        c = [_normalize_scalar(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = tuple(c)

    @classmethod
    def monomial(cls, exponent: int, coeff: Scalar = 1) -> "Poly":
        return cls([0] * exponent + [coeff])

    @classmethod
    def from_terms(cls, terms: dict) -> "Poly":
        if not terms:
            return cls()
        c = [0] * (max(terms) + 1)
        for e, v in terms.items():
            c[e] += v
        return cls(c)

    # basic queries

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.coeffs)

    def ord(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no order")
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        raise AssertionError("unreachable")

    def coeff(self, i: int) -> Scalar:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def terms(self) -> list:
        return [(i, c) for i, c in enumerate(self.coeffs) if c]

    # arithmetic

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            other = _normalize_scalar(other)
            return Poly([c * other for c in self.coeffs])
        return Poly(_convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result, base = Poly([1]), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __call__(self, x):
        """Evaluate by Horner's rule.  Works for any ring element x."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_power(self, d: int) -> "Poly":
        return compose_power(self, d)

    def shift(self, k: int) -> "Poly":
        """Multiply by z**k (k >= 0) or divide exactly by z**(-k)."""
        if not self.coeffs:
            return self
        if k >= 0:
            return Poly((0,) * k + self.coeffs)
        if any(self.coeffs[: -k]):
            raise ValueError("division by a power of z is not exact")
        return Poly(self.coeffs[-k:])

    def content(self) -> int:
        if not self.is_integral():
            raise ValueError("content is defined for integer polynomials")
        return reduce(math.gcd, (abs(c) for c in self.coeffs), 0)

    def abs_coeffs(self) -> "Poly":
        return Poly([abs(c) for c in self.coeffs])

    def l1_norm(self) -> Scalar:
        return sum(abs(c) for c in self.coeffs)

    # text formats

    def to_json(self) -> list:
        return [format_scalar(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence) -> "Poly":
        return cls(parse_scalar(str(x)) for x in data)

    def __repr__(self):
        return f"Poly({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mag = abs(c)
            sign = "-" if c < 0 else "+"
            if i == 0:
                body = format_scalar(mag)
            else:
                mono = "z" if i == 1 else f"z^{i}"
                body = mono if mag == 1 else f"{format_scalar(mag)}*{mono}"
            parts.append((sign, body))
        first_sign, first_body = parts[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


def _convolve(a: Sequence[Scalar], b: Sequence[Scalar]) -> list:
    if not a or not b:
        return []
    if len(a) < len(b):
        a, b = b, a
    out = [0] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if not bj:
            continue
        for i, ai in enumerate(a):
            if ai:
                out[i + j] += ai * bj
    return out


def poly_arith(p: Poly, q: Poly, op: str) -> Poly:
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}; expected add, sub or mul")


def compose_power(p: Poly, d: int) -> Poly:
    """Return p(z**d)."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    if d == 1 or not p.coeffs:
        return p
    out = [0] * (d * p.degree + 1)
    for i, c in enumerate(p.coeffs):
        out[d * i] = c
    return Poly(out)


def det3_poly(M: Sequence[Sequence[Poly]]) -> Poly:
    """Determinant of a 3x3 polynomial matrix by cofactor expansion along row 0."""
    if len(M) != 3 or any(len(row) != 3 for row in M):
        raise ValueError("det3_poly needs a 3x3 matrix")
    (a, b, c), (d, e, f), (g, h, i) = M
    return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)


def ord_and_primitive(p: Poly) -> tuple:
    """Split p as content * z**ord * primitive.

    The primitive part has positive constant term; the sign goes into the
    content, so the content may be negative.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    if not p.is_integral():
        raise ValueError("ord_and_primitive expects an integer polynomial")
    k = p.ord()
    shifted = p.shift(-k)
    g = shifted.content()
    if shifted.coeffs[0] < 0:
        g = -g
    return k, g, Poly([c // g for c in shifted.coeffs])


def nonzero_root_modulus_lower_bound(p: Poly):
    """Lower bound for the moduli of the nonzero complex roots of p.

    This is the Cauchy bound applied to the reversed polynomial of
    p / z**ord(p).  Returns ``INFINITY`` when p has no nonzero root.
    """
    if p.is_zero():
        raise ValueError("zero polynomial")
    q = p.shift(-p.ord())
    if q.degree == 0:
        return INFINITY
    a0 = abs(Fraction(q.coeffs[0]))
    top = max(abs(Fraction(c)) for c in q.coeffs[1:])
    return a0 / (a0 + top)


# Truncated power series


@dataclass(frozen=True)
class TruncatedSeries:
    """Power series known exactly through z**order.

    Coefficients beyond ``order`` are unknown and never inferred.
    """

    coeffs: tuple
    order: int

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("series needs exactly order+1 coefficients")

    @classmethod
    def from_list(cls, coeffs: Sequence[Scalar], order: int | None = None) -> "TruncatedSeries":
        if order is None:
            order = len(coeffs) - 1
        c = [_normalize_scalar(x) for x in coeffs[: order + 1]]
        if len(c) < order + 1:
            c.extend([0] * (order + 1 - len(c)))
        return cls(tuple(c), order)

    @classmethod
    def from_poly(cls, p: Poly, order: int) -> "TruncatedSeries":
        return cls.from_list(list(p.coeffs), order)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncatedSeries(self.coeffs[: order + 1], order)

    def __getitem__(self, n: int) -> Scalar:
        if n > self.order:
            raise IndexError(f"coefficient {n} is beyond the truncation order {self.order}")
        return self.coeffs[n] if n >= 0 else 0

    def __add__(self, other):
        if isinstance(other, Poly):
            other = TruncatedSeries.from_poly(other, self.order)
        n = min(self.order, other.order)
        return TruncatedSeries.from_list([self.coeffs[i] + other.coeffs[i] for i in range(n + 1)], n)

    def __neg__(self):
        return TruncatedSeries(tuple(-c for c in self.coeffs), self.order)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries.from_list([c * other for c in self.coeffs], self.order)
        if isinstance(other, Poly):
            n = self.order
            b = other.coeffs[: n + 1]
        else:
            n = min(self.order, other.order)
            b = other.coeffs[: n + 1]
        a = self.coeffs[: n + 1]
        out = [0] * (n + 1)
        for j, bj in enumerate(b):
            if not bj:
                continue
            for i in range(n + 1 - j):
                ai = a[i]
                if ai:
                    out[i + j] += ai * bj
        return TruncatedSeries.from_list(out, n)

    __rmul__ = __mul__

    def compose_power(self, d: int) -> "TruncatedSeries":
        """Return f(z**d); the result is exact through z**(d*(order+1)-1)."""
        if d < 1:
            raise ValueError("d must be a positive integer")
        n = d * (self.order + 1) - 1
        out = [0] * (n + 1)
        for i, c in enumerate(self.coeffs):
            out[d * i] = c
        return TruncatedSeries(tuple(out), n)

    def valuation(self):
        """Index of the first nonzero coefficient, or None if all known ones vanish."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return None

    def is_zero(self) -> bool:
        return self.valuation() is None

    def nonzero_terms(self, limit: int | None = None) -> list:
        out = []
        for i, c in enumerate(self.coeffs):
            if c:
                out.append((i, c))
                if limit is not None and len(out) >= limit:
                    break
        return out


# Exact linear algebra


def _integer_rows(rows: Sequence[Sequence[Scalar]]) -> list:
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // math.gcd(den, x.denominator)
        out.append([int(Fraction(x) * den) for x in r])
    return out


def fraction_free_rref(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> tuple:
    """Fraction-free Gauss-Jordan elimination.

    Returns ``(reduced_rows, pivot_columns, pivot_value)``.  Each pivot row
    has ``pivot_value`` at its pivot column and zeros in every other pivot
    column, so dividing by ``pivot_value`` gives the reduced row echelon
    form.  Pivots are chosen as the first nonzero entry in column order and
    then row order.  All divisions are exact.
    """
    M = _integer_rows(rows)
    if ncols is None:
        ncols = len(M[0]) if M else 0
    nrows = len(M)
    pivots = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        piv = next((i for i in range(r, nrows) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        prow = M[r]
        p = prow[c]
        for i in range(nrows):
            if i == r:
                continue
            row = M[i]
            f = row[c]
            if i > r:
                # columns before c are already zero below the pivot row
                if f:
                    row[c:] = [(p * x - f * y) // prev for x, y in zip(row[c:], prow[c:])]
                elif p != prev:
                    row[c:] = [p * x // prev for x in row[c:]]
            else:
                if f:
                    M[i] = [(p * x - f * y) // prev for x, y in zip(row, prow)]
                elif p != prev:
                    M[i] = [p * x // prev for x in row]
        prev = p
        pivots.append(c)
        r += 1
    return M, pivots, prev


def kernel_basis(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> list:
    """Basis of the right null space in reduced-echelon parametric form.

    One vector per free column: it has 1 in that free column, 0 in the other
    free columns, and the values forced on the pivot columns.  This basis
    depends only on the matrix, not on the elimination order.
    """
    if ncols is None:
        if not rows:
            raise ValueError("ncols is required for an empty matrix")
        ncols = len(rows[0])
    M, pivots, pv = fraction_free_rref(rows, ncols)
    pivot_set = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for row_index, pc in enumerate(pivots):
            v[pc] = Fraction(-M[row_index][free], pv)
        basis.append(tuple(_normalize_scalar(x) for x in v))
    return basis


def matrix_rank(rows: Sequence[Sequence[Scalar]], ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(fraction_free_rref(rows, ncols)[1])


def primitive_integer_vector(v: Sequence[Scalar]) -> list:
    """Scale a rational vector to coprime integers with first nonzero entry positive."""
    den = 1
    for x in v:
        x = Fraction(x)
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = reduce(math.gcd, (abs(x) for x in ints), 0)
    if g == 0:
        return ints
    lead = next(x for x in ints if x)
    if lead < 0:
        g = -g
    return [x // g for x in ints]
