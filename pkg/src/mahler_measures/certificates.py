"""Iterated approximation forms, determinants and their certificates.

Level-m forms come from substituting z^d into an approximation identity and
using the functional equations.  The determinant of three approximants
is the key quantity: if it is nonzero, the approximants are independent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence

from .exact_algebra import (
    INFINITY,
    Poly,
    TruncatedSeries,
    compose_power,
    det3_poly,
    nonzero_root_modulus_lower_bound,
    ord_and_primitive,
)
from .hermite_pade import ApproxTriple, ApproximantSpace, approximant_space, degree_pattern
from .mahler_catalog import MahlerSystem, expand_pair, phi


@dataclass(frozen=True)
class FormsAtLevel:
    k: int
    m: int
    A: Poly
    B: Poly
    C: Poly
    remainder: TruncatedSeries

    @classmethod
    def from_triple(cls, triple: ApproxTriple) -> "FormsAtLevel":
        return cls(triple.degrees[0], 0, triple.A, triple.B, triple.C, triple.remainder)

    def max_degree(self) -> int:
        return max(self.A.degree, self.B.degree, self.C.degree)


def recursion_step(system: MahlerSystem, forms: FormsAtLevel) -> FormsAtLevel:
    d = system.d
    A_d = compose_power(forms.A, d)
    B_d = compose_power(forms.B, d)
    C_d = compose_power(forms.C, d)
    A = system.P11 * A_d + system.P21 * B_d
    B = system.P12 * A_d + system.P22 * B_d
    C = system.P10 * A_d + system.P20 * B_d + system.P * C_d
    R = forms.remainder.compose_power(d) * system.P
    return FormsAtLevel(forms.k, forms.m + 1, A, B, C, R)


def forms_at_level(system: MahlerSystem, triple: ApproxTriple, m: int) -> FormsAtLevel:
    forms = FormsAtLevel.from_triple(triple)
    for _ in range(m):
        forms = recursion_step(system, forms)
    return forms


def identity_residual(system: MahlerSystem, forms: FormsAtLevel, order: Optional[int] = None) -> TruncatedSeries:
    """A*F + B*G + C - R on the jointly known coefficients (freshly expanded series)."""
    n = forms.remainder.order if order is None else min(order, forms.remainder.order)
    pair = expand_pair(system, n)
    lhs = pair.f * forms.A + pair.g * forms.B + forms.C
    return lhs - forms.remainder.truncate(n)


@dataclass(frozen=True)
class DeterminantCertificate:
    k_vector: tuple
    delta0: Poly
    o_values: tuple
    d_bars: tuple
    o1: int
    content: int
    D: Poly
    nonvanishing: bool
    window_ok: bool

    def to_json(self) -> dict:
        return {
            "k_vector": list(self.k_vector),
            "delta0": self.delta0.to_json(),
            "o1": self.o1,
            "D": self.D.to_json(),
            "content": str(self.content),
            "nonvanishing": self.nonvanishing,
            "o_values": list(self.o_values),
            "window_ok": self.window_ok,
        }


def _k_of(t: ApproxTriple) -> int:
    return t.degrees[0]


def delta0(t1: ApproxTriple, t2: ApproxTriple, t3: ApproxTriple) -> DeterminantCertificate:
    triples = (t1, t2, t3)
    if len({t.system for t in triples}) != 1:
        raise ValueError("triples must come from one system")
    ks = tuple(_k_of(t) for t in triples)
    if not ks[0] < ks[1] < ks[2]:
        raise ValueError(f"need k1 < k2 < k3, got {ks}")
    d_bars = tuple(t.d_bar for t in triples)
    if not d_bars[0] <= d_bars[1] <= d_bars[2]:
        raise ValueError(f"maximal degrees must be nondecreasing, got {d_bars}")
    os_ = tuple(t.o for t in triples)
    delta = det3_poly([[t.A, t.B, t.C] for t in triples])
    o1 = os_[0]
    if delta.is_zero():
        return DeterminantCertificate(ks, delta, os_, d_bars, o1, 0, Poly(), False, True)
    order, content, primitive = ord_and_primitive(delta)
    window_ok = min(os_) <= order and delta.degree <= sum(d_bars)
    if order >= o1:
        D = primitive.shift(order - o1)
    else:
        D = primitive
    return DeterminantCertificate(ks, delta, os_, d_bars, o1, content, D, True, window_ok)


def delta_at_level(system: MahlerSystem, triples: Sequence[ApproxTriple], m: int) -> Poly:
    forms = [forms_at_level(system, t, m) for t in triples]
    return det3_poly([[f.A, f.B, f.C] for f in forms])


def delta_product_rhs(system: MahlerSystem, delta: Poly, m: int) -> Poly:
    out = compose_power(delta, system.d ** m)
    ph = phi(system)
    for j in range(m):
        out = out * compose_power(ph, system.d ** j)
    return out


def delta_product_check(system: MahlerSystem, t1, t2, t3, m: int) -> bool:
    if not 0 <= m <= 3:
        raise ValueError("level m must be between 0 and 3")
    lhs = delta_at_level(system, (t1, t2, t3), m)
    base = det3_poly([[t.A, t.B, t.C] for t in (t1, t2, t3)])
    return lhs == delta_product_rhs(system, base, m)


def s0_precheck(t_k1plus1: ApproxTriple, t_k1plus2: ApproxTriple, c) -> Fraction:
    a1, b1 = t_k1plus1.A.coeff(0), t_k1plus1.B.coeff(0)
    a2, b2 = t_k1plus2.A.coeff(0), t_k1plus2.B.coeff(0)
    value = Fraction(a1 * b2 - a2 * b1) * Fraction(c)
    return value


class Condition12(NamedTuple):
    holds: bool
    checked_up_to: int


def check_condition12(system: MahlerSystem, a: int, b: int) -> Condition12:
    """Check that Phi((a/b)^(d^j)) != 0 for every j >= 0.

    Points are evaluated exactly until they fall inside the disc where the
    nonconstant part of Phi has no roots.  When the check fails,
    ``checked_up_to`` is the failing j.
    """
    if b < 2 or a == 0 or abs(a) >= b:
        raise ValueError("need 0 < |a| < b and b >= 2")
    ph = phi(system)
    rho = nonzero_root_modulus_lower_bound(ph)
    x = Fraction(a, b)
    j = 0
    while True:
        point = x ** (system.d ** j)
        if rho is INFINITY or abs(point) < rho:
            return Condition12(True, j)
        if ph(point) == 0:
            return Condition12(False, j)
        j += 1


# Choosing approximants with nonvanishing determinants


def _generic_weights(space: ApproximantSpace) -> list:
    """Weight vectors over {-1, 0, 1} whose combination keeps the minimal order.

    The canonical basis vector comes first, then the others by increasing
    support size.  The first nonzero weight is always +1.
    """
    n = space.dimension
    o_min = space.min_order
    lead = [t.remainder[o_min] for t in space.basis]
    canon = space.canonical_index()
    first = tuple(1 if i == canon else 0 for i in range(n))
    out = [first]
    candidates = []
    for w in itertools.product((0, 1, -1), repeat=n):
        nz = [x for x in w if x]
        if not nz or nz[0] != 1 or w == first:
            continue
        if sum(x * c for x, c in zip(w, lead)) == 0:
            continue
        candidates.append(w)
    candidates.sort(key=lambda w: (sum(1 for x in w if x), [abs(x) != 1 for x in w], [-x for x in w]))
    return out + candidates


@dataclass
class Selection:
    """Chosen approximants for one k-vector and how they were found."""

    triples: tuple
    certificate: DeterminantCertificate
    canonical_nonvanishing: bool
    dimensions: tuple
    weights: tuple


def select_nonvanishing(spaces: Sequence[ApproximantSpace], fixed: Sequence = (None, None, None)) -> Selection:
    """Find generic approximants whose determinant does not vanish.

    The determinant is linear in each of the three approximants, so it is
    computed once on all combinations of basis vectors and then combined.
    Because the search also keeps the leading remainder coefficient nonzero
    (a second linear condition), the grid {-1, 0, 1} per coordinate is large
    enough: if every grid point gives zero, every generic choice does.
    ``fixed`` optionally pins the weight vector of some positions.
    """
    dims = tuple(s.dimension for s in spaces)
    tensor = {}
    for i, j, l in itertools.product(*(range(n) for n in dims)):
        tensor[i, j, l] = det3_poly(
            [[t.A, t.B, t.C] for t in (spaces[0].basis[i], spaces[1].basis[j], spaces[2].basis[l])]
        )
    options = [
        [tuple(fixed[p])] if fixed[p] is not None else _generic_weights(spaces[p]) for p in range(3)
    ]
    canonical = tuple(opt[0] for opt in options)

    def combined(ws):
        total = Poly()
        for (i, j, l), det in tensor.items():
            c = ws[0][i] * ws[1][j] * ws[2][l]
            if c and not det.is_zero():
                total = total + det * c
        return total

    canonical_nonzero = not combined(canonical).is_zero()
    chosen = None
    if canonical_nonzero:
        chosen = canonical
    else:
        ranked = sorted(
            itertools.product(*(range(len(o)) for o in options)),
            key=lambda idx: (sum(idx), idx),
        )
        for idx in ranked:
            ws = tuple(options[p][idx[p]] for p in range(3))
            if not combined(ws).is_zero():
                chosen = ws
                break
    if chosen is None:
        chosen = canonical
    triples = tuple(spaces[p].combine(chosen[p]) for p in range(3))
    cert = delta0(*triples)
    return Selection(triples, cert, canonical_nonzero, dims, chosen)


@dataclass
class ScanRow:
    k: int
    o: Optional[int]
    nonvanishing: Optional[bool]
    canonical_nonvanishing: Optional[bool] = None
    dimensions: tuple = ()
    propagation_ok: Optional[bool] = None
    error: str = ""

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "o": self.o,
            "nonvanishing": self.nonvanishing,
            "canonical_nonvanishing": self.canonical_nonvanishing,
            "kernel_dimensions": list(self.dimensions),
            "propagation_ok": self.propagation_ok,
            "error": self.error,
        }


def scan(system: MahlerSystem, pattern: str, k_range: Sequence[int]) -> list:
    """Certify D(k, z) != 0 for the k-vectors (k, k+1, k+2), k in k_range."""
    ks = sorted(set(k_range))
    cache: dict = {}

    def space(k):
        if k not in cache:
            cache[k] = approximant_space(system, degree_pattern(pattern, k))
        return cache[k]

    rows = []
    for k in ks:
        try:
            spaces = [space(k + i) for i in range(3)]
            sel = select_nonvanishing(spaces)
            cert = sel.certificate
            # vanishing is forced once o(k1) exceeds the sum of maximal degrees
            forced_zero = cert.o1 > sum(cert.d_bars)
            propagation_ok = (not forced_zero) or not sel.canonical_nonvanishing and not cert.nonvanishing
            rows.append(ScanRow(k, cert.o1, cert.nonvanishing, sel.canonical_nonvanishing, sel.dimensions, propagation_ok))
        except ValueError as exc:
            rows.append(ScanRow(k, None, None, error=f"{type(exc).__name__}: {exc}"))
    return rows
