"""Degree growth, exponent bookkeeping and the piecewise exponent mu(lambda).

Quantities that depend on the size parameter lambda are affine forms
``constant + slope*lambda`` that may also carry formal multiples of two
arbitrarily small positive numbers delta1 and delta2.  Comparisons treat
those as positive infinitesimals.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

from .certificates import (
    Condition12,
    DeterminantCertificate,
    check_condition12,
    select_nonvanishing,
)
from .exact_algebra import format_scalar
from .hermite_pade import ApproxTriple, approximant_space, degree_pattern
from .mahler_catalog import MahlerSystem, ptilde

LAMBDA_CAP = Fraction(2, 3)
_INF = math.inf


@dataclass(frozen=True)
class AffineInLambda:
    constant: Fraction
    slope: Fraction = Fraction(0)
    delta1: Fraction = Fraction(0)
    delta2: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("constant", "slope", "delta1", "delta2"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def __add__(self, other: "AffineInLambda") -> "AffineInLambda":
        return AffineInLambda(
            self.constant + other.constant,
            self.slope + other.slope,
            self.delta1 + other.delta1,
            self.delta2 + other.delta2,
        )

    def __neg__(self):
        return AffineInLambda(-self.constant, -self.slope, -self.delta1, -self.delta2)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AffineInLambda":
        c = Fraction(c)
        return AffineInLambda(self.constant * c, self.slope * c, self.delta1 * c, self.delta2 * c)

    def at(self, lam) -> Fraction:
        """Value at lambda in the limit delta1, delta2 -> 0."""
        return self.constant + self.slope * Fraction(lam)

    def key_at(self, lam) -> tuple:
        """Sort key at lambda: the limit value first, then the delta parts."""
        return (self.at(lam), self.delta1, self.delta2)

    def positive_at(self, lam) -> bool:
        """Sign test with delta1, delta2 read as positive infinitesimals."""
        v = self.at(lam)
        if v != 0:
            return v > 0
        return self.delta1 >= 0 and self.delta2 >= 0 and (self.delta1, self.delta2) != (0, 0)

    def without_deltas(self) -> "AffineInLambda":
        return AffineInLambda(self.constant, self.slope)

    def to_json(self) -> dict:
        return {
            "constant": format_scalar(self.constant),
            "slope": format_scalar(self.slope),
            "delta1": format_scalar(self.delta1),
            "delta2": format_scalar(self.delta2),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AffineInLambda":
        return cls(*(Fraction(str(data.get(n, "0"))) for n in ("constant", "slope", "delta1", "delta2")))

    def __str__(self):
        parts = [format_scalar(self.constant)]
        for coef, sym in ((self.delta1, "d1"), (self.delta2, "d2"), (self.slope, "L")):
            if coef:
                mag = abs(coef)
                body = sym if mag == 1 else f"{format_scalar(mag)}*{sym}"
                parts.append(("- " if coef < 0 else "+ ") + body)
        return " ".join(parts)


def crossing(a: AffineInLambda, b: AffineInLambda) -> Optional[Fraction]:
    """The lambda where the limit values of a and b agree, if unique."""
    ds = a.slope - b.slope
    if ds == 0:
        return None
    return (b.constant - a.constant) / ds


@dataclass(frozen=True)
class Envelope:
    """Pointwise minimum of affine forms, with its pieces on [0, cap)."""

    lines: tuple
    pieces: tuple  # (lo, hi, AffineInLambda)

    def at(self, lam) -> AffineInLambda:
        return min(self.lines, key=lambda f: f.key_at(lam))

    def single(self) -> Optional[AffineInLambda]:
        return self.pieces[0][2] if len(self.pieces) == 1 else None

    def to_json(self) -> list:
        return [{"lo": format_scalar(lo), "hi": format_scalar(hi), "form": f.to_json()} for lo, hi, f in self.pieces]

    def __str__(self):
        if len(self.pieces) == 1:
            return str(self.pieces[0][2])
        return "; ".join(f"{f} on [{format_scalar(lo)}, {format_scalar(hi)})" for lo, hi, f in self.pieces)


def _cut_points(lines: Sequence[AffineInLambda], lo: Fraction, hi: Fraction) -> list:
    pts = {lo, hi}
    for a, b in itertools.combinations(lines, 2):
        x = crossing(a, b)
        if x is not None and lo < x < hi:
            pts.add(x)
    return sorted(pts)


def lower_envelope(lines: Sequence[AffineInLambda], cap: Fraction = LAMBDA_CAP) -> Envelope:
    lines = tuple(lines)
    pts = _cut_points(lines, Fraction(0), cap)
    pieces = []
    for lo, hi in zip(pts, pts[1:]):
        mid = (lo + hi) / 2
        best = min(lines, key=lambda f: f.key_at(mid))
        if pieces and pieces[-1][2] == best:
            pieces[-1] = (pieces[-1][0], hi, best)
        else:
            pieces.append((lo, hi, best))
    return Envelope(lines, tuple(pieces))


# Degree growth


@dataclass(frozen=True)
class GrowthParams:
    e_bar: dict
    tau: int
    d: int
    delta1_needed: bool
    delta2_needed: bool

    def E(self, k: int) -> AffineInLambda:
        t = Fraction(self.tau, self.d - 1)
        return AffineInLambda(self.e_bar[k] + t, 0, 1 if self.delta1_needed else 0, 0)

    def V(self, k: int, o: int) -> AffineInLambda:
        t = Fraction(self.tau, self.d - 1)
        return AffineInLambda(o - self.e_bar[k] - t, -o, 0, -1 if self.delta2_needed else 0)

    def to_json(self) -> dict:
        return {
            "e_bar": {str(k): v for k, v in sorted(self.e_bar.items())},
            "tau": self.tau,
            "delta1_needed": self.delta1_needed,
            "delta2_needed": self.delta2_needed,
        }


def _recursion_lines(system: MahlerSystem) -> list:
    """For each of A', B', C': the (source index, degree of multiplier) pairs."""
    s = system
    spec = [
        [(0, s.P11), (1, s.P21)],
        [(0, s.P12), (1, s.P22)],
        [(0, s.P10), (1, s.P20), (2, s.P)],
    ]
    return [[(src, p.degree) for src, p in line if not p.is_zero()] for line in spec]


def degree_bound_holds(system: MahlerSystem, degrees: Sequence[int], e_bar: int, tau: int, max_steps: int = 64) -> bool:
    """Induction proof that deg of the level-m forms stays below (e+t)d^m - t.

    ``degrees`` are upper bounds for deg A, deg B, deg C (-1 for a zero
    polynomial).  The slack s = bound - degree obeys
    s'(i) >= min_j (d*s(j) + tau - e_ij) over the terms of line i.  The
    proof closes once the slack vector stops decreasing, or once every slack
    reaches the level where the recurrence can never push it below zero.
    """
    if e_bar < 0 or tau < 0:
        raise ValueError("e_bar and tau must be nonnegative")
    d = system.d
    if max(degrees) > e_bar:
        return False
    slack = [(_INF if deg < 0 else e_bar - deg) for deg in degrees]
    lines = _recursion_lines(system)
    e_max = max(e for line in lines for _, e in line)
    safe = max(Fraction(0), Fraction(e_max - tau, d - 1))
    for _ in range(max_steps):
        nxt = []
        for line in lines:
            vals = [d * slack[src] + tau - e for src, e in line]
            nxt.append(min(vals) if vals else _INF)
        if any(v < 0 for v in nxt):
            return False
        if all(n >= s for n, s in zip(nxt, slack)) or all(v >= safe for v in nxt):
            return True
        slack = nxt
    return False


def verify_degree_bound(system: MahlerSystem, triple: ApproxTriple, e_bar: int, tau: int) -> bool:
    return degree_bound_holds(system, (triple.A.degree, triple.B.degree, triple.C.degree), e_bar, tau)


def delta_flags(system: MahlerSystem) -> tuple:
    delta1 = (1 + system.delta) * abs(ptilde(system).coeff(0)) > 1
    delta2 = abs(system.P.coeff(0)) > 1
    return delta1, delta2


def _search_growth(system: MahlerSystem, degrees: Sequence[int], e_bar: Optional[int]) -> tuple:
    d = system.d
    tau_max = system.max_degree()
    e_lo = max(max(degrees), 0)
    e_hi = e_lo + tau_max + 1
    if e_bar is not None:
        candidates = [(e_bar, tau) for tau in range(tau_max + 1)]
    else:
        candidates = [(e, tau) for e in range(e_lo, e_hi + 1) for tau in range(tau_max + 1)]
        # smallest e + tau/(d-1) first; on ties the smaller e_bar
        candidates.sort(key=lambda p: (p[0] + Fraction(p[1], d - 1), p[0]))
    for e, tau in candidates:
        if degree_bound_holds(system, degrees, e, tau):
            return e, tau
    raise ValueError(f"no (e_bar, tau) verifies the degree bound for degrees {tuple(degrees)}")


def growth_params(system: MahlerSystem, triple: ApproxTriple, e_bar: Optional[int] = None) -> GrowthParams:
    """Smallest verified growth (e_bar, tau) for one approximant.

    With ``e_bar`` given only tau is searched.
    """
    degrees = (triple.A.degree, triple.B.degree, triple.C.degree)
    e, tau = _search_growth(system, degrees, e_bar)
    d1, d2 = delta_flags(system)
    return GrowthParams({triple.degrees[0]: e}, tau, system.d, d1, d2)


def pattern_growth(system: MahlerSystem, pattern: str, ks: Sequence[int]) -> GrowthParams:
    """Growth valid for every approximant of the pattern at the given k.

    Uses e_bar(k) = the largest prescribed degree and the smallest common tau
    that verifies with the prescribed degrees, which bound the actual ones.
    """
    tau = 0
    e_bar = {}
    for k in ks:
        degrees = degree_pattern(pattern, k)
        e_bar[k] = max(degrees)
        _, t = _search_growth(system, degrees, e_bar[k])
        tau = max(tau, t)
    d1, d2 = delta_flags(system)
    return GrowthParams(e_bar, tau, system.d, d1, d2)


# theta, nu, lambda0, mu


def _max_key(forms: Sequence[AffineInLambda]) -> AffineInLambda:
    return max(forms, key=lambda f: f.key_at(0))


def theta_nu(growth: GrowthParams, k_list: Sequence[int], o_values: Sequence[int], cap: Fraction = LAMBDA_CAP) -> tuple:
    if len(k_list) != 3 or len(o_values) != 3:
        raise ValueError("theta_nu needs three k values and three orders")
    E = [growth.E(k) for k in k_list]
    V = [growth.V(k, o) for k, o in zip(k_list, o_values)]
    theta = _max_key([E[i] + E[j] for i, j in itertools.combinations(range(3), 2)])
    nu = lower_envelope([V[i] - E[j] for i in range(3) for j in range(3) if i != j], cap)
    return theta, nu


def bookkeeping_ok(growth: GrowthParams, k: int, o: int) -> bool:
    total = (growth.E(k) + growth.V(k, o)).without_deltas()
    return total == AffineInLambda(o, -o)


def _chain_conditions(nu_list: Sequence[Envelope], d: int, lam) -> list:
    vals = [nu.at(lam) for nu in nu_list]
    conds = [vals[0]]
    conds += [b - a for a, b in zip(vals, vals[1:])]
    conds.append(vals[0].scale(d) - vals[-1])
    return conds


def _chain_holds(nu_list, d, lam) -> bool:
    return all(c.positive_at(lam) for c in _chain_conditions(nu_list, d, lam))


def lambda0_chain(nu_list: Sequence, d: int, cap: Fraction = LAMBDA_CAP) -> Fraction:
    """Supremum of lambda such that 0 < nu(1) < ... < nu(L) < d*nu(1) on [0, lambda)."""
    if not nu_list:
        raise ValueError("nu list is empty")
    nu_list = [nu if isinstance(nu, Envelope) else lower_envelope([nu], cap) for nu in nu_list]
    base = [f for nu in nu_list for f in nu.lines]
    lines = base + [f.scale(d) for f in nu_list[0].lines] + [AffineInLambda(0)]
    pts = _cut_points(lines, Fraction(0), cap)
    if not _chain_holds(nu_list, d, 0):
        raise ValueError("no admissible lambda: the chain condition fails at lambda = 0")
    for lo, hi in zip(pts, pts[1:]):
        if not _chain_holds(nu_list, d, (lo + hi) / 2):
            return lo
        if hi < cap and not _chain_holds(nu_list, d, hi):
            return hi
    return cap


@dataclass(frozen=True)
class MuPiece:
    lo: Fraction
    hi: Fraction
    ell: int
    numerator: Fraction
    denominator: AffineInLambda

    def canonical(self) -> tuple:
        """(numerator, constant, slope) as coprime integers, numerator > 0."""
        vals = [self.numerator, self.denominator.constant, self.denominator.slope]
        den = reduce(lambda x, y: x * y // math.gcd(x, y), (v.denominator for v in vals), 1)
        ints = [int(v * den) for v in vals]
        g = reduce(math.gcd, (abs(x) for x in ints), 0)
        if ints[0] < 0:
            g = -g
        return tuple(x // g for x in ints)

    def value(self, lam) -> Fraction:
        return self.numerator / self.denominator.at(lam)

    def to_json(self) -> dict:
        n, c, s = self.canonical()
        return {
            "lo": format_scalar(self.lo),
            "hi": format_scalar(self.hi),
            "ell": self.ell,
            "numerator": str(n),
            "constant": str(c),
            "slope": str(s),
        }

    def __str__(self):
        n, c, s = self.canonical()
        sign = "-" if s < 0 else "+"
        return f"{n}/({c} {sign} {abs(s)}*L) on [{format_scalar(self.lo)}, {format_scalar(self.hi)})"


def mu_pieces(theta_list: Sequence[AffineInLambda], nu_list: Sequence, d: int, lambda0: Optional[Fraction] = None) -> list:
    """Upper envelope of theta(l+1)/nu(l) on [0, lambda0), delta parts -> 0."""
    L = len(theta_list)
    if len(nu_list) != L:
        raise ValueError("theta and nu lists must have equal length")
    nu_list = [nu if isinstance(nu, Envelope) else lower_envelope([nu]) for nu in nu_list]
    if lambda0 is None:
        lambda0 = lambda0_chain(nu_list, d)
    if lambda0 <= 0:
        raise ValueError("lambda0 must be positive")
    numer = [theta_list[ell + 1].at(0) if ell + 1 < L else d * theta_list[0].at(0) for ell in range(L)]
    lines = []  # (ell, line) for every candidate denominator
    for ell, nu in enumerate(nu_list):
        for f in nu.lines:
            lines.append((ell, f))
    pts = {Fraction(0), lambda0}
    for lo, hi, _ in (p for nu in nu_list for p in nu.pieces):
        for x in (lo, hi):
            if 0 < x < lambda0:
                pts.add(x)
    for (i, f), (j, g) in itertools.combinations(lines, 2):
        # numer_i * g(lam) = numer_j * f(lam)
        x = crossing(f.scale(numer[j]), g.scale(numer[i]))
        if x is not None and 0 < x < lambda0:
            pts.add(x)
    pts = sorted(pts)
    pieces: list = []
    for lo, hi in zip(pts, pts[1:]):
        mid = (lo + hi) / 2
        best = None
        for ell, nu in enumerate(nu_list):
            den = nu.at(mid)
            if den.at(mid) <= 0:
                raise ValueError(f"nu({ell + 1}) is not positive at lambda = {mid}")
            val = numer[ell] / den.at(mid)
            if best is None or val > best[0]:
                best = (val, ell, den.without_deltas())
        _, ell, den = best
        if pieces and pieces[-1].ell == ell + 1 and pieces[-1].denominator == den:
            last = pieces[-1]
            pieces[-1] = MuPiece(last.lo, hi, last.ell, last.numerator, den)
        else:
            pieces.append(MuPiece(lo, hi, ell + 1, numer[ell], den))
    return pieces


def mu_value(pieces: Sequence[MuPiece], lam) -> Fraction:
    lam = Fraction(lam)
    for p in pieces:
        if p.lo <= lam < p.hi:
            return p.value(lam)
    raise ValueError(f"lambda = {lam} is outside the certified range")


# Full certificate


@dataclass(frozen=True)
class TheoremConfig:
    system: str
    pattern: str
    k_starts: tuple

    def k_lists(self) -> list:
        return [(k, k + 1, k + 2) for k in self.k_starts]


THEOREMS = {
    "thm1": TheoremConfig("thue", "thm1", (29, 31, 34, 43, 49)),
    "thm2": TheoremConfig("stern", "thm2", (29, 31, 34, 38, 43, 49)),
    "thm3": TheoremConfig("lambert3", "thm3", (19, 26, 39)),
    "thm4": TheoremConfig("rudin", "thm4", (17, 21, 26)),
    "thm5": TheoremConfig("dilcher", "thm5", (10, 26)),
}


class CertificationError(ValueError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


@dataclass
class ExponentCertificate:
    system: str
    pattern: str
    k_lists: list
    determinants: list
    o_values: dict
    kernel_dimensions: dict
    growth: GrowthParams
    theta: list
    nu: list
    lambda0: Fraction
    mu_pieces: list
    delta_limit: bool
    condition12: Optional[Condition12] = None
    notes: list = field(default_factory=list)

    def mu_at_zero(self) -> Fraction:
        return mu_value(self.mu_pieces, 0)

    def to_json(self) -> dict:
        return {
            "system": self.system,
            "pattern": self.pattern,
            "k_lists": [list(k) for k in self.k_lists],
            "determinants": [c.to_json() for c in self.determinants],
            "o_values": {str(k): v for k, v in sorted(self.o_values.items())},
            "kernel_dimensions": {str(k): v for k, v in sorted(self.kernel_dimensions.items())},
            "growth": self.growth.to_json(),
            "theta": [t.to_json() for t in self.theta],
            "nu": [n.to_json() for n in self.nu],
            "lambda0": format_scalar(self.lambda0),
            "mu_pieces": [p.to_json() for p in self.mu_pieces],
            "mu_at_zero": format_scalar(self.mu_at_zero()),
            "delta_limit": self.delta_limit,
            "condition12": None if self.condition12 is None else {
                "holds": self.condition12.holds, "checked_up_to": self.condition12.checked_up_to},
            "notes": list(self.notes),
        }

    def render_text(self) -> str:
        lines = [f"system {self.system}, pattern {self.pattern}"]
        lines.append("l\tk\ttheta(l)\tnu(l)")
        for ell, (ks, th, nu) in enumerate(zip(self.k_lists, self.theta, self.nu), start=1):
            lines.append(f"{ell}\t{ks[0]}\t{th}\t{nu}")
        lines.append(f"lambda0 = {format_scalar(self.lambda0)}")
        for p in self.mu_pieces:
            lines.append(f"mu = {p}")
        lines.append(f"mu(0) = {format_scalar(self.mu_at_zero())}")
        if self.delta_limit:
            lines.append("values are limits as delta1, delta2 -> 0")
        return "\n".join(lines)


def check_k_lists(k_lists: Sequence[Sequence[int]], d: int) -> None:
    for ks in k_lists:
        if not ks[0] < ks[1] < ks[2]:
            raise CertificationError("config", f"k-vector {tuple(ks)} is not strictly increasing")
    for a, b in zip(k_lists, k_lists[1:]):
        if a[2] > b[0]:
            raise CertificationError("config", f"k-vectors {tuple(a)} and {tuple(b)} overlap")
    if k_lists[-1][2] > d * k_lists[0][0]:
        raise CertificationError(
            "config", f"last k3 = {k_lists[-1][2]} exceeds d*k1 = {d * k_lists[0][0]}"
        )


def certify(system: MahlerSystem, config: TheoremConfig, a: Optional[int] = None, b: Optional[int] = None) -> ExponentCertificate:
    """Run the full pipeline and return the exponent certificate."""
    k_lists = config.k_lists()
    if not k_lists:
        raise CertificationError("config", "empty k-list")
    check_k_lists(k_lists, system.d)

    spaces = {}
    try:
        for ks in k_lists:
            for k in ks:
                if k not in spaces:
                    spaces[k] = approximant_space(system, degree_pattern(config.pattern, k))
    except ValueError as exc:
        raise CertificationError("approximation", str(exc)) from exc

    chosen: dict = {}
    determinants: list = []
    triples: dict = {}
    notes = []
    for ks in k_lists:
        fixed = [chosen.get(k) for k in ks]
        sel = select_nonvanishing([spaces[k] for k in ks], fixed)
        if not sel.certificate.nonvanishing:
            raise CertificationError("determinant", f"D vanishes for every generic choice at k = {ks}")
        if not sel.canonical_nonvanishing:
            notes.append(f"k = {ks}: canonical approximants give D = 0; used weights {sel.weights}")
        for k, w, t in zip(ks, sel.weights, sel.triples):
            chosen[k] = w
            triples[k] = t
        determinants.append(sel.certificate)

    ks_all = sorted(triples)
    growth = pattern_growth(system, config.pattern, ks_all)
    for k in ks_all:
        if not verify_degree_bound(system, triples[k], growth.e_bar[k], growth.tau):
            raise CertificationError("growth", f"degree bound fails at k = {k}")
    o_values = {k: triples[k].o for k in ks_all}
    for k in ks_all:
        if not bookkeeping_ok(growth, k, o_values[k]):
            raise CertificationError("exponents", f"E + V bookkeeping fails at k = {k}")

    theta, nu = [], []
    for ks in k_lists:
        th, n = theta_nu(growth, ks, [o_values[k] for k in ks])
        theta.append(th)
        nu.append(n)
    try:
        lam0 = lambda0_chain(nu, system.d)
        pieces = mu_pieces(theta, nu, system.d, lam0)
    except ValueError as exc:
        raise CertificationError("chain", str(exc)) from exc

    cond = None
    if a is not None or b is not None:
        if a is None or b is None:
            raise CertificationError("config", "a and b must be given together")
        cond = check_condition12(system, a, b)
        if not cond.holds:
            raise CertificationError("condition12", f"Phi vanishes at (a/b)^(d^j) for j = {cond.checked_up_to}")

    return ExponentCertificate(
        system=system.name,
        pattern=config.pattern,
        k_lists=k_lists,
        determinants=determinants,
        o_values=o_values,
        kernel_dimensions={k: spaces[k].dimension for k in ks_all},
        growth=growth,
        theta=theta,
        nu=nu,
        lambda0=lam0,
        mu_pieces=pieces,
        delta_limit=growth.delta1_needed or growth.delta2_needed,
        condition12=cond,
        notes=notes,
    )
