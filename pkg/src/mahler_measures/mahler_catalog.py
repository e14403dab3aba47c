"""Mahler systems of degree one and the built-in catalog.

A system is stored in cleared-denominator form

    P(z) F(z^d) = P11(z) F(z) + P12(z) G(z) + P10(z)
    P(z) G(z^d) = P21(z) F(z) + P22(z) G(z) + P20(z)

with integer polynomials.  Series coefficients are extracted by matching
coefficients of z^n for n = 0, 1, 2, ...
"""
from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .exact_algebra import Poly, TruncatedSeries, format_scalar, parse_scalar

BUILTIN_NAMES = ("thue", "stern", "lambert3", "rudin", "dilcher")

POLY_FIELDS = ("P", "P11", "P12", "P21", "P22", "P10", "P20")


def _ceil_log(n: int, base: int) -> int:
    """Smallest e >= 0 with base**e >= n."""
    e, p = 0, 1
    while p < n:
        p *= base
        e += 1
    return e


@dataclass(frozen=True)
class CoefficientBound:
    """Upper bound n -> B(n) on the coefficient moduli of F and G.

    kind "linear": B(n) = alpha + beta*n.
    kind "log":    B(n) = alpha + ceil(log_base(max(n, 1))).
    """

    kind: str
    alpha: Fraction
    beta: Fraction = Fraction(0)
    base: int = 0

    def __post_init__(self):
        if self.kind not in ("linear", "log"):
            raise ValueError(f"unknown coefficient bound kind {self.kind!r}")
        if self.kind == "log" and self.base < 2:
            raise ValueError("log bound needs base >= 2")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("coefficient bound parameters must be nonnegative")

    def __call__(self, n: int) -> Fraction:
        if self.kind == "linear":
            return Fraction(self.alpha) + Fraction(self.beta) * n
        return Fraction(self.alpha) + _ceil_log(max(n, 1), self.base)

    def linear_majorant(self) -> tuple:
        """(alpha, beta) with B(n) <= alpha + beta*n for every n >= 0."""
        if self.kind == "linear":
            return Fraction(self.alpha), Fraction(self.beta)
        # ceil(log_b(n)) <= n for n >= 1 and b >= 2
        return Fraction(self.alpha), Fraction(1)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "alpha": format_scalar(self.alpha)}
        if self.kind == "linear":
            out["beta"] = format_scalar(self.beta)
        else:
            out["base"] = self.base
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CoefficientBound":
        allowed = {"kind", "alpha", "beta", "base"}
        extra = set(data) - allowed
        if extra:
            raise ValueError(f"unknown coefficient bound fields: {sorted(extra)}")
        return cls(
            kind=data["kind"],
            alpha=Fraction(str(data["alpha"])),
            beta=Fraction(str(data.get("beta", "0"))),
            base=int(data.get("base", 0)),
        )


@dataclass(frozen=True)
class MahlerSystem:
    name: str
    d: int
    P: Poly
    P11: Poly
    P12: Poly
    P21: Poly
    P22: Poly
    P10: Poly = field(default_factory=Poly)
    P20: Poly = field(default_factory=Poly)
    seeds_f: tuple = ()
    seeds_g: tuple = ()
    delta: int = 0
    bound: Optional[CoefficientBound] = None

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("radix d must be at least 2")
        if self.delta not in (0, 1):
            raise ValueError("delta must be 0 or 1")
        for name in POLY_FIELDS:
            p = getattr(self, name)
            if not isinstance(p, Poly) or not p.is_integral():
                raise ValueError(f"{name} must be an integer polynomial")
        if self.P.is_zero():
            raise ValueError("P must be nonzero")
        if self.matrix_determinant().is_zero():
            raise ValueError("P11*P22 - P12*P21 vanishes identically")

    def matrix_determinant(self) -> Poly:
        return self.P11 * self.P22 - self.P12 * self.P21

    def max_degree(self) -> int:
        return max(getattr(self, name).degree for name in POLY_FIELDS)


@dataclass(frozen=True)
class SeriesPair:
    f: TruncatedSeries
    g: TruncatedSeries
    system: MahlerSystem

    @property
    def order(self) -> int:
        return self.f.order


def _p(*coeffs) -> Poly:
    return Poly(coeffs)


def builtin(name: str) -> MahlerSystem:
    """Return one of the five built-in systems by name."""
    if name == "thue":
        # F = Thue-Morse series T, G = T^2; |t_n| = 1 so |(T^2)_n| <= n+1
        return MahlerSystem(
            name="thue", d=2,
            P=_p(1, -2, 1), P11=_p(1, -1), P12=_p(), P21=_p(), P22=_p(1),
            seeds_f=(1,), seeds_g=(1,), delta=0,
            bound=CoefficientBound("linear", Fraction(1), Fraction(1)),
        )
    if name == "stern":
        # F = sum s(n+1) z^n for Stern's diatomic s, G = sum t(n+1) z^n for the
        # twisted version t(2n) = -t(n), t(2n+1) = -t(n) - t(n+1); |t(n)| <= s(n) <= n
        return MahlerSystem(
            name="stern", d=2,
            P=_p(1, 1, 1), P11=_p(1), P12=_p(), P21=_p(), P22=_p(-1), P20=_p(2),
            seeds_f=(1,), seeds_g=(1,), delta=0,
            bound=CoefficientBound("linear", Fraction(1), Fraction(1)),
        )
    if name == "lambert3":
        # F = sum_j z^(3^j)/(1 - z^(3^j)), G = sum_j z^(3^j)/(1 + z^(3^j));
        # the n-th coefficients have modulus 1 + v_3(n)
        return MahlerSystem(
            name="lambert3", d=3,
            P=_p(1, 0, -1), P11=_p(1, 0, -1), P12=_p(), P21=_p(), P22=_p(1, 0, -1),
            P10=_p(0, -1, -1), P20=_p(0, -1, 1),
            seeds_f=(0,), seeds_g=(0,), delta=0,
            bound=CoefficientBound("log", Fraction(2), base=3),
        )
    if name == "rudin":
        # F = R(z), G = R(-z) for the Rudin-Shapiro series R
        return MahlerSystem(
            name="rudin", d=2,
            P=_p(0, 2), P11=_p(0, 1), P12=_p(0, 1), P21=_p(1), P22=_p(-1),
            seeds_f=(1,), seeds_g=(1,), delta=1,
            bound=CoefficientBound("linear", Fraction(1)),
        )
    if name == "dilcher":
        # F = S(z), G = S(z^4) with S(z^16) = -z S(z) + (1+z+z^2) S(z^4).
        # Then s_n = t(n+1) + t(n) + t(n-1) - u(n+1) where t(j) = s_(j/4) when
        # 4 | j and u(j) = s_(j/16) when 16 | j, so |s_n| <= 2 max_(i<=(n+1)/4) |s_i|
        # and induction gives |s_n| <= n+1.
        return MahlerSystem(
            name="dilcher", d=4,
            P=_p(1), P11=_p(), P12=_p(1), P21=_p(0, -1), P22=_p(1, 1, 1),
            seeds_f=(1,), seeds_g=(), delta=1,
            bound=CoefficientBound("linear", Fraction(1), Fraction(1)),
        )
    raise ValueError(f"unknown system {name!r}; valid names: {', '.join(BUILTIN_NAMES)}")


def phi(system: MahlerSystem) -> Poly:
    return system.matrix_determinant() * system.P


def ptilde(system: MahlerSystem) -> Poly:
    polys = [system.P11, system.P12, system.P21, system.P22]
    n = max(p.degree for p in polys) + 1
    return Poly([max(abs(p.coeff(j)) for p in polys) for j in range(n)])


def coefficient_bound(system: MahlerSystem, n: int) -> Fraction:
    if n < 0:
        raise ValueError("index must be nonnegative")
    if system.bound is None:
        raise ValueError(f"system {system.name!r} has no coefficient bound")
    return system.bound(n)


# Series expansion


class UnderDeterminedError(ValueError):
    pass


class InconsistentSystemError(ValueError):
    pass


def _reduce_pending(pending: list, known: dict) -> list:
    """Row-reduce the pending linear equations and record forced values.

    Each equation is a pair (coeff_map, const) meaning sum(c*x) + const = 0.
    """
    rows = []
    for coeffs, const in pending:
        live = {}
        for var, c in coeffs.items():
            if var in known:
                const += c * known[var]
            elif c:
                live[var] = live.get(var, 0) + c
        live = {v: c for v, c in live.items() if c}
        if not live:
            if const:
                raise InconsistentSystemError("functional equations are inconsistent with the seeds")
            continue
        rows.append((live, const))
    if not rows:
        return []
    # Gauss-Jordan on the (small) pending system
    variables = sorted({v for coeffs, _ in rows for v in coeffs})
    mat = [[Fraction(coeffs.get(v, 0)) for v in variables] + [Fraction(const)] for coeffs, const in rows]
    pivots = []
    r = 0
    for c in range(len(variables)):
        piv = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    for row in mat[r:]:
        if row[-1]:
            raise InconsistentSystemError("functional equations are inconsistent with the seeds")
    remaining = []
    for i, c in enumerate(pivots):
        row = mat[i]
        others = [j for j in range(len(variables)) if j != c and row[j]]
        if not others:
            value = -row[-1]
            known[variables[c]] = value.numerator if value.denominator == 1 else value
        else:
            remaining.append(({variables[j]: row[j] for j in range(len(variables)) if row[j]}, row[-1]))
    return remaining


def _equation(system: MahlerSystem, n: int, first: bool) -> tuple:
    """Coefficient of z^n in P*X(z^d) - Pa*F - Pb*G - Pc as a linear equation.

    Variables are ('f', i) and ('g', i).
    """
    d = system.d
    if first:
        target, pa, pb, pc = "f", system.P11, system.P12, system.P10
    else:
        target, pa, pb, pc = "g", system.P21, system.P22, system.P20
    coeffs: dict = {}
    for i, c in enumerate(system.P.coeffs):
        j = n - i
        if c and j >= 0 and j % d == 0:
            key = (target, j // d)
            coeffs[key] = coeffs.get(key, 0) + c
    for poly, name in ((pa, "f"), (pb, "g")):
        for i, c in enumerate(poly.coeffs):
            j = n - i
            if c and j >= 0:
                key = (name, j)
                coeffs[key] = coeffs.get(key, 0) - c
    return coeffs, -pc.coeff(n)


_CACHE: dict = {}
_CACHE_LOCK = threading.Lock()


def _expand_raw(system: MahlerSystem, N: int) -> tuple:
    known: dict = {}
    for i, v in enumerate(system.seeds_f):
        known[("f", i)] = v
    for i, v in enumerate(system.seeds_g):
        known[("g", i)] = v
    pending: list = []
    lag = 4 * max(system.max_degree(), 1) + 8
    n = 0
    while True:
        pending.append(_equation(system, n, True))
        pending.append(_equation(system, n, False))
        pending = _reduce_pending(pending, known)
        done = all(("f", j) in known and ("g", j) in known for j in range(N + 1))
        if done and n >= N:
            break
        if n >= N + lag:
            missing = [f"{name}_{j}" for j in range(N + 1) for name in ("f", "g") if (name, j) not in known]
            raise UnderDeterminedError(
                f"under-determined system {system.name!r}: no value forced for {', '.join(missing[:6])}"
            )
        n += 1
    f = [known[("f", j)] for j in range(N + 1)]
    g = [known[("g", j)] for j in range(N + 1)]
    return f, g


def expand_pair(system: MahlerSystem, N: int) -> SeriesPair:
    """Expand F and G through z^N from the functional equations and seeds."""
    if N < 0:
        raise ValueError("truncation order must be nonnegative")
    with _CACHE_LOCK:
        cached = _CACHE.get(system)
    if cached is None or len(cached[0]) < N + 1:
        f, g = _expand_raw(system, max(N, 2 * (len(cached[0]) if cached else 0)))
        with _CACHE_LOCK:
            _CACHE[system] = (f, g)
        cached = (f, g)
    f, g = cached
    return SeriesPair(
        TruncatedSeries.from_list(f[: N + 1], N),
        TruncatedSeries.from_list(g[: N + 1], N),
        system,
    )


def functional_residuals(pair: SeriesPair) -> tuple:
    """Both functional-equation residuals, known through the pair's order."""
    s = pair.system
    f, g = pair.f, pair.g
    n = pair.order
    r1 = (f.compose_power(s.d) * s.P).truncate(n) - (f * s.P11 + g * s.P12 + s.P10)
    r2 = (g.compose_power(s.d) * s.P).truncate(n) - (f * s.P21 + g * s.P22 + s.P20)
    return r1, r2


# JSON round trip


def system_to_json(system: MahlerSystem) -> dict:
    out = {"name": system.name, "d": system.d, "delta": system.delta}
    for name in POLY_FIELDS:
        out[name] = getattr(system, name).to_json()
    out["seeds"] = {
        "F": [format_scalar(x) for x in system.seeds_f],
        "G": [format_scalar(x) for x in system.seeds_g],
    }
    if system.bound is not None:
        out["coeff_bound"] = system.bound.to_json()
    return out


def system_from_json(data: dict) -> MahlerSystem:
    allowed = {"name", "d", "delta", "seeds", "coeff_bound", *POLY_FIELDS}
    extra = set(data) - allowed
    if extra:
        raise ValueError(f"unknown system fields: {sorted(extra)}")
    missing = {"name", "d", "P", "P11", "P12", "P21", "P22"} - set(data)
    if missing:
        raise ValueError(f"missing system fields: {sorted(missing)}")
    seeds = data.get("seeds", {})
    if set(seeds) - {"F", "G"}:
        raise ValueError("seeds may only contain F and G")
    polys = {name: Poly.from_json(data.get(name, [])) for name in POLY_FIELDS}
    bound = data.get("coeff_bound")
    return MahlerSystem(
        name=str(data["name"]),
        d=int(data["d"]),
        delta=int(data.get("delta", 0)),
        seeds_f=tuple(parse_scalar(str(x)) for x in seeds.get("F", [])),
        seeds_g=tuple(parse_scalar(str(x)) for x in seeds.get("G", [])),
        bound=CoefficientBound.from_json(bound) if bound is not None else None,
        **polys,
    )


def load_system(spec: str) -> MahlerSystem:
    """Resolve a built-in name or a path to a JSON system file."""
    if spec in BUILTIN_NAMES:
        return builtin(spec)
    try:
        with open(spec, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ValueError(
            f"unknown system {spec!r}; valid names: {', '.join(BUILTIN_NAMES)} or a JSON file path"
        ) from None
    return system_from_json(data)
