"""Command-line front end.

Exit codes: 0 success or full match, 1 verified mismatch, 2 computation
failure, 3 configuration error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from importlib import resources

from . import certificates, exponent_engine, hermite_pade, mahler_catalog, witness_numeric
from .exact_algebra import Poly, format_scalar
from .exponent_engine import AffineInLambda, THEOREMS, TheoremConfig, certify

EXIT_OK, EXIT_MISMATCH, EXIT_FAILURE, EXIT_CONFIG = 0, 1, 2, 3

OUTPUT_DIR_ENV = "MAHLER_OUTPUT_DIR"

DEFAULT_PATTERN = {cfg.system: name for name, cfg in THEOREMS.items()}


class ConfigError(Exception):
    pass


class StageError(Exception):
    def __init__(self, stage: str, message: str):
        super().__init__(f"{stage}: {message}")
        self.stage = stage


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def load_golden() -> dict:
    text = resources.files("mahler_measures").joinpath("data/golden.json").read_text(encoding="utf-8")
    return json.loads(text)


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    path = getattr(args, "output", None)
    if not path:
        sys.stdout.write(text)
        return
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        path = os.path.join(base, path)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _system(args):
    try:
        return mahler_catalog.load_system(args.system)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc)) from exc


def _pattern(args, system) -> str:
    pattern = args.pattern or DEFAULT_PATTERN.get(system.name)
    if pattern is None:
        raise ConfigError("--pattern is required for custom systems")
    if pattern not in hermite_pade.PATTERNS:
        raise ConfigError(f"unknown pattern {pattern!r}; expected one of {', '.join(hermite_pade.PATTERNS)}")
    return pattern


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def _stage(stage, fn, *a, **kw):
    try:
        return fn(*a, **kw)
    except (ValueError, ArithmeticError) as exc:
        raise StageError(stage, str(exc)) from exc


# subcommands


def cmd_list(args) -> int:
    systems = [mahler_catalog.builtin(n) for n in mahler_catalog.BUILTIN_NAMES]
    if args.custom_dir:
        if not os.path.isdir(args.custom_dir):
            raise ConfigError(f"custom directory {args.custom_dir!r} does not exist")
        for name in sorted(os.listdir(args.custom_dir)):
            if name.endswith(".json"):
                systems.append(mahler_catalog.load_system(os.path.join(args.custom_dir, name)))
    if args.format == "json":
        data = [
            {"name": s.name, "d": s.d, "delta": s.delta, "P": s.P.to_json(), "Phi": mahler_catalog.phi(s).to_json()}
            for s in systems
        ]
        _emit(args, _dumps(data))
    else:
        lines = [f"{s.name} d={s.d} delta={s.delta} P={s.P} Phi={mahler_catalog.phi(s)}" for s in systems]
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_expand(args) -> int:
    system = _system(args)
    if args.order < 0:
        raise ConfigError("--order must be nonnegative")
    pair = _stage("expand", mahler_catalog.expand_pair, system, args.order)
    if args.format == "tsv":
        lines = ["n\tF\tG"] + [f"{n}\t{format_scalar(pair.f[n])}\t{format_scalar(pair.g[n])}" for n in range(args.order + 1)]
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dumps({
            "system": system.name, "order": args.order,
            "F": [format_scalar(c) for c in pair.f.coeffs],
            "G": [format_scalar(c) for c in pair.g.coeffs],
        }))
    return EXIT_OK


def _degrees(args, system):
    if args.degrees:
        degrees = _int_list(args.degrees)
        if len(degrees) != 3 or min(degrees) < 0:
            raise ConfigError("--degrees needs three nonnegative integers")
        return tuple(degrees)
    if args.k is None:
        raise ConfigError("give --k (with a pattern) or --degrees")
    try:
        return hermite_pade.degree_pattern(_pattern(args, system), args.k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_approx(args) -> int:
    system = _system(args)
    degrees = _degrees(args, system)
    space = _stage("approx", hermite_pade.approximant_space, system, degrees, args.order)
    triple = space.basis[_stage("approx", space.canonical_index)]
    data = triple.to_json()
    data["kernel_dimension"] = space.dimension
    if args.format == "text":
        _emit(args, f"degrees {degrees}\no = {triple.o}\nA = {triple.A}\nB = {triple.B}\nC = {triple.C}")
    else:
        _emit(args, _dumps(data))
    return EXIT_OK


def cmd_det(args) -> int:
    system = _system(args)
    pattern = _pattern(args, system)
    if args.k is None:
        raise ConfigError("--k is required")
    ks = (args.k, args.k + 1, args.k + 2)
    spaces = [_stage("approx", hermite_pade.approximant_space, system, hermite_pade.degree_pattern(pattern, k)) for k in ks]
    sel = _stage("determinant", certificates.select_nonvanishing, spaces)
    cert = sel.certificate
    data = cert.to_json()
    data["canonical_nonvanishing"] = sel.canonical_nonvanishing
    data["kernel_dimensions"] = list(sel.dimensions)
    if args.format == "text":
        _emit(args, f"k = {ks}\nDelta = {cert.delta0}\no1 = {cert.o1}\nnonvanishing = {cert.nonvanishing}")
    else:
        _emit(args, _dumps(data))
    return EXIT_OK


def cmd_scan(args) -> int:
    system = _system(args)
    pattern = _pattern(args, system)
    if args.k_list:
        ks = _int_list(args.k_list)
    else:
        if args.k_min is None or args.k_max is None or args.k_min > args.k_max or args.k_min < 1:
            raise ConfigError("give --k-list or a valid --k-min/--k-max range")
        ks = list(range(args.k_min, args.k_max + 1))
    rows = certificates.scan(system, pattern, ks)
    if args.format == "tsv":
        lines = ["k\to\tnonvanishing"] + [f"{r.k}\t{r.o}\t{r.nonvanishing}" for r in rows]
        _emit(args, "\n".join(lines))
    elif args.format == "text":
        good = sum(1 for r in rows if r.nonvanishing)
        lines = [f"k={r.k} o={r.o} nonvanishing={r.nonvanishing} dims={list(r.dimensions)}" for r in rows]
        lines.append(f"{good}/{len(rows)} nonvanishing")
        _emit(args, "\n".join(lines))
    else:
        _emit(args, _dumps([r.to_json() for r in rows]))
    return EXIT_OK if all(r.error == "" for r in rows) else EXIT_FAILURE


def _run_certify(system, config, a=None, b=None):
    try:
        return certify(system, config, a, b)
    except exponent_engine.CertificationError as exc:
        if exc.stage == "config":
            raise ConfigError(str(exc)) from exc
        raise StageError(exc.stage, str(exc).split(": ", 1)[-1]) from exc
    except (ValueError, ArithmeticError) as exc:
        raise StageError("certify", str(exc)) from exc


def cmd_certify(args) -> int:
    system = _system(args)
    pattern = _pattern(args, system)
    if not args.k_list:
        raise ConfigError("--k-list is required")
    if (args.a is None) != (args.b is None):
        raise ConfigError("--a and --b must be given together")
    if args.a is not None and (args.b < 2 or args.a == 0 or abs(args.a) >= args.b):
        raise ConfigError("need 0 < |a| < b")
    config = TheoremConfig(system.name, pattern, tuple(_int_list(args.k_list)))
    cert = _run_certify(system, config, args.a, args.b)
    _emit(args, cert.render_text() if args.format == "text" else _dumps(cert.to_json()))
    return EXIT_OK


def cmd_witness(args) -> int:
    system = _system(args)
    pattern = _pattern(args, system)
    if args.k is None:
        raise ConfigError("--k is required")
    if args.b < 2 or args.a == 0 or abs(args.a) >= args.b:
        raise ConfigError("need 0 < |a| < b")
    m_range = _int_list(args.m)
    if any(not 0 <= m <= 3 for m in m_range):
        raise ConfigError("--m values must lie in 0..3")
    triple = _stage("approx", hermite_pade.solve, system, hermite_pade.degree_pattern(pattern, args.k))
    growth = _stage("growth", exponent_engine.pattern_growth, system, pattern, [args.k])
    rows = _stage("witness", witness_numeric.decay_report, system, triple, m_range, args.a, args.b, growth)
    if args.format == "tsv":
        _emit(args, witness_numeric.decay_tsv(rows))
    else:
        _emit(args, _dumps([r.to_json() for r in rows]))
    return EXIT_OK


# reproduction against reference values


def compare_theorem(name: str, cert, golden: dict) -> list:
    """Differences between a certificate and the reference values (empty if all match)."""
    diffs = []
    if [ks[0] for ks in cert.k_lists] != golden["k_list"]:
        diffs.append(f"k list {[ks[0] for ks in cert.k_lists]} != {golden['k_list']}")
    slope, const = golden["o_affine"]
    for ks in cert.k_lists:
        expected = slope * ks[0] + const
        if cert.o_values[ks[0]] != expected:
            diffs.append(f"o({ks[0]}) = {cert.o_values[ks[0]]}, expected {expected}")
    for k, e in cert.growth.e_bar.items():
        if e != k + golden["e_bar_offset"]:
            diffs.append(f"e_bar({k}) = {e}, expected {k + golden['e_bar_offset']}")
    if cert.growth.tau != golden["tau"]:
        diffs.append(f"tau = {cert.growth.tau}, expected {golden['tau']}")
    for ell, (th, ref) in enumerate(zip(cert.theta, golden["theta"]), start=1):
        if th != AffineInLambda.from_json(ref):
            diffs.append(f"theta({ell}) = {th}, expected {AffineInLambda.from_json(ref)}")
    for ell, (nu, ref) in enumerate(zip(cert.nu, golden["nu"]), start=1):
        single = nu.single()
        if single != AffineInLambda.from_json(ref):
            diffs.append(f"nu({ell}) = {nu}, expected {AffineInLambda.from_json(ref)}")
    if len(cert.theta) != len(golden["theta"]) or len(cert.nu) != len(golden["nu"]):
        diffs.append("table length mismatch")
    if cert.lambda0 != Fraction(golden["lambda0"]):
        diffs.append(f"lambda0 = {format_scalar(cert.lambda0)}, expected {golden['lambda0']}")
    got = [p.to_json() for p in cert.mu_pieces]
    want = golden["mu_pieces"]
    if len(got) != len(want):
        diffs.append(f"{len(got)} mu pieces, expected {len(want)}")
    for p, ref in zip(got, want):
        for key in ("lo", "hi", "numerator", "constant", "slope"):
            if Fraction(p[key]) != Fraction(ref[key]):
                diffs.append(f"mu piece {key}: {p[key]} != {ref[key]}")
    if cert.mu_at_zero() != Fraction(golden["mu_at_zero"]):
        diffs.append(f"mu(0) = {format_scalar(cert.mu_at_zero())}, expected {golden['mu_at_zero']}")
    if cert.delta_limit != golden["delta_limit"]:
        diffs.append(f"delta limit flag {cert.delta_limit}, expected {golden['delta_limit']}")
    return diffs


def reproduce(name: str):
    """Certify one built-in theorem and compare it with the reference values."""
    if name not in THEOREMS:
        raise ConfigError(f"unknown theorem {name!r}; expected one of {', '.join(THEOREMS)}")
    golden = load_golden()["theorems"][name]
    config = THEOREMS[name]
    system = mahler_catalog.builtin(config.system)
    cert = _run_certify(system, config)
    return cert, compare_theorem(name, cert, golden)


def cmd_reproduce(args) -> int:
    cert, diffs = reproduce(args.theorem)
    if args.format == "json":
        _emit(args, _dumps({"theorem": args.theorem, "match": not diffs, "diffs": diffs, "certificate": cert.to_json()}))
    else:
        status = "match" if not diffs else "MISMATCH"
        text = cert.render_text() + f"\n{args.theorem}: {status}"
        if diffs:
            text += "\n" + "\n".join(f"  {d}" for d in diffs)
        _emit(args, text)
    return EXIT_OK if not diffs else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mahler-measures", description="Exact linear independence measures for Mahler functions")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, formats=("json", "text"), default="json"):
        p.add_argument("--format", choices=formats, default=default)
        p.add_argument("--output", help="write to this file instead of stdout")

    p = sub.add_parser("list", help="list the built-in systems")
    p.add_argument("--custom-dir", help="directory of custom system JSON files")
    common(p, default="text")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("reproduce", help="recompute a built-in result (thm1..thm5) and compare with reference values")
    p.add_argument("theorem", choices=sorted(THEOREMS))
    common(p, default="text")
    p.set_defaults(func=cmd_reproduce)

    def sys_arg(p):
        p.add_argument("--system", required=True, help="built-in name or path to a system JSON file")

    p = sub.add_parser("expand", help="series coefficients of F and G")
    sys_arg(p)
    p.add_argument("--order", type=int, required=True)
    common(p, formats=("json", "tsv"))
    p.set_defaults(func=cmd_expand)

    for name, func, help_text in (("approx", cmd_approx, "Hermite-Pade approximant"),
                                  ("det", cmd_det, "determinant certificate for (k, k+1, k+2)")):
        p = sub.add_parser(name, help=help_text)
        sys_arg(p)
        p.add_argument("--k", type=int)
        p.add_argument("--pattern", help="degree pattern id (thm1..thm5)")
        if name == "approx":
            p.add_argument("--degrees", help="explicit degrees d1,d2,d3")
            p.add_argument("--order", type=int, help="series truncation order")
        common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("scan", help="nonvanishing of D over a range of k")
    sys_arg(p)
    p.add_argument("--pattern")
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--k-list")
    common(p, formats=("json", "tsv", "text"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("certify", help="full exponent certificate")
    sys_arg(p)
    p.add_argument("--pattern")
    p.add_argument("--k-list", required=True, help="comma-separated k_{l,1} values")
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    common(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("witness", help="remainder decay at a rational point")
    sys_arg(p)
    p.add_argument("--pattern")
    p.add_argument("--k", type=int)
    p.add_argument("--a", type=int, default=1)
    p.add_argument("--b", type=int, default=2)
    p.add_argument("--m", default="0,1,2")
    common(p, formats=("json", "tsv"))
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        print(f"failed at stage {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
