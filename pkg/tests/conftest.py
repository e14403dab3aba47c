import functools
import os
import sys

sys.path.insert(0, os.path.dirname(__file__))

from mahler_measures import hermite_pade, mahler_catalog  # noqa: E402

ACCEPTANCE_LINES: list = []


@functools.lru_cache(maxsize=None)
def cached_space(name: str, degrees: tuple):
    return hermite_pade.approximant_space(mahler_catalog.builtin(name), degrees)


@functools.lru_cache(maxsize=None)
def cached_solve(name: str, degrees: tuple):
    space = cached_space(name, degrees)
    return space.basis[space.canonical_index()]


@functools.lru_cache(maxsize=None)
def cached_certificate(theorem: str):
    from mahler_measures.exponent_engine import THEOREMS, certify

    config = THEOREMS[theorem]
    return certify(mahler_catalog.builtin(config.system), config)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
