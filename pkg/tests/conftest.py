from __future__ import annotations

import cmath
import math
from fractions import Fraction

import numpy as np
import pytest

from hopflck.frame import FramePoint, HopfParams

E2PI = math.exp(2 * math.pi)

# five parameter sets: equal/unequal moduli, zero/nonzero arguments
PARAM_SETS = {
    "real-equal": HopfParams(E2PI, E2PI),
    "4-2": HopfParams(4, 2),
    "2i-2": HopfParams(2j, 2),
    "generic": HopfParams(cmath.rect(5.0, 2.1), cmath.rect(1.7, -0.8)),
    "equal-moduli-args": HopfParams(cmath.rect(3.0, 1.0), cmath.rect(3.0, -2.5)),
}


def random_point(rng: np.random.Generator) -> FramePoint:
    v = rng.normal(size=4)
    return FramePoint(rng.uniform(0, 2 * math.pi), complex(v[0], v[1]), complex(v[2], v[3]))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=sorted(PARAM_SETS))
def params(request):
    return PARAM_SETS[request.param]


GENERIC_POINT = FramePoint(0.3, 0.6 + 0.2j, 0.5 - 0.59j)


def exact(r, lb, a, b):
    return HopfParams.exact(r, lb, a, b)


F = Fraction


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)


def pytest_terminal_summary(terminalreporter):
    lines = []
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when == "call" and "test_acceptance.py::test_criterion_" in rep.nodeid:
                lines.append((rep.nodeid.split("::")[-1], "PASS" if status == "passed" else "FAIL"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"{verdict} {name}")
