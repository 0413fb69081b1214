from fractions import Fraction

import mpmath
import pytest

_acceptance: dict = {}


def mp_chord(x: Fraction, dps: int = 60):
    """High-precision 2*sin(pi*||x||), independent of the package's series."""
    with mpmath.workdps(dps):
        f = Fraction(x) % 1
        n = min(f, 1 - f)
        return 2 * mpmath.sin(mpmath.pi * mpmath.mpf(n.numerator) / n.denominator)


def mp_value(q: Fraction, dps: int = 60):
    with mpmath.workdps(dps):
        return mpmath.mpf(q.numerator) / q.denominator


@pytest.fixture
def chord_oracle():
    return mp_chord


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance):
        outcome = _acceptance[nodeid]
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {nodeid.split('::')[-1]}")
