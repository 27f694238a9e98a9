import warnings

import pytest

from mismatch import DiscreteDistribution, Hamming

_RESULTS = []


@pytest.fixture
def record(capsys):
    """Print and remember one pass/fail line for an acceptance criterion."""

    def _record(number, title, passed, detail):
        line = f"criterion {number:>2} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
        _RESULTS.append((number, line))
        with capsys.disabled():
            print("\n" + line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(_RESULTS):
        terminalreporter.write_line(line)


@pytest.fixture
def bern():
    return DiscreteDistribution.bernoulli


@pytest.fixture
def hamming():
    return Hamming()


@pytest.fixture(autouse=True)
def _quiet_solver_warnings():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message="Solution may be inaccurate")
        yield
