import pytest

from satgrowth import CoupledLogisticSystem, GrowthParams

# benchmark parameter sets (annual revenue, cumulative revenue, headcount)
ANNUAL = dict(alpha=1.0, lam=0.145, eta=1e-5)
CUMULATIVE = dict(alpha=1.0, lam=0.15, eta=5e-7)
HEADCOUNT = dict(alpha=1.0, lam=0.09, eta=2e-6)


@pytest.fixture
def cumulative_params():
    return GrowthParams(**CUMULATIVE)


@pytest.fixture
def headcount_params():
    return GrowthParams(**HEADCOUNT)


@pytest.fixture
def benchmark_system():
    return CoupledLogisticSystem(GrowthParams(**CUMULATIVE), GrowthParams(**HEADCOUNT))


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""

    def record(number, passed, detail):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        request.config.stash[_ACCEPTANCE].append(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
