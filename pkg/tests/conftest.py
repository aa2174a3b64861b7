import pytest

from relayplan.assignment import ChannelSet
from relayplan.channel import RadioParams
from relayplan.scenario import Zone


@pytest.fixture
def radio():
    return RadioParams.from_dbm()


@pytest.fixture
def channels():
    return ChannelSet.from_mhz()


@pytest.fixture
def zone():
    return Zone((500, 500, 0))


ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = []
    config.addinivalue_line("markers", "acceptance: end-to-end acceptance criterion")


@pytest.fixture
def record(request):
    """Log one PASS/FAIL line for an acceptance criterion."""

    def _record(number, title, passed, detail=""):
        line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}" + (f": {detail}" if detail else "")
        request.config.stash[ACCEPTANCE].append((number, line))
        print(line)
        return passed

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
