import pytest

from fmrforge import bundled


@pytest.fixture(scope="session")
def lib():
    return bundled.demo_library()


@pytest.fixture(scope="session")
def nets(lib):
    return {name: bundled.netlist(name, lib) for name in bundled.NETLISTS}


@pytest.fixture(scope="session")
def fig1a(nets):
    return nets["fig1a"]


@pytest.fixture(scope="session")
def fig1b(nets):
    return nets["fig1b"]


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
