import pytest

from chemotaxis_moments.closures import build_table


@pytest.fixture(scope="session")
def half_table():
    return build_table("half")


@pytest.fixture(scope="session")
def quarter_table():
    return build_table("quarter")


@pytest.fixture(scope="session")
def m1_1d_table():
    return build_table("m1_1d")


@pytest.fixture(scope="session")
def m1_2d_table():
    return build_table("m1_2d")


_REPORT_KEY = pytest.StashKey[dict]()


@pytest.fixture
def report(request):
    """Record one summary line per acceptance criterion."""
    lines = request.config.stash.setdefault(_REPORT_KEY, {})

    def add(criterion, ok, detail):
        line = f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[criterion] = line
        print(line)
        return ok

    return add


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_REPORT_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for key in sorted(lines):
            terminalreporter.write_line(lines[key])
