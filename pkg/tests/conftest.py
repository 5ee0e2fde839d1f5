import pytest

ACCEPTANCE_LINES = []


def pytest_addoption(parser):
    parser.addoption("--slow", action="store_true", default=False, help="run slow GL_3 checks")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--slow"):
        return
    skip = pytest.mark.skip(reason="needs --slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(label, ok, detail) then assert ok."""
    def record(label, ok, detail=""):
        line = f"{label}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
