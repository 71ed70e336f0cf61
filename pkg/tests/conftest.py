import pytest

_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    """Recorder for one-line verdicts shown in the terminal summary."""

    def record(line: str) -> None:
        _ACCEPTANCE_LINES.append(line)
        print(line)

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in _ACCEPTANCE_LINES:
        terminalreporter.line(line)
