import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance_log(request):
    """Callable recording one PASS/FAIL line for the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE]

    def log(number, title, passed, detail=""):
        line = f"criterion {number} {'PASS' if passed else 'FAIL'}: {title}"
        if detail:
            line += f" [{detail}]"
        lines.append((number, line))
        print(line)

    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
