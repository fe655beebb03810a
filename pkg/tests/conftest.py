import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo", max_examples=40, deadline=None, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


@pytest.fixture(autouse=True)
def _quiet_overcollocation():
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*overcollocation.*", category=RuntimeWarning)
        yield


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict_line():
    """Record and print one PASS/FAIL line for an acceptance check."""

    def _line(name: str, ok: bool, detail: str) -> bool:
        line = f"ACCEPT {name}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance summary")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
