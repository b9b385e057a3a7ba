"""Collects the acceptance suite's PASS/FAIL lines and repeats them at the end of the run."""

import pytest


def pytest_configure(config):
    config.acceptance_lines = []


@pytest.fixture
def report_criterion(request):
    """Callable ``(line)`` that prints a verdict line and keeps it for the summary."""
    def report(line: str) -> None:
        print(line)
        request.config.acceptance_lines.append(line)
    return report


def pytest_terminal_summary(terminalreporter, config):
    if config.acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in config.acceptance_lines:
            terminalreporter.write_line(line)
