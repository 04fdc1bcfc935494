"""Shared pytest hooks.

The acceptance tests register one status line per criterion here; the
terminal-summary hook replays them uncaptured at the end of the run.
"""

criterion_lines: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if criterion_lines:
        terminalreporter.section("acceptance criteria")
        for line in criterion_lines:
            terminalreporter.write_line(line)
