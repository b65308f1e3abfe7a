"""Shared test configuration.

The acceptance tests register one PASS/FAIL line per criterion in
ACCEPTANCE_LINES; the terminal-summary hook below prints them at the end of
every run so the verdicts are visible even when stdout capture is on.
"""
import os

from hypothesis import settings

# Property tests share time with jit warmup; keep the per-example deadline off
# and the example count moderate.
settings.register_profile("reactlab", deadline=None, max_examples=50)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "reactlab"))

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)
