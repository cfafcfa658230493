"""Shared pytest hooks for the acceptance gate.

The numbered acceptance tests record a one-line verdict here; the hook
below prints all recorded verdicts as a dedicated block at the end of
the run so the pass/fail status of every criterion is visible even when
pytest captures per-test stdout.
"""

from __future__ import annotations

CRITERIA_TOTAL = 9

_verdicts: dict[int, str] = {}


def verdict(number: int, passed: bool, detail: str) -> None:
    """Record and print one criterion verdict, then assert it."""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}"
    _verdicts[number] = line
    print(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_verdicts):
        terminalreporter.write_line(_verdicts[number])
    missing = [str(n) for n in range(1, CRITERIA_TOTAL + 1) if n not in _verdicts]
    if missing:
        terminalreporter.write_line(
            "no verdict recorded (test errored or was skipped) for criteria: "
            + ", ".join(missing)
        )
