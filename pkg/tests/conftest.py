"""Shared test plumbing: the acceptance-criteria scoreboard.

Acceptance tests report their verdict through record_criterion before
asserting, so the terminal summary always carries one PASS/FAIL line per
criterion even when pytest captures stdout.
"""

_CRITERIA: dict[int, tuple[str, bool, str]] = {}


def record_criterion(number: int, name: str, ok: bool, detail: str = "") -> None:
    _CRITERIA[number] = (name, bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        name, ok, detail = _CRITERIA[number]
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {number:02d} {verdict:4s} {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
