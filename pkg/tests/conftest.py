import pytest

_ACCEPTANCE: list[str] = []


@pytest.fixture
def record():
    """Append one summary line per acceptance criterion."""

    def _record(number: int, ok: bool | None, detail: str) -> None:
        status = "N/A" if ok is None else ("PASS" if ok else "FAIL")
        _ACCEPTANCE.append(f"[{status}] criterion {number}: {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
        terminalreporter.write_line(line)
