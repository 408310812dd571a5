from contextlib import contextmanager

import pytest

_CRITERIA = {}


@pytest.fixture
def criterion():
    """Record the outcome of an acceptance criterion for the terminal summary."""

    @contextmanager
    def record(number, title):
        entry = _CRITERIA.setdefault(number, {"title": title, "ok": True, "notes": []})
        note = []
        try:
            yield note
        except BaseException:
            entry["ok"] = False
            entry["notes"].extend(note)
            raise
        entry["notes"].extend(note)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        status = "PASS" if entry["ok"] else "FAIL"
        detail = "; ".join(entry["notes"])
        line = f"criterion {number:>2}: {status}  {entry['title']}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
