from contextlib import contextmanager

import pytest

CRITERIA: dict[int, tuple[str, str, str]] = {}


@contextmanager
def _criterion(number: int, title: str):
    info: dict = {}
    try:
        yield info
    except BaseException as exc:
        CRITERIA[number] = ("FAIL", title, f"{type(exc).__name__}: {exc}".splitlines()[0][:200])
        raise
    CRITERIA[number] = ("PASS", title, info.get("detail", ""))


@pytest.fixture
def criterion():
    return _criterion


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        status, title, detail = CRITERIA[n]
        line = f"criterion {n}: {status}  {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
