import contextlib
from pathlib import Path

import pytest

from nasl.analysis import check_specification
from nasl.parser import parse_source

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "nasl" / "fixtures"
GOLDEN = Path(__file__).resolve().parent / "golden"


def fixture_path(name: str) -> Path:
    return FIXTURES / f"{name}.nsml"


def load(name: str):
    path = fixture_path(name)
    return check_specification(parse_source(path.read_text(encoding="utf-8"), str(path)))


def check(source: str):
    return check_specification(parse_source(source))


def codes(diags):
    return [d.code for d in diags]


# acceptance report: test_acceptance.py records one line per criterion
ACCEPTANCE: dict[str, tuple[str, bool]] = {}


@pytest.fixture
def criterion():
    """`with criterion("3", "title"):` records PASS, or FAIL if the block raises."""

    @contextlib.contextmanager
    def record(key: str, title: str):
        ACCEPTANCE[key] = (title, False)
        yield
        ACCEPTANCE[key] = (title, True)

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        title, passed = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {key}: {title}")
