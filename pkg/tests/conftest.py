import pathlib

import pytest

from conehodge.parser import parse

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def load(name: str):
    return parse((FIXTURES / f"{name}.cone").read_text())


@pytest.fixture
def fixture_spec():
    return load


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    order = ["1", "2", "3", "4", "5", "6", "7", "8", "9a", "9b", "9c", "9d", "9e", "10"]
    for key in order:
        hit = mod.RESULTS.get(key)
        if hit is None:
            terminalreporter.write_line(f"criterion {key}: FAIL (not run or crashed)")
        else:
            ok, detail = hit
            terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} {detail}")
