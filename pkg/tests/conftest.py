import contextlib

import pytest

from tritsim.netlist import elaborate
from tritsim.stdcells import build_standard_cell

_ACCEPTANCE: list[tuple[str, bool]] = []


@contextlib.contextmanager
def criterion(label: str):
    """Record one acceptance criterion as PASS unless the block raises."""
    ok = False
    try:
        yield
        ok = True
    finally:
        _ACCEPTANCE.append((label, ok))
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {label}")


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}")


@pytest.fixture(scope="session")
def flat():
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = elaborate(build_standard_cell(name))
        return cache[name]

    return get
