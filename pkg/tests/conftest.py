import os

import pytest

from qkdv.hierarchy import Hierarchy

ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory):
    env = os.environ.get("QKDV_TEST_CACHE")
    if env:
        return env
    return str(tmp_path_factory.mktemp("qkdv-cache"))


@pytest.fixture(scope="session")
def H(cache_dir):
    return Hierarchy(cache_dir=cache_dir)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {text}")
