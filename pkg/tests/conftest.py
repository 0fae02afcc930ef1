from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from align_lint import fixture_text, load  # noqa: E402

ROOT = Path(__file__).resolve().parents[1]
FIXTURE_PATH = ROOT / "src" / "align_lint" / "data" / "data_capture.eam"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def fixture_src() -> str:
    return fixture_text()


@pytest.fixture(scope="session")
def fixture_model(fixture_src):
    return load(fixture_src)


@pytest.fixture
def fixture_path() -> Path:
    return FIXTURE_PATH


_ACCEPTANCE: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = "PASS" if report.passed else "FAIL"
    elif "test_acceptance.py" in report.nodeid and report.failed:
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{_ACCEPTANCE[name]}  {name}")
