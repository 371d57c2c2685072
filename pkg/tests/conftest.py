import contextlib
import logging
from pathlib import Path

import pytest

from grg import load_game

DATA = Path(__file__).parent / "data"

_criteria_key = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_criteria_key] = {}


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fig1():
    return load_game(DATA / "fig1.grg")


@pytest.fixture
def fig1_adam():
    return load_game(DATA / "fig1-adam.grg")


@pytest.fixture
def criterion(request):
    """Context manager recording pass/fail for a numbered acceptance criterion."""
    results = request.config.stash[_criteria_key]

    @contextlib.contextmanager
    def record(number, title):
        try:
            yield
        except BaseException as exc:
            results[number] = (title, False, f"{type(exc).__name__}: {exc}"[:200])
            raise
        results[number] = (title, True, "")

    return record


@pytest.fixture(autouse=True)
def _quiet_reduction_warnings():
    # duplicate-clause warnings are expected in sweeps
    logging.getLogger("grg").setLevel(logging.ERROR)
    yield
    logging.getLogger("grg").setLevel(logging.NOTSET)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash[_criteria_key]
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, detail = results[number]
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
