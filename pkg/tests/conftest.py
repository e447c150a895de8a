import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from maxbent.survey import SurveyConfig, run_survey  # noqa: E402


def _timed(cfg):
    t0 = time.perf_counter()
    res = run_survey(cfg)
    res.elapsed = time.perf_counter() - t0
    return res


@pytest.fixture(scope="session")
def survey4():
    return _timed(SurveyConfig(m=4, r=1, revalidate_rate=0.05))


@pytest.fixture(scope="session")
def survey5():
    # the published m = 5 table; 1% of members are recomputed on GF(2^10)
    return _timed(SurveyConfig(m=5, r=1, revalidate_rate=0.01, seed=0))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
