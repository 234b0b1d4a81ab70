import sys
from pathlib import Path

import pytest

from vagueness import ExemplarSets, Metric, ObservationSchema, SystemRecord, build_framework

sys.path.insert(0, str(Path(__file__).parent))

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

_criteria = {}


def record_criterion(number, description, passed, detail=""):
    _criteria[number] = (description, passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        description, passed, detail = _criteria[number]
        status = "PASS" if passed else "FAIL"
        suffix = f" ({detail})" if detail else ""
        terminalreporter.write_line(f"[{status}] criterion {number}: {description}{suffix}")


def rec(sid, *features, **kw):
    return SystemRecord(sid, tuple(features), **kw)


HEIGHT = ObservationSchema(("height_m",), ("m",))


def tall_framework(clear=(1.9, 2.0), clear_non=(1.5, 1.6), borderline=(1.8,), metric=None, observer="A1"):
    ids = iter(f"p{i}" for i in range(1, 100))
    exemplars = ExemplarSets(
        clear=tuple(rec(next(ids), v) for v in clear),
        clear_non=tuple(rec(next(ids), v) for v in clear_non),
        borderline=tuple(rec(next(ids), v) for v in borderline),
    )
    metric = metric or Metric.linear([1.0], 0.0, 0.0, 3.0)
    return build_framework(observer, "tall", HEIGHT, exemplars, metric)


@pytest.fixture
def tall():
    return tall_framework()


@pytest.fixture
def scenarios_dir():
    return SCENARIOS
