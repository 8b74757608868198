from __future__ import annotations

import json

import pytest

from wshift.weights import TailRule, WeightSpec

_ACCEPTANCE_LINES: list[str] = []


def record_acceptance(line: str) -> None:
    _ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def unilateral(tail, prefix=(), name=""):
    return WeightSpec(kind="unilateral", tail_pos=tail, prefix_pos=tuple(prefix), name=name)


def bilateral(tail_pos, tail_neg, prefix_pos=(), prefix_neg=(), name=""):
    return WeightSpec(kind="bilateral", tail_pos=tail_pos, tail_neg=tail_neg,
                      prefix_pos=tuple(prefix_pos), prefix_neg=tuple(prefix_neg), name=name)


@pytest.fixture
def shift():
    return unilateral(TailRule.constant(1.0), name="shift")


@pytest.fixture
def bilateral_shift():
    return bilateral(TailRule.constant(1.0), TailRule.constant(1.0), name="bilateral_shift")


@pytest.fixture
def bergman():
    return unilateral(TailRule.builtin("bergman"), name="bergman")


@pytest.fixture
def williams():
    return unilateral(TailRule.builtin("williams_gap"), name="williams_gap")


@pytest.fixture
def write_spec(tmp_path):
    def _write(doc, name="spec.json"):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)

    return _write
