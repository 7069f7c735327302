from __future__ import annotations

import warnings
from functools import lru_cache

import pytest

from radial_pdirichlet.minimizer import build_minimizer


@lru_cache(maxsize=None)
def minimizer(r: float, R: float, p: float, nodes: int = 1000):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return build_minimizer(r, R, p, nodes)


@pytest.fixture(scope="session")
def get_minimizer():
    return minimizer


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_criterion_" not in getattr(rep, "nodeid", "") or rep.when != "call" and outcome == "passed":
                continue
            num = int(rep.nodeid.split("test_criterion_")[1][:2])
            text = dict(getattr(rep, "user_properties", [])).get("criterion", rep.nodeid.split("::")[-1])
            lines.append((num, f"{'PASS' if outcome == 'passed' else 'FAIL'}  criterion {num:2d}  {text}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
