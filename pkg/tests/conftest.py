from __future__ import annotations

from importlib import resources

import pytest

from tamc.model import ThresholdAutomaton, parse_ta
from tamc.smt import Solver


@pytest.fixture(scope="session")
def solver():
    """One shared solver process for the whole run; each query is independent."""
    with Solver() as sv:
        yield sv


@pytest.fixture(scope="session")
def bench():
    return resources.files("tamc.benchmarks")


@pytest.fixture(scope="session")
def strb(bench) -> ThresholdAutomaton:
    return parse_ta(bench.joinpath("strb.ta.json").read_text())


@pytest.fixture(scope="session")
def strb_weak(bench) -> ThresholdAutomaton:
    return parse_ta(bench.joinpath("strb_weak.ta.json").read_text())


@pytest.fixture(scope="session")
def unforg_text(bench) -> str:
    return bench.joinpath("strb_unforg.eltl").read_text()
