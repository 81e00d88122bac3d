from __future__ import annotations

import os
import sys

import pytest
from hypothesis import settings

from dssp import example_path
from dssp.model import Agent, CostModel, SecurityRequirement, SystemModel

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def g1() -> Agent:
    return Agent(
        {"q0", "q1", "q2"},
        "q0",
        [("q0", "a1", "q1"), ("q1", "a2", "q2"), ("q2", "a3", "q0")],
        protectable={"a1", "a2"},
        secret_states={"q2"},
        index=1,
        name="G1",
    )


@pytest.fixture
def g2() -> Agent:
    return Agent(
        {"q0", "q1", "q2", "q3", "q4"},
        "q0",
        [
            ("q0", "b1", "q1"),
            ("q1", "b2", "q2"),
            ("q2", "b3", "q3"),
            ("q0", "b4", "q3"),
            ("q3", "b5", "q4"),
            ("q4", "b6", "q1"),
            ("q2", "b7", "q0"),
            ("q4", "b7", "q0"),
        ],
        protectable={"b1", "b2", "b4", "b5"},
        secret_states={"q2", "q4"},
        index=2,
        name="G2",
    )


@pytest.fixture
def classes() -> CostModel:
    return CostModel([{"b1", "b4"}, {"a1", "b2"}, {"a2"}, {"b5"}])


@pytest.fixture
def servers(g1, g2, classes) -> SystemModel:
    return SystemModel((g1, g2), classes, SecurityRequirement([(("q2", "q2"), 1), (("q2", "q4"), 2)]))


@pytest.fixture
def servers_r3(g1, g2, classes) -> SystemModel:
    return SystemModel((g1, g2), classes, SecurityRequirement([(("q2", "q2"), 3)]))


@pytest.fixture
def servers_path():
    return str(example_path("two_servers"))


@pytest.fixture
def servers_r3_path():
    return str(example_path("two_servers_r3"))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
