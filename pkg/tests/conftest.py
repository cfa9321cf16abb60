from __future__ import annotations

import os
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from mancalog.dsl import load_network, load_program_files, parse_program

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "default", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# Lines collected by the acceptance suite, echoed after the run.
ACCEPTANCE_LINES: list = []


def fixture_path(name: str) -> str:
    return str(FIXTURES / name)


def load_fixture(program: str, network: str = "social_network.json"):
    return load_program_files(fixture_path(network), fixture_path(program))


def parse_on_social_net(text: str, **kwargs):
    net, reg, t_max = load_network((FIXTURES / "social_network.json").read_text())
    return parse_program(text, net, reg, t_max, **kwargs)


@pytest.fixture
def social_net():
    return load_network((FIXTURES / "social_network.json").read_text())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def initial_worlds():
    """Initial network interpretation of the running example, typed in by hand."""
    from mancalog.bounds import Bound

    B = Bound.parse
    one, zero = B("[1,1]"), B("[0,0]")
    node = lambda male, a, b: {  # noqa: E731
        "male": one if male else zero,
        "female": zero if male else one,
        "watchesA": B(a),
        "watchesB": B(b),
    }
    worlds = {
        "1": node(True, "[0.9,1.0]", "[0.8,1.0]"),
        "2": node(False, "[0.0,0.3]", "[0.0,0.2]"),
        "3": node(True, "[0.6,1.0]", "[0.0,0.2]"),
        "4": node(False, "[0.0,0.2]", "[0.9,1.0]"),
        "5": node(True, "[0.0,0.2]", "[0.7,1.0]"),
    }
    for e in [("1", "2"), ("2", "1"), ("3", "4"), ("4", "3"), ("4", "5")]:
        worlds[e] = {"strongTie": one, "weakTie": zero}
    for e in [("1", "3"), ("2", "3")]:
        worlds[e] = {"strongTie": zero, "weakTie": one}
    return worlds
