from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from pathpref.graph import Constraint, TaskSpec, graph_from_edges
from pathpref.scenarios import Scenario


@pytest.fixture
def two_route():
    """Route A: t=10 clean; route B: t=5 but inside constraint 0 (box [0,10])."""
    g = graph_from_edges(
        "two-route",
        [("s", "g", 10.0), ("s", "g", 5.0), ("g", "s", 100.0)],
    )
    constraints = [Constraint(0, frozenset({1}), 0.0, 10.0)]
    return Scenario("two-route", g, constraints, [TaskSpec("s", "g")])


@pytest.fixture
def diamond():
    """Two disjoint s->g routes through a and b, plus a return edge."""
    g = graph_from_edges(
        "diamond",
        [
            ("s", "a", 2.0),
            ("a", "g", 3.0),
            ("s", "b", 4.0),
            ("b", "g", 1.5),
            ("g", "s", 50.0),
        ],
    )
    constraints = [
        Constraint(0, frozenset({0, 1}), 0.0, 8.0),
        Constraint(1, frozenset({3}), 0.0, 6.0),
    ]
    return Scenario("diamond", g, constraints, [TaskSpec("s", "g")])


@pytest.fixture
def three_region():
    """Three parallel s->g routes with distinct feature columns."""
    g = graph_from_edges(
        "three",
        [
            ("s", "g", 12.0),  # clean, slow
            ("s", "g", 6.0),   # in c0
            ("s", "g", 4.0),   # in c1
            ("g", "s", 60.0),
        ],
    )
    constraints = [
        Constraint(0, frozenset({1}), 0.0, 10.0),
        Constraint(1, frozenset({2}), 0.0, 12.0),
    ]
    return Scenario("three", g, constraints, [TaskSpec("s", "g")])
