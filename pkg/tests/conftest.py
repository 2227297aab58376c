"""Shared helpers for the test suite."""

import math
import random

import pytest

from covreplan.worldmodel import Pose, RobotParams, Scenario


def make_map_text(rows, cell_size=1.0):
    """Build map-file text from row strings."""
    width = len(rows[0])
    head = f"oarp-map v1 {width} {len(rows)} {cell_size:g}"
    return "\n".join([head, *rows]) + "\n"


def rand_polyomino(rng: random.Random, n: int):
    """Random edge-connected cell set of size n, sorted for determinism."""
    cells = {(0, 0)}
    while len(cells) < n:
        c, r = rng.choice(sorted(cells))
        cells.add(rng.choice([(c + 1, r), (c - 1, r), (c, r + 1), (c, r - 1)]))
    return sorted(cells)


@pytest.fixture
def robot_params():
    return RobotParams(tool_width=0.8, v_max=1.0, accel=0.5,
                       omega=math.radians(30.0), sensor_radius=5.6)


@pytest.fixture
def scenario(robot_params):
    return Scenario(Pose(0.4, 0.4, 0.0), robot_params, seed=0)
