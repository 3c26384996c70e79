import random
from pathlib import Path

import pytest

from wbgame.model import GameParameters
from wbgame.scenario import Scenario, load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def scenario_path(name: str) -> str:
    return str(SCENARIO_DIR / f"{name}.scn")


@pytest.fixture(scope="session")
def baseline() -> Scenario:
    return load_scenario(scenario_path("baseline"))


@pytest.fixture(scope="session")
def baseline_noleak() -> Scenario:
    return load_scenario(scenario_path("baseline_noleak"))


def sample_parameters(rng: random.Random) -> GameParameters:
    """One random parameter draw.

    w, z uniform on [0, 1]; (x, y) uniform on the triangle x, y >= 0,
    x + y <= 1 (reflection method); payoffs uniform on [-10, 10]; H, I
    uniform on [-5, 0].
    """
    u, v = rng.random(), rng.random()
    if u + v > 1.0:
        u, v = 1.0 - u, 1.0 - v
    pay = {k: rng.uniform(-10.0, 10.0) for k in "abcdefg"}
    tom = {k: rng.uniform(-10.0, 10.0) for k in "BCDEFG"}
    return GameParameters(
        w=rng.random(),
        x=u,
        y=v,
        z=rng.random(),
        H=rng.uniform(-5.0, 0.0),
        I=rng.uniform(-5.0, 0.0),
        **pay,
        **tom,
    )
