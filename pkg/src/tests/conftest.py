"""
This module contains fixtures shared by the QTradeoff test suite.

Fixtures:
- test_client: A TestClient instance for simulating requests to the FastAPI app.
- cli_runner: A typer CliRunner keeping stdout and stderr apart.
- orthogonal_pair / sixty_degree_pair / thirty_degree_pair: Canonical observable pairs.
- optimal_orthogonal: The optimal joint POVM at theta = pi/2.
- povm_file / observables_file / state_file: JSON input files in a temporary directory.
- make_channel: Factory building a channel from (r, |x|, orientation).
- random_state / random_observables: Factories drawing states and observable pairs from a generator.
"""

import json
import math

import numpy as np
import pytest
from fastapi.testclient import TestClient
from typer.testing import CliRunner

from src import app
from src.bloch.schemas import BlochOperator, BlochVector, ObservablePair, QubitState
from src.bloch.service import dump_joint_povm, observable_pair_from_angle
from src.channel.service import channel_from_marginal
from src.optimal.service import optimal_povm

Z_AXIS = BlochVector(x=0.0, y=0.0, z=1.0)


@pytest.fixture
def test_client():
    """
    Provides a TestClient instance to simulate HTTP requests to the FastAPI app.

    Returns:
        TestClient: A test client for the FastAPI app.
    """

    return TestClient(app)


@pytest.fixture
def cli_runner():
    # Click >= 8.2 always keeps stderr apart and no longer accepts mix_stderr.
    try:
        return CliRunner(mix_stderr=False)
    except TypeError:
        return CliRunner()


@pytest.fixture
def orthogonal_pair():
    return observable_pair_from_angle(math.pi / 2)


@pytest.fixture
def sixty_degree_pair():
    return observable_pair_from_angle(math.pi / 3)


@pytest.fixture
def thirty_degree_pair():
    return observable_pair_from_angle(math.pi / 6)


@pytest.fixture
def optimal_orthogonal(orthogonal_pair):
    return optimal_povm(orthogonal_pair)


@pytest.fixture
def povm_file(tmp_path, thirty_degree_pair):
    """
    Writes the optimal POVM at theta = pi/6 to a temporary JSON file.

    Returns:
        Path: The file path.
    """

    path = tmp_path / "povm.json"
    path.write_text(json.dumps(dump_joint_povm(optimal_povm(thirty_degree_pair))))
    return path


@pytest.fixture
def observables_file(tmp_path, thirty_degree_pair):
    path = tmp_path / "observables.json"
    path.write_text(
        json.dumps(
            {
                "n_a": thirty_degree_pair.n_a.model_dump(),
                "n_b": thirty_degree_pair.n_b.model_dump(),
            }
        )
    )
    return path


@pytest.fixture
def state_file(tmp_path):
    path = tmp_path / "state.json"
    path.write_text(json.dumps({"r": [0.3, 0.0, 0.4]}))
    return path


@pytest.fixture
def make_channel():
    """
    Builds a channel along z from the marginal coefficients.

    Returns:
        Callable[[float, float, int], NonidealChannel]: (r, |x|, orientation) -> channel.
    """

    def _make(r_coef: float, x_norm: float, orientation: int = 1):
        element = BlochOperator(r_coef=r_coef, x=Z_AXIS * (orientation * x_norm))
        return channel_from_marginal(element, Z_AXIS, "A")

    return _make


def _random_unit(rng: np.random.Generator) -> BlochVector:
    direction = rng.normal(size=3)
    return BlochVector.from_array(direction / np.linalg.norm(direction))


@pytest.fixture
def random_state():
    """
    Draws states uniformly from the Bloch ball.

    Returns:
        Callable[[np.random.Generator], QubitState]: generator -> state.
    """

    def _draw(rng: np.random.Generator) -> QubitState:
        return QubitState(r=_random_unit(rng) * float(rng.uniform() ** (1.0 / 3.0)))

    return _draw


@pytest.fixture
def random_observables():
    """
    Draws observable pairs with independently random axes.

    Returns:
        Callable[[np.random.Generator], ObservablePair]: generator -> pair.
    """

    def _draw(rng: np.random.Generator) -> ObservablePair:
        return ObservablePair(n_a=_random_unit(rng), n_b=_random_unit(rng))

    return _draw
