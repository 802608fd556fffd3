"""Shared fixtures: named games and expensive solves reused across files."""

import numpy as np
import pytest

from sparsegames.anticheckers import build_anti_checker, correctness_game
from sparsegames.corpus import dictators_family, parity_language
from sparsegames.games import GameMatrix
from sparsegames.solver import solve_exact_small


@pytest.fixture(scope="session")
def matching_pennies() -> GameMatrix:
    return GameMatrix([[1.0, -1.0], [-1.0, 1.0]])


@pytest.fixture(scope="session")
def rps() -> GameMatrix:
    return GameMatrix([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


@pytest.fixture(scope="session")
def asym_2x2() -> GameMatrix:
    """[[3,1],[0,2]]: value 1.5 at p=(1/2,1/2), q=(1/4,3/4)."""
    return GameMatrix([[3.0, 1.0], [0.0, 2.0]])


def random_int_game(rng: np.random.Generator, max_dim: int = 6) -> GameMatrix:
    r = int(rng.integers(1, max_dim + 1))
    c = int(rng.integers(1, max_dim + 1))
    return GameMatrix(rng.integers(-5, 6, size=(r, c)).astype(np.float64))


@pytest.fixture(scope="session")
def parity_setup():
    """Parity n=4 vs the 10-program dictator family, solved exactly."""
    lang = parity_language(4)
    fam = dictators_family(4)
    game = correctness_game(lang, fam).materialize()
    return lang, fam, game, solve_exact_small(game)


@pytest.fixture(scope="session")
def parity_anti_checker(parity_setup):
    lang, fam, _, _ = parity_setup
    return build_anti_checker(lang, fam, epsilon=0.125, seed=0)
