"""Core game machinery: ranges, expectations, best responses, file formats."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsegames.errors import (
    DimensionMismatch,
    InvalidGame,
    InvalidStrategy,
    OracleBudgetExceeded,
)
from sparsegames.games import (
    GameMatrix,
    MixedStrategy,
    PayoffOracle,
    Player,
    UniformMultiset,
    best_response,
    expected_payoff,
    game_from_csv,
    game_from_json,
    game_to_csv,
    game_to_json_dict,
    payoff_range,
    strategy_from_multiset,
)


def test_payoff_range_examples(matching_pennies, asym_2x2):
    assert payoff_range(asym_2x2) == (0.0, 3.0)
    assert payoff_range(matching_pennies) == (-1.0, 1.0)
    assert payoff_range(GameMatrix([[5.0]])) == (5.0, 5.0)


def test_game_matrix_rejects_bad_input():
    with pytest.raises(InvalidGame):
        GameMatrix([[1.0, float("nan")]])
    with pytest.raises(InvalidGame):
        GameMatrix([[1.0, float("inf")]])
    with pytest.raises(InvalidGame):
        GameMatrix(np.zeros((0, 3)))


def test_game_matrix_immutable(matching_pennies):
    with pytest.raises(ValueError):
        matching_pennies.payoffs[0, 0] = 7.0


def test_expected_payoff_examples(matching_pennies, asym_2x2):
    half = MixedStrategy(Player.MIN, [0.5, 0.5])
    halfq = MixedStrategy(Player.MAX, [0.5, 0.5])
    assert expected_payoff(matching_pennies, half, halfq) == pytest.approx(0.0, abs=1e-12)

    q = MixedStrategy(Player.MAX, [0.25, 0.75])
    assert expected_payoff(asym_2x2, half, q) == pytest.approx(1.5, abs=1e-12)


def test_expected_payoff_point_masses(asym_2x2):
    for i in range(2):
        for j in range(2):
            p = MixedStrategy.point_mass(Player.MIN, i, 2)
            q = MixedStrategy.point_mass(Player.MAX, j, 2)
            assert expected_payoff(asym_2x2, p, q) == asym_2x2.payoffs[i, j]


def test_expected_payoff_dimension_mismatch(matching_pennies):
    p3 = MixedStrategy(Player.MIN, [1 / 3] * 3)
    q = MixedStrategy(Player.MAX, [0.5, 0.5])
    with pytest.raises(DimensionMismatch):
        expected_payoff(matching_pennies, p3, q)
    with pytest.raises(InvalidStrategy):
        expected_payoff(matching_pennies, q, q)  # wrong player order


def test_best_response_examples(matching_pennies, asym_2x2):
    point = MixedStrategy.point_mass(Player.MIN, 0, 2)
    assert best_response(matching_pennies, point) == (0, 1.0)

    half = MixedStrategy(Player.MIN, [0.5, 0.5])
    idx, val = best_response(matching_pennies, half)
    assert idx == 0 and val == pytest.approx(0.0, abs=1e-12)  # tie -> lowest index

    q = MixedStrategy(Player.MAX, [0.25, 0.75])
    idx, val = best_response(asym_2x2, q)
    assert idx == 0 and val == pytest.approx(1.5, abs=1e-12)  # rows tie at 1.5


def test_strategy_from_multiset_examples():
    s = strategy_from_multiset(UniformMultiset(Player.MIN, (0, 0, 1)), 3)
    assert np.allclose(s.weights, [2 / 3, 1 / 3, 0.0], atol=1e-15)
    s = strategy_from_multiset(UniformMultiset(Player.MIN, (2,)), 3)
    assert s.weights.tolist() == [0.0, 0.0, 1.0]
    s = strategy_from_multiset(UniformMultiset(Player.MAX, (0, 1, 2, 3)), 4)
    assert np.allclose(s.weights, 0.25)
    with pytest.raises(DimensionMismatch):
        strategy_from_multiset(UniformMultiset(Player.MIN, (5,)), 3)


def test_multiset_canonical_form():
    ms = UniformMultiset(Player.MIN, (3, 1, 1, 0))
    assert ms.items == (0, 1, 1, 3)
    assert ms.k == 4
    with pytest.raises(InvalidStrategy):
        UniformMultiset(Player.MIN, ())


def test_mixed_strategy_validation():
    with pytest.raises(InvalidStrategy):
        MixedStrategy(Player.MIN, [0.5, 0.6])
    with pytest.raises(InvalidStrategy):
        MixedStrategy(Player.MIN, [-0.1, 1.1])
    MixedStrategy(Player.MIN, [0.5, 0.5 + 1e-10])  # inside the 1e-9 tolerance


@st.composite
def game_and_strategies(draw):
    r = draw(st.integers(1, 5))
    c = draw(st.integers(1, 5))
    entries = st.floats(-100, 100, allow_nan=False)
    m = draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r))
    pw = np.array(draw(st.lists(st.floats(0.01, 1), min_size=r, max_size=r)))
    qw = np.array(draw(st.lists(st.floats(0.01, 1), min_size=c, max_size=c)))
    return (
        GameMatrix(np.array(m)),
        MixedStrategy(Player.MIN, pw / pw.sum()),
        MixedStrategy(Player.MAX, qw / qw.sum()),
    )


@settings(max_examples=60, deadline=None)
@given(game_and_strategies())
def test_expected_payoff_within_range(gps):
    game, p, q = gps
    v = expected_payoff(game, p, q)
    assert game.range_lo - 1e-9 <= v <= game.range_hi + 1e-9


@settings(max_examples=60, deadline=None)
@given(game_and_strategies())
def test_best_response_dominates_any_mixture(gps):
    game, p, q = gps
    assert best_response(game, p).value >= expected_payoff(game, p, q) - 1e-9
    assert best_response(game, q).value <= expected_payoff(game, p, q) + 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 12))
def test_multiset_matches_induced_strategy(seed, k):
    rng = np.random.Generator(np.random.PCG64(seed))
    game = GameMatrix(rng.random((4, 6)) * 10 - 5)
    items = tuple(int(i) for i in rng.integers(0, 4, size=k))
    ms = UniformMultiset(Player.MIN, items)
    induced = strategy_from_multiset(ms, 4)
    assert abs(induced.weights.sum() - 1.0) <= 1e-12
    br_ms = best_response(game, ms)
    br_ind = best_response(game, induced)
    assert br_ms.index == br_ind.index
    assert br_ms.value == pytest.approx(br_ind.value, abs=1e-12)


def _oracle_from(game: GameMatrix) -> PayoffOracle:
    return PayoffOracle(
        rows=game.rows,
        cols=game.cols,
        bounds=(game.range_lo, game.range_hi),
        evaluate=lambda i, j: float(game.payoffs[i, j]),
    )


def test_oracle_best_response_matches_matrix(rps):
    oracle = _oracle_from(rps)
    p = MixedStrategy(Player.MIN, [0.6, 0.3, 0.1])
    q = MixedStrategy(Player.MAX, [0.2, 0.5, 0.3])
    assert best_response(oracle, p) == best_response(rps, p)
    assert best_response(oracle, q) == best_response(rps, q)
    assert expected_payoff(oracle, p, q) == pytest.approx(expected_payoff(rps, p, q), abs=1e-12)


def test_oracle_best_response_accepts_multisets(rps):
    oracle = _oracle_from(rps)
    ms = UniformMultiset(Player.MIN, (0, 0, 2))
    assert best_response(oracle, ms) == best_response(rps, ms)
    ms_max = UniformMultiset(Player.MAX, (1, 2, 2, 2))
    assert best_response(oracle, ms_max) == best_response(rps, ms_max)


def test_oracle_spot_check_and_materialize(rps):
    oracle = _oracle_from(rps)
    oracle.spot_check(samples=32)
    assert np.array_equal(oracle.materialize().payoffs, rps.payoffs)
    with pytest.raises(OracleBudgetExceeded):
        oracle.materialize(budget=4)

    lying = PayoffOracle(rows=2, cols=2, bounds=(0.0, 0.5), evaluate=lambda i, j: 1.0)
    with pytest.raises(InvalidGame):
        lying.spot_check(samples=4)


def test_json_round_trip(asym_2x2):
    text = json.dumps(game_to_json_dict(asym_2x2))
    game = game_from_json(text)
    assert np.array_equal(game.payoffs, asym_2x2.payoffs)


@pytest.mark.parametrize(
    "data",
    [
        {"rows": 2, "cols": 2, "payoffs": [[1, 2], [3]]},  # ragged
        {"rows": 2, "cols": 2, "payoffs": [[1, 2]]},  # wrong row count
        {"rows": 2, "cols": 2, "payoffs": [[1, 2], [3, float("nan")]]},
        {"rows": 2, "cols": 2, "payoffs": [[1, 2], [3, "x"]]},
        {"rows": 0, "cols": 2, "payoffs": []},
        {"cols": 2, "payoffs": [[1, 2]]},  # missing rows
    ],
)
def test_json_rejects_malformed(data):
    with pytest.raises(InvalidGame):
        game_from_json(json.dumps(data, default=str))


def test_csv_round_trip(matching_pennies):
    game = game_from_csv(game_to_csv(matching_pennies))
    assert np.array_equal(game.payoffs, matching_pennies.payoffs)


@pytest.mark.parametrize("text", ["1,2\n3\n", "1,nan\n2,3\n", "1,x\n", "", "1,inf\n2,3\n"])
def test_csv_rejects_malformed(text):
    with pytest.raises(InvalidGame):
        game_from_csv(text)
