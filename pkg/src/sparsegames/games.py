"""Core game representations: payoff matrices, oracles, mixed strategies.

Conventions used throughout the package:

* entry ``(i, j)`` of a payoff matrix is what the row player (Min) pays
  the column player (Max);
* Min mixes over rows, Max mixes over columns;
* ties in best responses break toward the lowest index so that every
  operation is reproducible.

All types are immutable after construction and all operations are pure,
so values can be shared freely between threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidGame,
    InvalidStrategy,
    OracleBudgetExceeded,
)

WEIGHT_SUM_TOL = 1e-9

# Hard cap on payoff evaluations when materializing an oracle.
DEFAULT_ORACLE_BUDGET = 1 << 24


class Player(str, Enum):
    MIN = "min"
    MAX = "max"

    @property
    def opponent(self) -> "Player":
        return Player.MAX if self is Player.MIN else Player.MIN


def _as_player(value: Union[str, Player]) -> Player:
    if isinstance(value, Player):
        return value
    try:
        return Player(str(value).lower())
    except ValueError:
        raise InvalidStrategy(f"unknown player {value!r}; expected 'min' or 'max'")


@dataclass(frozen=True, eq=False)
class GameMatrix:
    """Dense payoff matrix with its entry range cached at construction."""

    payoffs: np.ndarray
    rows: int = field(init=False)
    cols: int = field(init=False)
    range_lo: float = field(init=False)
    range_hi: float = field(init=False)

    def __post_init__(self):
        m = np.asarray(self.payoffs, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise InvalidGame("payoff matrix must be 2-D with at least one entry")
        if not np.isfinite(m).all():
            raise InvalidGame("payoff entries must all be finite")
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "payoffs", m)
        object.__setattr__(self, "rows", int(m.shape[0]))
        object.__setattr__(self, "cols", int(m.shape[1]))
        object.__setattr__(self, "range_lo", float(m.min()))
        object.__setattr__(self, "range_hi", float(m.max()))

    def n_strategies(self, player: Player) -> int:
        return self.rows if _as_player(player) is Player.MIN else self.cols

    @property
    def range_width(self) -> float:
        return self.range_hi - self.range_lo


@dataclass(frozen=True, eq=False)
class PayoffOracle:
    """Game given implicitly by dimensions, payoff bounds, and a callback.

    ``evaluate(i, j)`` must be deterministic and return values inside the
    declared bounds.  ``row_values``/``col_values`` are optional bulk
    accessors used to avoid per-entry Python calls; when absent they fall
    back to looping over ``evaluate``.
    """

    rows: int
    cols: int
    bounds: tuple[float, float]
    evaluate: Callable[[int, int], float]
    row_values: Callable[[int], np.ndarray] | None = None
    col_values: Callable[[int], np.ndarray] | None = None

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise InvalidGame("oracle dimensions must be positive")
        lo, hi = self.bounds
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise InvalidGame("oracle bounds must be finite with lo <= hi")
        object.__setattr__(self, "bounds", (float(lo), float(hi)))

    @property
    def range_lo(self) -> float:
        return self.bounds[0]

    @property
    def range_hi(self) -> float:
        return self.bounds[1]

    @property
    def range_width(self) -> float:
        return self.bounds[1] - self.bounds[0]

    def n_strategies(self, player: Player) -> int:
        return self.rows if _as_player(player) is Player.MIN else self.cols

    def row(self, i: int) -> np.ndarray:
        if self.row_values is not None:
            return np.asarray(self.row_values(i), dtype=np.float64)
        return np.array([self.evaluate(i, j) for j in range(self.cols)], dtype=np.float64)

    def col(self, j: int) -> np.ndarray:
        if self.col_values is not None:
            return np.asarray(self.col_values(j), dtype=np.float64)
        return np.array([self.evaluate(i, j) for i in range(self.rows)], dtype=np.float64)

    def materialize(self, budget: int = DEFAULT_ORACLE_BUDGET) -> GameMatrix:
        """Evaluate every entry into a dense :class:`GameMatrix`."""
        if self.rows * self.cols > budget:
            raise OracleBudgetExceeded(
                f"materializing needs {self.rows * self.cols} evaluations, budget {budget}"
            )
        m = np.empty((self.rows, self.cols))
        for i in range(self.rows):
            m[i, :] = self.row(i)
        return GameMatrix(m)

    def spot_check(self, samples: int = 64, seed: int = 0) -> None:
        """Sample entries and verify determinism and declared bounds."""
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        lo, hi = self.bounds
        for _ in range(samples):
            i = int(rng.integers(0, self.rows))
            j = int(rng.integers(0, self.cols))
            v = float(self.evaluate(i, j))
            if not (lo <= v <= hi):
                raise InvalidGame(f"oracle({i},{j}) = {v} outside declared bounds [{lo}, {hi}]")
            if float(self.evaluate(i, j)) != v:
                raise InvalidGame(f"oracle({i},{j}) is not deterministic")


Game = Union[GameMatrix, PayoffOracle]


@dataclass(frozen=True, eq=False)
class MixedStrategy:
    """Probability vector over one player's pure strategies."""

    player: Player
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "player", _as_player(self.player))
        w = np.asarray(self.weights, dtype=np.float64)
        if w.ndim != 1 or w.size < 1:
            raise InvalidStrategy("weights must be a non-empty vector")
        if not np.isfinite(w).all() or (w < 0).any():
            raise InvalidStrategy("weights must be finite and non-negative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidStrategy(f"weights sum to {w.sum()!r}, not 1")
        w = np.ascontiguousarray(w)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return int(self.weights.size)

    @classmethod
    def point_mass(cls, player: Player, index: int, n: int) -> "MixedStrategy":
        w = np.zeros(n)
        w[index] = 1.0
        return cls(player, w)

    @classmethod
    def uniform(cls, player: Player, n: int) -> "MixedStrategy":
        return cls(player, np.full(n, 1.0 / n))

    def support(self) -> np.ndarray:
        return np.nonzero(self.weights > 0.0)[0]


@dataclass(frozen=True)
class UniformMultiset:
    """Sorted multiset of pure-strategy indices; induces a uniform mixture.

    Playing it means drawing one element uniformly, so index ``i`` gets
    weight ``multiplicity(i) / k``.
    """

    player: Player
    items: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "player", _as_player(self.player))
        if len(self.items) < 1:
            raise InvalidStrategy("multiset must be non-empty")
        items = tuple(sorted(int(i) for i in self.items))
        if items[0] < 0:
            raise InvalidStrategy("multiset indices must be non-negative")
        object.__setattr__(self, "items", items)

    @property
    def k(self) -> int:
        return len(self.items)

    def to_strategy(self, n: int) -> MixedStrategy:
        return strategy_from_multiset(self, n)


StrategyLike = Union[MixedStrategy, UniformMultiset]


def payoff_range(game: Game) -> tuple[float, float]:
    """Smallest and largest payoff entry (declared bounds for oracles)."""
    return (game.range_lo, game.range_hi)


def strategy_from_multiset(s: UniformMultiset, n: int) -> MixedStrategy:
    """Mixed strategy of length ``n`` putting weight multiplicity/k on each index."""
    if s.items[-1] >= n:
        raise DimensionMismatch(f"multiset index {s.items[-1]} out of range for {n} strategies")
    counts = np.bincount(np.asarray(s.items), minlength=n).astype(np.float64)
    return MixedStrategy(s.player, counts / s.k)


def _resolve(game: Game, strategy: StrategyLike) -> MixedStrategy:
    n = game.n_strategies(strategy.player)
    if isinstance(strategy, UniformMultiset):
        return strategy_from_multiset(strategy, n)
    if len(strategy) != n:
        raise DimensionMismatch(
            f"{strategy.player.value} strategy has length {len(strategy)}, game needs {n}"
        )
    return strategy


def expected_payoff(game: Game, p: StrategyLike, q: StrategyLike) -> float:
    """Bilinear expected payment from Min to Max under mixtures ``p`` and ``q``."""
    if _as_player(p.player) is not Player.MIN or _as_player(q.player) is not Player.MAX:
        raise InvalidStrategy("expected_payoff needs a Min strategy then a Max strategy")
    pw = _resolve(game, p).weights
    qw = _resolve(game, q).weights
    if isinstance(game, GameMatrix):
        return float(pw @ game.payoffs @ qw)
    total = 0.0
    for i in np.nonzero(pw)[0]:
        total += pw[i] * float(game.row(int(i)) @ qw)
    return total


class BestResponse(NamedTuple):
    index: int
    value: float


def _opponent_scores(game: Game, strategy: StrategyLike) -> np.ndarray:
    """Expected payoff the opponent gets from each of their pure strategies."""
    mixed = _resolve(game, strategy)
    w = mixed.weights
    if isinstance(game, GameMatrix):
        if mixed.player is Player.MIN:
            return w @ game.payoffs
        return game.payoffs @ w
    support = np.nonzero(w)[0]
    if mixed.player is Player.MIN:
        scores = np.zeros(game.cols)
        for i in support:
            scores += w[i] * game.row(int(i))
    else:
        scores = np.zeros(game.rows)
        for j in support:
            scores += w[j] * game.col(int(j))
    return scores


def best_response(game: Game, strategy: StrategyLike) -> BestResponse:
    """Opponent's optimal pure reply and its value; lowest index wins ties.

    Against a Min strategy this is the maximizing column (the strategy's
    exploitability); against a Max strategy, the minimizing row.
    """
    scores = _opponent_scores(game, strategy)
    player = _as_player(strategy.player)
    idx = int(np.argmax(scores)) if player is Player.MIN else int(np.argmin(scores))
    return BestResponse(idx, float(scores[idx]))


# ---------------------------------------------------------------------------
# File formats: JSON {"rows", "cols", "payoffs"} and bare CSV.

def game_to_json_dict(game: GameMatrix) -> dict:
    return {
        "rows": game.rows,
        "cols": game.cols,
        "payoffs": [[float(x) for x in row] for row in game.payoffs],
    }


def game_from_json_dict(data: dict) -> GameMatrix:
    if not isinstance(data, dict):
        raise InvalidGame("game JSON must be an object")
    try:
        rows, cols, payoffs = data["rows"], data["cols"], data["payoffs"]
    except KeyError as exc:
        raise InvalidGame(f"game JSON missing field {exc}")
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        raise InvalidGame("rows and cols must be positive integers")
    if not isinstance(payoffs, list) or len(payoffs) != rows:
        raise InvalidGame(f"expected {rows} payoff rows")
    for r in payoffs:
        if not isinstance(r, list) or len(r) != cols:
            raise InvalidGame("ragged or mis-sized payoff rows")
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise InvalidGame(f"non-numeric payoff entry {x!r}")
            if not math.isfinite(x):
                raise InvalidGame(f"non-finite payoff entry {x!r}")
    return GameMatrix(np.array(payoffs, dtype=np.float64))


def game_from_json(text: str) -> GameMatrix:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidGame(f"invalid JSON: {exc}")
    return game_from_json_dict(data)


def game_to_csv(game: GameMatrix) -> str:
    return "\n".join(",".join(repr(float(x)) for x in row) for row in game.payoffs) + "\n"


def game_from_csv(text: str) -> GameMatrix:
    rows: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        entries = []
        for cell in line.split(","):
            try:
                x = float(cell)
            except ValueError:
                raise InvalidGame(f"line {lineno}: non-numeric cell {cell.strip()!r}")
            if not math.isfinite(x):
                raise InvalidGame(f"line {lineno}: non-finite cell {cell.strip()!r}")
            entries.append(x)
        if rows and len(entries) != len(rows[0]):
            raise InvalidGame(f"line {lineno}: ragged row ({len(entries)} vs {len(rows[0])} cells)")
        rows.append(entries)
    if not rows:
        raise InvalidGame("CSV game is empty")
    return GameMatrix(np.array(rows, dtype=np.float64))


def load_game(path: str) -> GameMatrix:
    """Read a game from a ``.json`` or ``.csv`` file (sniffed by extension)."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if path.endswith(".csv"):
        return game_from_csv(text)
    return game_from_json(text)
