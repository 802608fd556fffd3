"""Sparse near-optimal strategies: k-uniform multisets and dovetailing sets.

A k-uniform strategy plays uniformly from a multiset of k pure strategies;
for k around ``ln(opponent count) / (2 eps^2)`` a sampled multiset is
within ``eps * payoff range`` of the source strategy's guarantee.  A
dovetailing set hedges differently: its members are played "in parallel"
and scored by the best one against each opposing pure strategy.

Sampling constructions verify the bound they promise and redraw on
failure, so a returned result flagged ``verified`` is unconditionally
correct; ``verified=False`` means every attempt missed and the best
found multiset is reported.

Randomness: attempt ``a`` with seed ``s`` uses a numpy PCG64 generator
seeded with ``SeedSequence((s, a))`` and inverse-CDF draws, so results
are reproducible across platforms for a fixed numpy major version.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidGame, InvalidStrategy, UncoverableColumn
from .games import (
    Game,
    GameMatrix,
    MixedStrategy,
    Player,
    UniformMultiset,
    _as_player,
    best_response,
)
from .solver import SolveResult, solve

DEFAULT_MAX_ATTEMPTS = 20


def k_uniform_bound(opponent_count: int, epsilon: float) -> int:
    """Multiset size sufficient for slack ``epsilon``: ceil(ln(c) / 2 eps^2)."""
    if opponent_count < 1:
        raise InvalidGame("opponent_count must be at least 1")
    if epsilon <= 0:
        raise InvalidGame("epsilon must be positive")
    return max(1, math.ceil(math.log(opponent_count) / (2.0 * epsilon * epsilon)))


def dovetail_bound(opponent_count: int, epsilon: float) -> int:
    """Dovetailing set size sufficient for slack ``epsilon``: ceil(log_{1+eps} c)."""
    if opponent_count < 1:
        raise InvalidGame("opponent_count must be at least 1")
    if epsilon <= 0:
        raise InvalidGame("epsilon must be positive")
    return max(1, math.ceil(math.log(opponent_count) / math.log1p(epsilon)))


def slack_for_k(opponent_count: int, k: int) -> float:
    """Invert :func:`k_uniform_bound`: the slack a size-k multiset buys."""
    if k < 1:
        raise InvalidGame("k must be at least 1")
    return math.sqrt(math.log(opponent_count) / (2.0 * k)) if opponent_count > 1 else 0.0


def attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, attempt))))


def draw_indices(weights: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k i.i.d. index draws from a weight vector by inverse CDF."""
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    return np.searchsorted(cdf, rng.random(k), side="right").astype(np.intp)


@dataclass(frozen=True)
class SparsifyParams:
    """Knobs for :func:`sample_k_uniform`.

    ``epsilon`` is the target slack as a fraction of the payoff range;
    ``k`` defaults to :func:`k_uniform_bound` for the game at hand.
    """

    player: Player
    epsilon: float
    k: int | None = None
    seed: int = 0
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        object.__setattr__(self, "player", _as_player(self.player))
        if not (0.0 < self.epsilon <= 1.0):
            raise InvalidGame("epsilon must be in (0, 1]")
        if self.k is not None and self.k < 1:
            raise InvalidGame("k must be at least 1")
        if self.max_attempts < 1:
            raise InvalidGame("max_attempts must be at least 1")


@dataclass(frozen=True)
class SparseStrategy:
    """A k-uniform multiset with its measured guarantee.

    ``exploitability`` is the opponent's best response value against the
    multiset (for Max-side multisets it is the guaranteed payoff, i.e.
    larger is better).  ``verified`` records whether that value met
    ``target``.
    """

    multiset: UniformMultiset
    exploitability: float
    epsilon: float
    verified: bool
    attempts: int
    target: float | None = None

    @property
    def player(self) -> Player:
        return self.multiset.player

    @property
    def k(self) -> int:
        return self.multiset.k

    def to_json_dict(self) -> dict:
        return {
            "player": self.player.value,
            "items": list(self.multiset.items),
            "epsilon": self.epsilon,
            "verified": self.verified,
            "exploitability": self.exploitability,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SparseStrategy":
        """Parse the wire format (shared by multiset and dovetail results)."""
        return cls(
            multiset=UniformMultiset(data["player"], tuple(data["items"])),
            exploitability=float(data["exploitability"]),
            epsilon=float(data["epsilon"]),
            verified=bool(data["verified"]),
            attempts=0,
        )


def _meets(player: Player, value: float, target: float) -> bool:
    grace = 1e-12 * max(1.0, abs(target))
    if player is Player.MIN:
        return value <= target + grace
    return value >= target - grace


def sample_k_uniform(
    game: Game,
    source: MixedStrategy,
    params: SparsifyParams,
    target: float | None = None,
) -> SparseStrategy:
    """Draw k-uniform multisets from ``source`` until one verifies.

    The default target is the source's own guarantee (its best-response
    value) shifted by ``epsilon * payoff range`` in the opponent's favor;
    pass ``target`` to verify against an explicit threshold instead.
    Each attempt redraws with a derived seed; after ``max_attempts`` the
    best multiset found is returned flagged ``verified=False``.
    """
    player = params.player
    if _as_player(source.player) is not player:
        raise InvalidStrategy(f"source strategy belongs to {source.player}, expected {player}")
    n = game.n_strategies(player)
    if len(source) != n:
        raise DimensionMismatch(f"source has length {len(source)}, game needs {n}")

    k = params.k if params.k is not None else k_uniform_bound(
        game.n_strategies(player.opponent), params.epsilon
    )
    if target is None:
        guarantee = best_response(game, source).value
        shift = params.epsilon * game.range_width
        target = guarantee + shift if player is Player.MIN else guarantee - shift

    best: SparseStrategy | None = None
    for attempt in range(params.max_attempts):
        rng = attempt_rng(params.seed, attempt)
        items = draw_indices(source.weights, k, rng)
        multiset = UniformMultiset(player, tuple(int(i) for i in items))
        value = best_response(game, multiset).value
        candidate = SparseStrategy(
            multiset=multiset,
            exploitability=value,
            epsilon=params.epsilon,
            verified=_meets(player, value, target),
            attempts=attempt + 1,
            target=target,
        )
        if candidate.verified:
            return candidate
        if best is None or _meets(player, value, best.exploitability):
            best = candidate
    assert best is not None
    return SparseStrategy(
        multiset=best.multiset,
        exploitability=best.exploitability,
        epsilon=best.epsilon,
        verified=False,
        attempts=params.max_attempts,
        target=target,
    )


def greedy_k_uniform(game: GameMatrix, k: int, player: Player) -> SparseStrategy:
    """Build a k-uniform multiset deterministically, one element at a time.

    Each step adds the pure strategy minimizing the exponential potential
    sum_j exp(eta * cumulative payoff to j) over the opponent's pure
    strategies (with payoffs normalized to [0, 1] and eta chosen so the
    guarantee matches the sampling bound: exploitability at most
    v + sqrt(ln(c) / 2k) * range).  Mirrored for Max.
    """
    if not isinstance(game, GameMatrix):
        raise InvalidGame("greedy construction needs the full payoff matrix")
    if k < 1:
        raise InvalidGame("k must be at least 1")
    player = _as_player(player)
    if player is Player.MAX:
        flipped = greedy_k_uniform(GameMatrix(-game.payoffs.T), k, Player.MIN)
        multiset = UniformMultiset(Player.MAX, flipped.multiset.items)
        return SparseStrategy(
            multiset=multiset,
            exploitability=-flipped.exploitability,
            epsilon=flipped.epsilon,
            verified=True,
            attempts=1,
        )

    c = game.cols
    width = game.range_width
    A = (game.payoffs - game.range_lo) / width if width > 0 else np.zeros_like(game.payoffs)
    eta = math.sqrt(8.0 * math.log(c) / k) if c > 1 else 1.0
    cumulative = np.zeros(c)
    items: list[int] = []
    for _ in range(k):
        shifted = cumulative - cumulative.max()  # common offset; keeps exp() in range
        potentials = np.exp(eta * (shifted[None, :] + A)).sum(axis=1)
        i = int(np.argmin(potentials))
        items.append(i)
        cumulative += A[i]

    multiset = UniformMultiset(Player.MIN, tuple(items))
    value = best_response(game, multiset).value
    return SparseStrategy(
        multiset=multiset,
        exploitability=value,
        epsilon=slack_for_k(c, k),
        verified=True,
        attempts=1,
    )


# ---------------------------------------------------------------------------
# Dovetailing sets.

@dataclass(frozen=True)
class DovetailSet:
    """Distinct pure strategies played simultaneously (best one counts)."""

    player: Player
    items: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "player", _as_player(self.player))
        if len(self.items) < 1:
            raise InvalidStrategy("dovetailing set must be non-empty")
        items = tuple(sorted(int(i) for i in self.items))
        if items[0] < 0 or len(set(items)) != len(items):
            raise InvalidStrategy("dovetailing set needs distinct non-negative indices")
        object.__setattr__(self, "items", items)

    @property
    def k(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class DovetailResult:
    dovetail: DovetailSet
    achieved: float
    threshold: float
    epsilon: float
    verified: bool
    attempts: int
    method: str  # "sampled" | "greedy"
    size_bound: int
    within_bound: bool

    def to_json_dict(self) -> dict:
        return {
            "player": self.dovetail.player.value,
            "items": list(self.dovetail.items),
            "epsilon": self.epsilon,
            "verified": self.verified,
            "exploitability": self.achieved,
        }


def dovetail_exploitability(game: GameMatrix, s: DovetailSet) -> float:
    """Score of a dovetailing set against the opponent's worst case.

    For a Min set: max over columns of the set's best (minimum) payoff.
    For a Max set: min over rows of the set's best (maximum) payoff.
    """
    idx = np.asarray(s.items)
    if s.player is Player.MIN:
        if idx[-1] >= game.rows:
            raise DimensionMismatch("dovetailing set index out of range")
        return float(game.payoffs[idx, :].min(axis=0).max())
    if idx[-1] >= game.cols:
        raise DimensionMismatch("dovetailing set index out of range")
    return float(game.payoffs[:, idx].max(axis=1).min())


def _greedy_cover(game: GameMatrix, threshold: float, player: Player) -> DovetailSet:
    """Set-cover greedy: pick strategies hitting the threshold on the most
    still-uncovered opponent strategies; lowest index breaks ties."""
    if player is Player.MIN:
        eligible = game.payoffs <= threshold
    else:
        eligible = (game.payoffs >= threshold).T
    n_own, n_opp = eligible.shape
    uncovered = np.ones(n_opp, dtype=bool)
    chosen: list[int] = []
    while uncovered.any():
        gains = (eligible & uncovered[None, :]).sum(axis=1)
        i = int(np.argmax(gains))
        if gains[i] == 0:
            j = int(np.nonzero(uncovered)[0][0])
            raise UncoverableColumn(
                f"no candidate meets threshold {threshold} against opponent strategy {j}"
            )
        chosen.append(i)
        uncovered &= ~eligible[i]
    return DovetailSet(player, tuple(chosen))


def dovetail_set(
    game: GameMatrix,
    epsilon: float,
    player: Player,
    method: str = "sampled",
    seed: int = 0,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
    solution: SolveResult | None = None,
    target: float | None = None,
) -> DovetailResult:
    """Construct a dovetailing set good to within ``epsilon`` of the value.

    The threshold is ``v + eps * (v - lowest payoff)`` for Min (mirrored
    for Max), with ``v`` taken from ``solution`` or a fresh solve.

    ``sampled`` draws ``dovetail_bound`` indices from the optimal mixed
    strategy, de-duplicates, and retries until the measured score meets
    the threshold.  ``greedy`` runs set cover against the threshold; it
    always verifies but may exceed the size bound by a log factor, which
    ``within_bound`` records.
    """
    player = _as_player(player)
    if method not in ("sampled", "greedy"):
        raise InvalidGame(f"unknown dovetail method {method!r}")
    if epsilon <= 0:
        raise InvalidGame("epsilon must be positive")

    if solution is None:
        solution = solve(game, delta=max(epsilon * game.range_width / 8.0, 1e-9))
    v = solution.value
    if target is None:
        if player is Player.MIN:
            target = v + epsilon * (v - game.range_lo)
        else:
            target = v - epsilon * (game.range_hi - v)

    bound = dovetail_bound(game.n_strategies(player.opponent), epsilon)

    if method == "greedy":
        chosen = _greedy_cover(game, target, player)
        achieved = dovetail_exploitability(game, chosen)
        return DovetailResult(
            dovetail=chosen,
            achieved=achieved,
            threshold=target,
            epsilon=epsilon,
            verified=_meets(player, achieved, target),
            attempts=1,
            method=method,
            size_bound=bound,
            within_bound=chosen.k <= bound,
        )

    source = solution.p if player is Player.MIN else solution.q
    best: tuple[DovetailSet, float] | None = None
    for attempt in range(max_attempts):
        rng = attempt_rng(seed, attempt)
        drawn = draw_indices(source.weights, bound, rng)
        candidate = DovetailSet(player, tuple(int(i) for i in np.unique(drawn)))
        achieved = dovetail_exploitability(game, candidate)
        if _meets(player, achieved, target):
            return DovetailResult(
                dovetail=candidate,
                achieved=achieved,
                threshold=target,
                epsilon=epsilon,
                verified=True,
                attempts=attempt + 1,
                method=method,
                size_bound=bound,
                within_bound=candidate.k <= bound,
            )
        if best is None or _meets(player, achieved, best[1]):
            best = (candidate, achieved)
    assert best is not None
    return DovetailResult(
        dovetail=best[0],
        achieved=best[1],
        threshold=target,
        epsilon=epsilon,
        verified=False,
        attempts=max_attempts,
        method=method,
        size_bound=bound,
        within_bound=best[0].k <= bound,
    )
