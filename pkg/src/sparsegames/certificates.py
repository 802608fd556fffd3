"""Verifiable value certificates: a claimed value plus one multiset per player.

A certificate claims ``v`` for a game and backs it with a small Min-side
multiset whose worst column averages at most ``v + (eps/2) * range`` and a
Max-side multiset whose worst row averages at least ``v - (eps/2) * range``.
When the checker accepts, the true value is within ``eps * range`` of the
claim regardless of how the certificate was produced: each side's average
payoff brackets the value from one direction.

Checking scans every opponent pure strategy exhaustively, costing
``(rows + cols) * k`` payoff evaluations; for oracle-backed games the
declared bounds travel inside the certificate, and any scanned payoff
outside them rejects the certificate outright.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGame, MalformedCertificate, SolverNotConverged
from .games import Game, GameMatrix, Player, UniformMultiset
from .solver import EXACT_CAP, solve_exact_small, solve_mwu
from .sparsify import (
    DEFAULT_MAX_ATTEMPTS,
    SparsifyParams,
    greedy_k_uniform,
    k_uniform_bound,
    sample_k_uniform,
)

REASON_ACCEPTED = "accepted"
REASON_MIN_FAILED = "min-check-failed"
REASON_MAX_FAILED = "max-check-failed"
REASON_BOTH_FAILED = "both-checks-failed"
REASON_BOUNDS_INCONSISTENT = "bounds-inconsistent"
REASON_BOUNDS_VIOLATED = "bounds-violated"


@dataclass(frozen=True)
class StrategyCertificate:
    claimed_value: float
    epsilon: float
    min_multiset: UniformMultiset
    max_multiset: UniformMultiset
    declared_bounds: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.declared_bounds
        if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
            raise MalformedCertificate("declared bounds must be finite with lo <= hi")
        object.__setattr__(self, "declared_bounds", (float(lo), float(hi)))
        if not (lo <= self.claimed_value <= hi):
            raise MalformedCertificate("claimed value must lie inside the declared bounds")
        if self.epsilon <= 0:
            raise MalformedCertificate("epsilon must be positive")
        if self.min_multiset.player is not Player.MIN or self.max_multiset.player is not Player.MAX:
            raise MalformedCertificate("multiset players must be Min then Max")

    def to_json_dict(self) -> dict:
        return {
            "value": self.claimed_value,
            "epsilon": self.epsilon,
            "bounds": [self.declared_bounds[0], self.declared_bounds[1]],
            "min_multiset": list(self.min_multiset.items),
            "max_multiset": list(self.max_multiset.items),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "StrategyCertificate":
        if not isinstance(data, dict):
            raise MalformedCertificate("certificate JSON must be an object")
        try:
            value = data["value"]
            epsilon = data["epsilon"]
            bounds = data["bounds"]
            min_items = data["min_multiset"]
            max_items = data["max_multiset"]
        except KeyError as exc:
            raise MalformedCertificate(f"certificate JSON missing field {exc}")
        if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
            raise MalformedCertificate("bounds must be a [lo, hi] pair")
        for items in (min_items, max_items):
            if not isinstance(items, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in items
            ):
                raise MalformedCertificate("multisets must be lists of integers")
        return cls(
            claimed_value=float(value),
            epsilon=float(epsilon),
            min_multiset=UniformMultiset(Player.MIN, tuple(min_items)),
            max_multiset=UniformMultiset(Player.MAX, tuple(max_items)),
            declared_bounds=(float(bounds[0]), float(bounds[1])),
        )

    @classmethod
    def from_json(cls, text: str) -> "StrategyCertificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedCertificate(f"invalid JSON: {exc}")
        return cls.from_json_dict(data)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    min_exploitability: float
    max_guarantee: float
    reason: str

    def to_json_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "min_exploitability": self.min_exploitability,
            "max_guarantee": self.max_guarantee,
            "reason": self.reason,
        }


def _multiset_averages(game: Game, multiset: UniformMultiset):
    """Multiset's average payoff against every opposing pure strategy.

    Returns ``(averages, scanned_lo, scanned_hi)`` where the extremes
    cover every payoff entry touched by the scan.
    """
    counts: dict[int, int] = {}
    for i in multiset.items:
        counts[i] = counts.get(i, 0) + 1
    against_min = multiset.player is Player.MIN
    n_opp = game.cols if against_min else game.rows
    total = np.zeros(n_opp)
    scanned_lo, scanned_hi = math.inf, -math.inf
    for i, mult in counts.items():
        if isinstance(game, GameMatrix):
            line = game.payoffs[i] if against_min else game.payoffs[:, i]
        else:
            line = game.row(i) if against_min else game.col(i)
        total += mult * line
        scanned_lo = min(scanned_lo, float(line.min()))
        scanned_hi = max(scanned_hi, float(line.max()))
    return total / multiset.k, scanned_lo, scanned_hi


def check_certificate(game: Game, cert: StrategyCertificate, size_cap_factor: int = 4) -> Verdict:
    """Validate a certificate against a game by exhaustive scanning.

    Accepts iff the Min multiset's worst column average is at most
    ``v + (eps/2) * (hi - lo)`` and the Max multiset's worst row average
    is at least ``v - (eps/2) * (hi - lo)`` (bounds as declared).
    Out-of-range multiset indices, or multisets larger than
    ``size_cap_factor * k_uniform_bound(opponent, eps/2)``, raise
    :class:`MalformedCertificate`; payoffs outside the declared bounds
    reject with a bounds reason.
    """
    if cert.min_multiset.items[-1] >= game.rows:
        raise MalformedCertificate(
            f"min multiset index {cert.min_multiset.items[-1]} out of range for {game.rows} rows"
        )
    if cert.max_multiset.items[-1] >= game.cols:
        raise MalformedCertificate(
            f"max multiset index {cert.max_multiset.items[-1]} out of range for {game.cols} cols"
        )
    for multiset, opponent in ((cert.min_multiset, game.cols), (cert.max_multiset, game.rows)):
        cap = size_cap_factor * k_uniform_bound(opponent, cert.epsilon / 2.0)
        if multiset.k > cap:
            raise MalformedCertificate(
                f"{multiset.player.value} multiset of size {multiset.k} exceeds the cap {cap}"
            )

    lo, hi = cert.declared_bounds
    col_avgs, min_scan_lo, min_scan_hi = _multiset_averages(game, cert.min_multiset)
    row_avgs, max_scan_lo, max_scan_hi = _multiset_averages(game, cert.max_multiset)
    a = float(col_avgs.max())
    b = float(row_avgs.min())

    if isinstance(game, GameMatrix):
        if game.range_lo < lo or game.range_hi > hi:
            return Verdict(False, a, b, REASON_BOUNDS_INCONSISTENT)
    elif min(min_scan_lo, max_scan_lo) < lo or max(min_scan_hi, max_scan_hi) > hi:
        # Oracles are trusted for their full range, but every payoff the
        # scan touches must respect the declared bounds.
        return Verdict(False, a, b, REASON_BOUNDS_VIOLATED)

    slack = 0.5 * cert.epsilon * (hi - lo)
    min_ok = a <= cert.claimed_value + slack
    max_ok = b >= cert.claimed_value - slack
    if min_ok and max_ok:
        return Verdict(True, a, b, REASON_ACCEPTED)
    if not min_ok and not max_ok:
        return Verdict(False, a, b, REASON_BOTH_FAILED)
    return Verdict(False, a, b, REASON_MIN_FAILED if not min_ok else REASON_MAX_FAILED)


def make_certificate(
    game: GameMatrix,
    epsilon: float,
    seed: int = 0,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> StrategyCertificate:
    """Solve, sample, and assemble a certificate the checker accepts.

    The solver runs exactly for small games and otherwise iteratively
    with gap ``eps * range / 4``; the claimed value is the bracket
    midpoint.  Each player's multiset is sampled with size
    ``k_uniform_bound(opponent, eps/4)`` and verified directly against
    the checker's inequality, falling back to the greedy construction
    (whose guarantee meets the inequality unconditionally) if sampling
    misses every attempt.
    """
    if epsilon <= 0:
        raise InvalidGame("epsilon must be positive")
    width = game.range_width
    bounds = (game.range_lo, game.range_hi)
    if width == 0.0:
        return StrategyCertificate(
            claimed_value=game.range_lo,
            epsilon=epsilon,
            min_multiset=UniformMultiset(Player.MIN, (0,)),
            max_multiset=UniformMultiset(Player.MAX, (0,)),
            declared_bounds=bounds,
        )

    if min(game.rows, game.cols) <= EXACT_CAP:
        result = solve_exact_small(game)
    else:
        result = solve_mwu(game, delta=epsilon * width / 4.0)
        if not result.converged:
            raise SolverNotConverged(
                f"duality gap {result.gap:.3g} above {epsilon * width / 4.0:.3g} "
                f"after {result.iterations} iterations"
            )
    claimed = result.value
    slack = 0.5 * epsilon * width

    multisets = {}
    for player, source, target in (
        (Player.MIN, result.p, claimed + slack),
        (Player.MAX, result.q, claimed - slack),
    ):
        sample_eps = min(1.0, epsilon / 4.0)
        k = k_uniform_bound(game.n_strategies(player.opponent), sample_eps)
        params = SparsifyParams(
            player=player, epsilon=sample_eps, k=k, seed=seed, max_attempts=max_attempts
        )
        sparse = sample_k_uniform(game, source, params, target=target)
        if not sparse.verified:
            sparse = greedy_k_uniform(game, k, player)
        multisets[player] = sparse.multiset

    return StrategyCertificate(
        claimed_value=claimed,
        epsilon=epsilon,
        min_multiset=multisets[Player.MIN],
        max_multiset=multisets[Player.MAX],
        declared_bounds=bounds,
    )
