"""Game value solvers: exact support enumeration and multiplicative weights.

``solve_exact_small`` equalizes square support pairs and is exact up to
linear-algebra roundoff; it is meant for games whose smaller dimension is
tiny.  ``solve_mwu`` runs a deterministic multiplicative-weights loop for
Min against a best-responding Max and returns a certified value bracket.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import InvalidGame, SolverCapExceeded
from .games import GameMatrix, MixedStrategy, Player

EXACT_CAP = 16

_CHUNK = 1 << 16


@dataclass(frozen=True)
class SolveResult:
    """Value bracket plus the strategies that certify it."""

    value_lo: float
    value_hi: float
    p: MixedStrategy
    q: MixedStrategy
    iterations: int
    method: str  # "exact" | "mwu"
    converged: bool = True

    @property
    def value(self) -> float:
        return 0.5 * (self.value_lo + self.value_hi)

    @property
    def gap(self) -> float:
        return self.value_hi - self.value_lo

    def to_json_dict(self) -> dict:
        return {
            "value_lo": self.value_lo,
            "value_hi": self.value_hi,
            "p": [float(x) for x in self.p.weights],
            "q": [float(x) for x in self.q.weights],
            "iterations": self.iterations,
            "method": self.method,
            "converged": self.converged,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "SolveResult":
        return cls(
            value_lo=float(data["value_lo"]),
            value_hi=float(data["value_hi"]),
            p=MixedStrategy(Player.MIN, np.asarray(data["p"], dtype=np.float64)),
            q=MixedStrategy(Player.MAX, np.asarray(data["q"], dtype=np.float64)),
            iterations=int(data["iterations"]),
            method=str(data["method"]),
            converged=bool(data["converged"]),
        )


def _constant_result(game: GameMatrix, method: str) -> SolveResult:
    v = game.range_lo
    return SolveResult(
        value_lo=v,
        value_hi=v,
        p=MixedStrategy.point_mass(Player.MIN, 0, game.rows),
        q=MixedStrategy.point_mass(Player.MAX, 0, game.cols),
        iterations=1,
        method=method,
    )


def _clip_normalize(w: np.ndarray) -> np.ndarray:
    w = np.where(w > 0.0, w, 0.0)
    return w / w.sum()


def _bordered(blocks: np.ndarray, transpose: bool) -> np.ndarray:
    """Stack equalization systems [[B or B^T, -1], [1, 0]] for each block."""
    n, m, _ = blocks.shape
    systems = np.zeros((n, m + 1, m + 1))
    systems[:, :m, :m] = np.swapaxes(blocks, 1, 2) if transpose else blocks
    systems[:, :m, m] = -1.0
    systems[:, m, :m] = 1.0
    return systems


def _solve_stacked(systems: np.ndarray, rhs: np.ndarray, scale: float):
    """Solve each system, discarding singular and ill-conditioned ones.

    Returns (solutions, keep mask).  Solutions of discarded systems are
    left as NaN so downstream comparisons reject them.
    """
    n, dim, _ = systems.shape
    det = np.linalg.det(systems)
    solvable = np.isfinite(det) & (det != 0.0)
    out = np.full((n, dim), np.nan)
    if solvable.any():
        idx = np.nonzero(solvable)[0]
        stacked_rhs = np.broadcast_to(rhs[:, None], (idx.size, dim, 1))
        sols = np.linalg.solve(systems[idx], stacked_rhs)[:, :, 0]
        residual = np.abs(np.einsum("nij,nj->ni", systems[idx], sols) - rhs).max(axis=1)
        good = np.isfinite(sols).all(axis=1) & (residual <= 1e-7 * max(scale, 1.0))
        out[idx[good]] = sols[good]
        solvable[:] = False
        solvable[idx[good]] = True
    return out, solvable


def _try_support_pairs(M: np.ndarray, I: np.ndarray, J: np.ndarray, dev_tol: float, scale: float):
    """Check the equal-size support pairs (I[t], J[t]) in order.

    Returns the first (p, q, v) passing non-negativity and the
    no-profitable-deviation test against the full matrix, else None.
    """
    r, c = M.shape
    _, m = I.shape
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    blocks = M[I[:, :, None], J[:, None, :]]

    xp, ok_p = _solve_stacked(_bordered(blocks, transpose=True), rhs, scale)
    p_cand, v_cand = xp[:, :m], xp[:, m]
    ok_p &= (p_cand >= -1e-9).all(axis=1)
    if not ok_p.any():
        return None

    live = np.nonzero(ok_p)[0]
    # Full-game deviation check for Min: every column payoff <= v.
    full_p = np.zeros((live.size, r))
    np.put_along_axis(full_p, I[live], np.clip(p_cand[live], 0.0, None), axis=1)
    ok_dev = (full_p @ M).max(axis=1) <= v_cand[live] + dev_tol
    live, full_p = live[ok_dev], full_p[ok_dev]
    if live.size == 0:
        return None

    xq, ok_q = _solve_stacked(_bordered(blocks[live], transpose=False), rhs, scale)
    q_cand, vq_cand = xq[:, :m], xq[:, m]
    ok_q &= (q_cand >= -1e-9).all(axis=1)
    ok_q &= np.abs(vq_cand - v_cand[live]) <= dev_tol
    if not ok_q.any():
        return None

    sub = np.nonzero(ok_q)[0]
    full_q = np.zeros((sub.size, c))
    np.put_along_axis(full_q, J[live[sub]], np.clip(q_cand[sub], 0.0, None), axis=1)
    # Full-game deviation check for Max: every row payoff >= v.
    ok_dev_q = (full_q @ M.T).min(axis=1) >= vq_cand[sub] - dev_tol
    if not ok_dev_q.any():
        return None

    first = int(np.nonzero(ok_dev_q)[0][0])  # candidates stayed in enumeration order
    pos = int(sub[first])
    return (
        _clip_normalize(full_p[pos]),
        _clip_normalize(full_q[first]),
        float(v_cand[live[pos]]),
    )


def solve_exact_small(game: GameMatrix, cap: int = EXACT_CAP) -> SolveResult:
    """Exact value and optimal strategies by square-support enumeration.

    Support pairs are scanned in increasing size, then lexicographically,
    and the first pair whose equalization system yields feasible,
    deviation-free strategies is returned.  Requires ``min(rows, cols)``
    at most ``cap``; cost grows combinatorially with the smaller
    dimension, so keep it small.
    """
    r, c = game.rows, game.cols
    if min(r, c) > cap:
        raise SolverCapExceeded(
            f"min dimension {min(r, c)} exceeds the exact cap {cap}; use solve_mwu"
        )
    if game.range_lo == game.range_hi:
        return _constant_result(game, "exact")

    M = game.payoffs
    scale = max(1.0, abs(game.range_lo), abs(game.range_hi))
    iterations = 0
    for dev_tol in (1e-9 * scale, 1e-7 * scale):  # second pass guards degenerate borderline games
        for m in range(1, min(r, c) + 1):
            rows_c = np.array(list(combinations(range(r), m)), dtype=np.intp)
            cols_c = np.array(list(combinations(range(c), m)), dtype=np.intp)
            total = rows_c.shape[0] * cols_c.shape[0]
            for start in range(0, total, _CHUNK):
                span = np.arange(start, min(start + _CHUNK, total))
                iterations += span.size
                I = rows_c[span // cols_c.shape[0]]
                J = cols_c[span % cols_c.shape[0]]
                hit = _try_support_pairs(M, I, J, dev_tol, scale)
                if hit is not None:
                    p, q, v = hit
                    return SolveResult(
                        value_lo=v,
                        value_hi=v,
                        p=MixedStrategy(Player.MIN, p),
                        q=MixedStrategy(Player.MAX, q),
                        iterations=iterations,
                        method="exact",
                    )
    raise InvalidGame("support enumeration found no feasible equilibrium (numerical breakdown)")


def default_mwu_iterations(rows: int, delta_normalized: float) -> int:
    """Iteration budget that certifies a gap below the normalized target."""
    log_r = math.log(rows) if rows > 1 else 0.0
    return max(1, math.ceil(2.0 * log_r / (delta_normalized * delta_normalized)))


def solve_mwu(game: GameMatrix, delta: float, max_iters: int | None = None) -> SolveResult:
    """Multiplicative weights for Min against a best-responding Max.

    Maintains running average strategies; the returned bracket is the best
    upper bound from any averaged Min strategy and the best lower bound
    from any averaged Max strategy seen at a checkpoint.  Stops once the
    bracket width is at most ``delta`` (payoff units) or after
    ``max_iters`` rounds, in which case the result is flagged
    ``converged=False`` and the bracket is still valid.
    """
    if delta <= 0:
        raise InvalidGame("delta must be positive")
    if max_iters is not None and max_iters < 1:
        raise InvalidGame("max_iters must be at least 1")
    r, c = game.rows, game.cols
    lo, scale = game.range_lo, game.range_width
    if scale == 0.0:
        return _constant_result(game, "mwu")

    A = (game.payoffs - lo) / scale
    delta_n = delta / scale
    T = max_iters if max_iters is not None else default_mwu_iterations(r, delta_n)
    eta = math.sqrt((math.log(r) if r > 1 else 0.0) / T)
    # Per-column update factors; one exp() of the whole matrix up front.
    factors = np.exp(-eta * A) if A.size <= (1 << 22) else None

    w = np.full(r, 1.0 / r)
    p_sum = np.zeros(r)
    q_counts = np.zeros(c)
    ub_best, lb_best = math.inf, -math.inf
    p_best = np.full(r, 1.0 / r)
    q_best = np.full(c, 1.0 / c)
    check_every = max(1, min(1024, T // 128)) if T > 1 else 1

    t = 0
    while t < T:
        t += 1
        p = w / w.sum()
        scores = p @ A
        j = int(np.argmax(scores))
        w = p * (factors[:, j] if factors is not None else np.exp(-eta * A[:, j]))
        p_sum += p
        q_counts[j] += 1.0
        if t % check_every == 0 or t == T:
            p_bar = p_sum / t
            q_bar = q_counts / t
            ub = float((p_bar @ A).max())
            lb = float((A @ q_bar).min())
            if ub < ub_best:
                ub_best, p_best = ub, p_bar
            if lb > lb_best:
                lb_best, q_best = lb, q_bar
            if ub_best - lb_best <= delta_n:
                break

    converged = (ub_best - lb_best) <= delta_n
    return SolveResult(
        value_lo=lo + scale * lb_best,
        value_hi=lo + scale * ub_best,
        p=MixedStrategy(Player.MIN, p_best),
        q=MixedStrategy(Player.MAX, q_best),
        iterations=t,
        method="mwu",
        converged=converged,
    )


# Upper bound on support pairs the auto dispatcher will enumerate; the
# total over all sizes is comb(r + c, min(r, c)).
_AUTO_PAIR_BUDGET = 6_000_000


def solve(
    game: GameMatrix,
    delta: float = 1e-3,
    cap: int = EXACT_CAP,
    max_iters: int | None = None,
    method: str = "auto",
) -> SolveResult:
    """Dispatch to the exact solver when enumeration is tractable, else MWU."""
    if method not in ("auto", "exact", "mwu"):
        raise InvalidGame(f"unknown solve method {method!r}")
    if method == "exact":
        return solve_exact_small(game, cap=cap)
    if method == "auto":
        r, c = game.rows, game.cols
        if min(r, c) <= cap and math.comb(r + c, min(r, c)) <= _AUTO_PAIR_BUDGET:
            return solve_exact_small(game, cap=cap)
    return solve_mwu(game, delta=delta, max_iters=max_iters)
