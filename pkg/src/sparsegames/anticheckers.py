"""Program/input correctness games, anti-checkers, and hard distributions.

Inputs of bit-length ``n`` are identified with integers ``0 .. 2^n - 1``;
the text form of input ``j`` is its n-character big-endian bit string, so
bit 0 is the leftmost character.  A correctness game pits a finite
program family (rows, Min) against all n-bit inputs (columns, Max) with
payoff 1 exactly when the program misclassifies the input.

An anti-checker is a multiset of inputs on which *every* program in the
family errs on at least a ``1/2 - eps`` fraction (counting multiplicity).
Construction samples from the optimal input distribution of the
correctness game and verifies by exhaustive enumeration over the family,
falling back to the greedy multiset construction; the recorded
``verified_min_error`` is always the true recount, never the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidGame,
    NoHittingSet,
    OracleBudgetExceeded,
    UnverifiedAntiChecker,
    ValueBelowThreshold,
)
from .games import GameMatrix, PayoffOracle, Player
from .solver import solve
from .sparsify import (
    DEFAULT_MAX_ATTEMPTS,
    DovetailResult,
    attempt_rng,
    draw_indices,
    dovetail_set,
    greedy_k_uniform,
    k_uniform_bound,
)

MAX_INPUT_BITS = 20
ENUMERATION_BUDGET = 1 << 24


def input_bits(n: int) -> np.ndarray:
    """(2^n, n) boolean matrix; row j holds input j's bits, bit 0 first."""
    inputs = np.arange(1 << n)
    shifts = np.arange(n - 1, -1, -1)
    return ((inputs[:, None] >> shifts[None, :]) & 1).astype(bool)


def input_to_text(j: int, n: int) -> str:
    return format(j, f"0{n}b")


def text_to_input(s: str) -> int:
    if not s or any(ch not in "01" for ch in s):
        raise InvalidGame(f"bit string must be non-empty 0/1 text, got {s!r}")
    return int(s, 2)


@dataclass(frozen=True, eq=False)
class Language:
    """Membership predicate over all n-bit inputs."""

    name: str
    n: int
    member: Callable[[int], bool]

    def __post_init__(self):
        if not (1 <= self.n <= MAX_INPUT_BITS):
            raise InvalidGame(f"input length must be in [1, {MAX_INPUT_BITS}]")

    def truth_table(self) -> np.ndarray:
        return np.array([bool(self.member(j)) for j in range(1 << self.n)])

    @classmethod
    def from_truth_table(cls, name: str, n: int, table: Sequence[bool]) -> "Language":
        tbl = np.array([bool(b) for b in table])
        if tbl.size != 1 << n:
            raise InvalidGame(f"truth table has {tbl.size} entries, expected {1 << n}")
        return cls(name, n, lambda j, _t=tbl: bool(_t[j]))

    def to_truth_table_text(self) -> str:
        return "".join("1" if b else "0" for b in self.truth_table())

    @classmethod
    def from_truth_table_text(cls, name: str, text: str) -> "Language":
        text = text.strip()
        size = len(text)
        n = size.bit_length() - 1
        if size == 0 or (1 << n) != size:
            raise InvalidGame(f"truth table length {size} is not a power of two")
        return cls.from_truth_table(name, n, [ch == "1" for ch in text])


@dataclass(frozen=True, eq=False)
class Program:
    """One classifier with a declared size and optional per-input step cost."""

    name: str
    size: int
    classify: Callable[[int], bool]
    cost: Callable[[int], int] | None = None

    def __post_init__(self):
        if self.size < 1:
            raise InvalidGame(f"program {self.name!r} must have positive size")


@dataclass(frozen=True, eq=False)
class ProgramFamily:
    name: str
    n: int
    programs: tuple[Program, ...]

    def __post_init__(self):
        if not self.programs:
            raise InvalidGame("program family must be non-empty")
        if not (1 <= self.n <= MAX_INPUT_BITS):
            raise InvalidGame(f"input length must be in [1, {MAX_INPUT_BITS}]")

    def __len__(self) -> int:
        return len(self.programs)

    def classification_table(self) -> np.ndarray:
        """(programs, 2^n) boolean matrix of outputs."""
        return np.array(
            [[bool(p.classify(j)) for j in range(1 << self.n)] for p in self.programs]
        )

    def cost_table(self) -> np.ndarray:
        """(programs, 2^n) step costs; errors if any program lacks a cost."""
        rows = []
        for p in self.programs:
            if p.cost is None:
                raise InvalidGame(f"program {p.name!r} has no cost function")
            rows.append([int(p.cost(j)) for j in range(1 << self.n)])
        costs = np.array(rows, dtype=np.int64)
        if (costs < 0).any():
            raise InvalidGame("step costs must be non-negative")
        return costs


def correctness_game(lang: Language, fam: ProgramFamily) -> PayoffOracle:
    """0/1 oracle over (program, input): payoff 1 iff the program errs."""
    if lang.n != fam.n:
        raise DimensionMismatch(
            f"language works on {lang.n}-bit inputs, family on {fam.n}-bit inputs"
        )
    members = lang.truth_table()
    outputs = fam.classification_table()
    err = (outputs != members[None, :]).astype(np.float64)
    err.setflags(write=False)
    return PayoffOracle(
        rows=len(fam),
        cols=1 << lang.n,
        bounds=(0.0, 1.0),
        evaluate=lambda i, j: float(err[i, j]),
        row_values=lambda i: err[i],
        col_values=lambda j: err[:, j],
    )


@dataclass(frozen=True)
class AntiChecker:
    """Input multiset on which every program in a family errs near-half."""

    language: str
    family: str
    n: int
    items: tuple[int, ...]  # input indices, sorted, multiplicity allowed
    epsilon: float
    verified_min_error: float
    value_gap: float | None = None  # 1/2 minus the correctness game value

    def __post_init__(self):
        if not self.items:
            raise InvalidGame("anti-checker multiset must be non-empty")
        object.__setattr__(self, "items", tuple(sorted(int(i) for i in self.items)))
        if not (0.0 < self.epsilon < 0.5):
            raise InvalidGame("epsilon must be in (0, 1/2)")
        if self.items[0] < 0 or self.items[-1] >= (1 << self.n):
            raise InvalidGame("anti-checker items out of input range")

    @property
    def guaranteed_error(self) -> float:
        return 0.5 - self.epsilon

    @property
    def verified(self) -> bool:
        return self.verified_min_error >= self.guaranteed_error

    @property
    def k(self) -> int:
        return len(self.items)

    def item_texts(self) -> list[str]:
        return [input_to_text(j, self.n) for j in self.items]

    def to_json_dict(self) -> dict:
        return {
            "language": self.language,
            "family": self.family,
            "n": self.n,
            "epsilon": self.epsilon,
            "items": self.item_texts(),
            "verified_min_error": self.verified_min_error,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "AntiChecker":
        items = tuple(text_to_input(s) for s in data["items"])
        return cls(
            language=str(data["language"]),
            family=str(data["family"]),
            n=int(data["n"]),
            items=items,
            epsilon=float(data["epsilon"]),
            verified_min_error=float(data["verified_min_error"]),
        )


@dataclass(frozen=True)
class HardDistribution:
    """Uniform distribution over an anti-checker multiset."""

    anti_checker: AntiChecker

    def probabilities(self) -> dict[int, float]:
        k = self.anti_checker.k
        probs: dict[int, float] = {}
        for j in self.anti_checker.items:
            probs[j] = probs.get(j, 0.0) + 1.0 / k
        return probs


def _min_error_fraction(err: np.ndarray, items: Sequence[int]) -> float:
    """Smallest per-program error fraction on a multiset, by full recount."""
    idx = np.asarray(items, dtype=np.intp)
    return float(err[:, idx].mean(axis=1).min())


def build_anti_checker(
    lang: Language,
    fam: ProgramFamily,
    epsilon: float,
    seed: int = 0,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> AntiChecker:
    """Construct and verify an anti-checker for ``lang`` against ``fam``.

    Solves the correctness game, checks that its value supports error
    ``1/2 - eps`` at all (else raises :class:`ValueBelowThreshold` with
    the value), samples a multiset of ``k_uniform_bound(|family|, slack)``
    inputs from the optimal input distribution with
    ``slack = max(eps - (1/2 - v), eps/2)``, and verifies by exhaustively
    recounting every program's errors.  Falls back to the greedy multiset
    construction before giving up; an unverified multiset is still
    returned with its true ``verified_min_error``.
    """
    if not (0.0 < epsilon < 0.5):
        raise InvalidGame("epsilon must be in (0, 1/2)")
    if len(fam) * (1 << fam.n) > ENUMERATION_BUDGET:
        raise OracleBudgetExceeded(
            f"family x inputs needs {len(fam) * (1 << fam.n)} evaluations"
        )
    oracle = correctness_game(lang, fam)
    game = oracle.materialize()
    err = game.payoffs

    result = solve(game, delta=min(epsilon / 8.0, 0.01))
    if result.value_hi < 0.5 - epsilon:
        raise ValueBelowThreshold(
            f"correctness game value {result.value:.6g} is below 1/2 - epsilon = "
            f"{0.5 - epsilon:.6g}: some program is too accurate",
            value=result.value,
        )
    value_gap = max(0.0, 0.5 - result.value)
    slack = max(epsilon - value_gap, epsilon / 2.0)
    k = k_uniform_bound(len(fam), slack)
    floor = 0.5 - epsilon

    best_items: tuple[int, ...] | None = None
    best_error = -math.inf
    for attempt in range(max_attempts):
        rng = attempt_rng(seed, attempt)
        items = tuple(int(j) for j in draw_indices(result.q.weights, k, rng))
        min_err = _min_error_fraction(err, items)
        if min_err >= floor:
            return AntiChecker(lang.name, fam.name, lang.n, items, epsilon, min_err, value_gap)
        if min_err > best_error:
            best_items, best_error = items, min_err

    greedy = greedy_k_uniform(game, k, Player.MAX)
    items = greedy.multiset.items
    min_err = _min_error_fraction(err, items)
    if min_err >= floor or min_err > best_error:
        best_items, best_error = items, min_err
    assert best_items is not None
    return AntiChecker(lang.name, fam.name, lang.n, best_items, epsilon, best_error, value_gap)


def family_complexity(
    lang: Language, fam: ProgramFamily, time_budget: int | None = None
) -> int | None:
    """Smallest declared size of a program deciding ``lang`` on every input.

    With ``time_budget`` set, only programs whose step cost stays within
    the budget on every input count.  Returns ``None`` when no program
    qualifies.
    """
    if lang.n != fam.n:
        raise DimensionMismatch("language and family input lengths differ")
    members = lang.truth_table()
    best: int | None = None
    for p in fam.programs:
        outputs = np.array([bool(p.classify(j)) for j in range(1 << fam.n)])
        if not np.array_equal(outputs, members):
            continue
        if time_budget is not None:
            if p.cost is None:
                continue
            if any(p.cost(j) > time_budget for j in range(1 << fam.n)):
                continue
        if best is None or p.size < best:
            best = p.size
    return best


def sample_hard(ac: AntiChecker, seed: int = 0, count: int = 1) -> list[str]:
    """Deterministic i.i.d. draws from the hard distribution, as bit strings."""
    if not ac.verified:
        raise UnverifiedAntiChecker(
            "anti-checker failed verification; refusing to sample from it"
        )
    if count < 1:
        raise InvalidGame("count must be at least 1")
    rng = attempt_rng(seed, 0)
    picks = rng.integers(0, ac.k, size=count)
    return [input_to_text(ac.items[int(t)], ac.n) for t in picks]


def threshold_game(fam: ProgramFamily, t: int) -> PayoffOracle:
    """0/1 oracle: payoff 1 iff the program's step cost exceeds ``t``."""
    costs = fam.cost_table()
    over = (costs > t).astype(np.float64)
    over.setflags(write=False)
    return PayoffOracle(
        rows=over.shape[0],
        cols=over.shape[1],
        bounds=(0.0, 1.0),
        evaluate=lambda i, j: float(over[i, j]),
        row_values=lambda i: over[i],
        col_values=lambda j: over[:, j],
    )


def _threshold_matrix(source, t: int) -> tuple[GameMatrix, list[str]]:
    if isinstance(source, ProgramFamily):
        costs = source.cost_table()
        names = [p.name for p in source.programs]
    else:
        costs = np.asarray(source)
        if costs.ndim != 2 or costs.size == 0:
            raise InvalidGame("cost matrix must be 2-D and non-empty")
        names = [f"program-{i}" for i in range(costs.shape[0])]
    return GameMatrix((costs > t).astype(np.float64)), names


def dovetail_anti_checker(
    source,
    t: int,
    epsilon: float,
    method: str = "sampled",
    seed: int = 0,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> DovetailResult:
    """Small input set forcing every program over the step budget ``t``.

    ``source`` is a :class:`ProgramFamily` with costs or a raw cost
    matrix (programs x inputs).  Sampled construction draws
    ``dovetail_bound(|programs|, eps)`` inputs from the hardest input
    distribution of the threshold game and retries until the set hits
    every program; greedy hitting-set is the fallback, so the returned
    set always verifies.  A program that never exceeds ``t`` raises
    :class:`NoHittingSet` naming it.
    """
    game, names = _threshold_matrix(source, t)
    over = game.payoffs
    never_over = np.nonzero(~over.any(axis=1))[0]
    if never_over.size:
        culprit = names[int(never_over[0])]
        raise NoHittingSet(
            f"program {culprit!r} runs within {t} steps on every input; no such set exists",
            program=culprit,
        )

    # The set certifies only if its best member exceeds t for every
    # program, i.e. the dovetail score over {0,1} payoffs reaches 1.
    hitting_target = 1.0 - 1e-9
    if method == "sampled":
        result = dovetail_set(
            game,
            epsilon,
            Player.MAX,
            method="sampled",
            seed=seed,
            max_attempts=max_attempts,
            target=hitting_target,
        )
        if result.verified:
            return result
    elif method != "greedy":
        raise InvalidGame(f"unknown dovetail method {method!r}")
    return dovetail_set(
        game, epsilon, Player.MAX, method="greedy", target=hitting_target
    )
