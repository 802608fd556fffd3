"""Built-in languages, program families, and games used by tests and the CLI.

Size accounting for built-in programs (a fixed convention, declared with
each program so alternative accountings can be plugged in): constants
cost 1, a positive literal 2, a negated literal 3, a two-literal
conjunction or disjunction 1 plus its literal sizes, and a junta over k
coordinates 2k plus its 2^k-entry table.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .anticheckers import Language, Program, ProgramFamily, input_bits
from .errors import InvalidGame
from .games import GameMatrix


# ---------------------------------------------------------------------------
# Languages.

def parity_language(n: int) -> Language:
    bits = input_bits(n)
    table = bits.sum(axis=1) % 2 == 1
    return Language.from_truth_table(f"parity-{n}", n, table)


def majority_language(n: int) -> Language:
    bits = input_bits(n)
    table = bits.sum(axis=1) * 2 > n  # strict majority of ones
    return Language.from_truth_table(f"majority-{n}", n, table)


def dictator_language(i: int, n: int) -> Language:
    if not 0 <= i < n:
        raise InvalidGame(f"dictator bit {i} out of range for n={n}")
    bits = input_bits(n)
    return Language.from_truth_table(f"dictator-{i}-{n}", n, bits[:, i])


def constant_language(bit: int, n: int) -> Language:
    table = np.full(1 << n, bool(bit))
    return Language.from_truth_table(f"const{int(bool(bit))}-{n}", n, table)


def random_language(n: int, seed: int = 0) -> Language:
    """Truth table drawn uniformly at random; a stand-in for a hard language."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed,))))
    table = rng.integers(0, 2, size=1 << n).astype(bool)
    return Language.from_truth_table(f"random-{n}-seed{seed}", n, table)


LANGUAGES = {
    "parity": parity_language,
    "majority": majority_language,
    "const0": lambda n: constant_language(0, n),
    "const1": lambda n: constant_language(1, n),
}


def builtin_language(name: str, n: int, seed: int = 0) -> Language:
    if name in LANGUAGES:
        return LANGUAGES[name](n)
    if name == "random":
        return random_language(n, seed)
    if name.startswith("dictator"):
        parts = name.split("-")
        bit = int(parts[1]) if len(parts) > 1 else 0
        return dictator_language(bit, n)
    raise InvalidGame(f"unknown language {name!r}")


# ---------------------------------------------------------------------------
# Program families.

def _table_program(name: str, size: int, table: np.ndarray, cost=None) -> Program:
    return Program(name, size, lambda j, _t=table: bool(_t[j]), cost)


def constants_family(n: int) -> ProgramFamily:
    zero = np.zeros(1 << n, dtype=bool)
    one = np.ones(1 << n, dtype=bool)
    return ProgramFamily(
        "constants",
        n,
        (_table_program("const0", 1, zero), _table_program("const1", 1, one)),
    )


def dictators_family(n: int) -> ProgramFamily:
    """Constants, dictators, and anti-dictators: 2 + 2n programs."""
    bits = input_bits(n)
    programs = [
        _table_program("const0", 1, np.zeros(1 << n, dtype=bool)),
        _table_program("const1", 1, np.ones(1 << n, dtype=bool)),
    ]
    for i in range(n):
        programs.append(_table_program(f"x{i}", 2, bits[:, i]))
        programs.append(_table_program(f"!x{i}", 3, ~bits[:, i]))
    return ProgramFamily("dictators", n, tuple(programs))


def two_literal_family(n: int) -> ProgramFamily:
    """All literals plus two-literal conjunctions and disjunctions."""
    bits = input_bits(n)
    programs: list[Program] = []
    literals = []
    for i in range(n):
        literals.append((f"x{i}", 2, bits[:, i]))
        literals.append((f"!x{i}", 3, ~bits[:, i]))
    for name, size, table in literals:
        programs.append(_table_program(name, size, table))
    for (i, j) in combinations(range(n), 2):
        for (na, sa, ta) in literals[2 * i : 2 * i + 2]:
            for (nb, sb, tb) in literals[2 * j : 2 * j + 2]:
                programs.append(_table_program(f"{na}&{nb}", 1 + sa + sb, ta & tb))
                programs.append(_table_program(f"{na}|{nb}", 1 + sa + sb, ta | tb))
    return ProgramFamily("two-literal", n, tuple(programs))


def junta_family(n: int, k: int) -> ProgramFamily:
    """Every function of at most ``k`` fixed coordinates, deduplicated.

    Truth-table enumeration: 2^(2^k) tables per coordinate set, so keep
    ``k`` at most 3.
    """
    if not 1 <= k <= 3:
        raise InvalidGame("junta arity must be between 1 and 3")
    if k > n:
        raise InvalidGame("junta arity exceeds input length")
    bits = input_bits(n)
    seen: set[bytes] = set()
    programs: list[Program] = []
    for coords in combinations(range(n), k):
        # Index of each input restricted to the chosen coordinates.
        local = np.zeros(1 << n, dtype=np.int64)
        for pos, i in enumerate(coords):
            local = (local << 1) | bits[:, i].astype(np.int64)
        for table_bits in range(1 << (1 << k)):
            table = np.array(
                [(table_bits >> v) & 1 == 1 for v in range(1 << k)], dtype=bool
            )[local]
            key = table.tobytes()
            if key in seen:
                continue
            seen.add(key)
            name = f"junta{''.join(str(i) for i in coords)}-{table_bits:0{1 << k}b}"
            programs.append(_table_program(name, 2 * k + (1 << k), table))
    return ProgramFamily(f"junta{k}", n, tuple(programs))


FAMILIES = {
    "constants": constants_family,
    "dictators": dictators_family,
    "two-literal": two_literal_family,
    "junta1": lambda n: junta_family(n, 1),
    "junta2": lambda n: junta_family(n, 2),
    "junta3": lambda n: junta_family(n, 3),
}


def builtin_family(name: str, n: int) -> ProgramFamily:
    try:
        return FAMILIES[name](n)
    except KeyError:
        raise InvalidGame(f"unknown family {name!r}")


def family_with_cost_matrix(costs, name: str = "cost-family") -> ProgramFamily:
    """Generic programs carrying per-input step costs from a matrix.

    Inputs are the matrix columns, so the column count must be a power
    of two; classification is the all-zero function (irrelevant for
    threshold games).
    """
    costs = np.asarray(costs)
    if costs.ndim != 2 or costs.size == 0:
        raise InvalidGame("cost matrix must be 2-D and non-empty")
    n_inputs = costs.shape[1]
    n = n_inputs.bit_length() - 1
    if (1 << n) != n_inputs:
        raise InvalidGame(f"cost matrix needs a power-of-two column count, got {n_inputs}")
    programs = tuple(
        Program(
            f"program-{i}",
            1,
            lambda j: False,
            cost=lambda j, _row=costs[i]: int(_row[j]),
        )
        for i in range(costs.shape[0])
    )
    return ProgramFamily(name, n, programs)


# ---------------------------------------------------------------------------
# Games.

COST_FIXTURE = ((2, 9, 3, 1), (8, 2, 2, 9), (3, 3, 9, 2))


def matching_pennies() -> GameMatrix:
    return GameMatrix([[1.0, -1.0], [-1.0, 1.0]])


def rock_paper_scissors() -> GameMatrix:
    return GameMatrix([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


def random_game(rows: int, cols: int, seed: int = 0) -> GameMatrix:
    """Uniform [0, 1) payoffs from a seeded generator."""
    if rows < 1 or cols < 1:
        raise InvalidGame("game dimensions must be positive")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed,))))
    return GameMatrix(rng.random((rows, cols)))


def cost_fixture_game() -> GameMatrix:
    return GameMatrix(np.array(COST_FIXTURE, dtype=np.float64))


def builtin_game(name: str, rows: int = 2, cols: int = 2, seed: int = 0) -> GameMatrix:
    if name == "matching-pennies":
        return matching_pennies()
    if name == "rps":
        return rock_paper_scissors()
    if name == "random":
        return random_game(rows, cols, seed)
    if name == "cost-fixture":
        return cost_fixture_game()
    raise InvalidGame(f"unknown game {name!r}")
