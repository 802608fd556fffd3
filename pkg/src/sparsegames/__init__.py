"""Zero-sum matrix game toolkit.

Computes game values with certified brackets, builds provably
near-optimal sparse (k-uniform) strategies and dovetailing sets, checks
and produces machine-verifiable value certificates, and constructs
desk-scale anti-checkers and hard input distributions for program/input
games.
"""

__version__ = "0.1.0"

from .errors import (
    ConstructionFailed,
    DimensionMismatch,
    GameError,
    InvalidGame,
    InvalidStrategy,
    MalformedCertificate,
    NoHittingSet,
    OracleBudgetExceeded,
    SolverCapExceeded,
    SolverNotConverged,
    UncoverableColumn,
    UnverifiedAntiChecker,
    ValueBelowThreshold,
)
from .games import (
    BestResponse,
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
    load_game,
    payoff_range,
    strategy_from_multiset,
)
from .solver import EXACT_CAP, SolveResult, solve, solve_exact_small, solve_mwu
from .sparsify import (
    DovetailResult,
    DovetailSet,
    SparseStrategy,
    SparsifyParams,
    dovetail_bound,
    dovetail_exploitability,
    dovetail_set,
    greedy_k_uniform,
    k_uniform_bound,
    sample_k_uniform,
)
from .certificates import (
    StrategyCertificate,
    Verdict,
    check_certificate,
    make_certificate,
)
from .anticheckers import (
    AntiChecker,
    HardDistribution,
    Language,
    Program,
    ProgramFamily,
    build_anti_checker,
    correctness_game,
    dovetail_anti_checker,
    family_complexity,
    sample_hard,
    threshold_game,
)

__all__ = [name for name in dir() if not name.startswith("_")]
