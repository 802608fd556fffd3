"""HTTP service exposing the toolkit: solve, sparsify, certify, anti-check.

Every endpoint is a pure function of its request body (plus declared
seeds), so responses are byte-identical across calls and safe to cache.
Mathematical failures that are not the client's fault (a family with a
too-accurate program, a program never exceeding the step budget, a
non-converged solve) map to HTTP 409; malformed inputs map to 400/404.
"""

from __future__ import annotations

from typing import Literal, Optional

import numpy as np
from fastapi import FastAPI, Query, Response
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from . import __version__
from .anticheckers import (
    AntiChecker,
    Language,
    build_anti_checker,
    dovetail_anti_checker,
    sample_hard,
)
from .certificates import StrategyCertificate, check_certificate, make_certificate
from .corpus import builtin_family, builtin_game, builtin_language
from .errors import (
    GameError,
    InvalidGame,
    NoHittingSet,
    SolverNotConverged,
    UnverifiedAntiChecker,
    ValueBelowThreshold,
)
from .games import GameMatrix, Player, UniformMultiset, game_to_csv
from .solver import solve, solve_exact_small, solve_mwu
from .sparsify import (
    SparsifyParams,
    dovetail_set,
    greedy_k_uniform,
    k_uniform_bound,
    sample_k_uniform,
)

# Errors that mean "the request was understood but the math says no".
_CONFLICT_ERRORS = (ValueBelowThreshold, NoHittingSet, SolverNotConverged, UnverifiedAntiChecker)


class GameModel(BaseModel):
    rows: int = Field(ge=1)
    cols: int = Field(ge=1)
    payoffs: list[list[float]]

    def to_game(self) -> GameMatrix:
        if len(self.payoffs) != self.rows or any(len(r) != self.cols for r in self.payoffs):
            raise InvalidGame("payoffs shape does not match rows x cols")
        return GameMatrix(np.array(self.payoffs, dtype=np.float64))

    @classmethod
    def from_game(cls, game: GameMatrix) -> "GameModel":
        return cls(
            rows=game.rows,
            cols=game.cols,
            payoffs=[[float(x) for x in row] for row in game.payoffs],
        )


class SolveRequest(BaseModel):
    game: GameModel
    method: Literal["auto", "exact", "mwu"] = "auto"
    delta: float = 0.001
    max_iters: Optional[int] = None


class SolveResponse(BaseModel):
    value_lo: float
    value_hi: float
    p: list[float]
    q: list[float]
    iterations: int
    method: str
    converged: bool


class SparsifyRequest(BaseModel):
    game: GameModel
    player: Literal["min", "max"] = "min"
    epsilon: float = Field(gt=0, le=1)
    k: Optional[int] = Field(default=None, ge=1)
    method: Literal["sampled", "greedy"] = "sampled"
    seed: int = 0
    max_attempts: int = Field(default=20, ge=1)


class MultisetResponse(BaseModel):
    player: str
    items: list[int]
    epsilon: float
    verified: bool
    exploitability: float


class DovetailRequest(BaseModel):
    game: GameModel
    player: Literal["min", "max"] = "min"
    epsilon: float = Field(gt=0)
    method: Literal["sampled", "greedy"] = "sampled"
    seed: int = 0
    max_attempts: int = Field(default=20, ge=1)


class CertificateModel(BaseModel):
    value: float
    epsilon: float
    bounds: tuple[float, float]
    min_multiset: list[int]
    max_multiset: list[int]

    def to_certificate(self) -> StrategyCertificate:
        return StrategyCertificate(
            claimed_value=self.value,
            epsilon=self.epsilon,
            min_multiset=UniformMultiset(Player.MIN, tuple(self.min_multiset)),
            max_multiset=UniformMultiset(Player.MAX, tuple(self.max_multiset)),
            declared_bounds=self.bounds,
        )

    @classmethod
    def from_certificate(cls, cert: StrategyCertificate) -> "CertificateModel":
        return cls(
            value=cert.claimed_value,
            epsilon=cert.epsilon,
            bounds=cert.declared_bounds,
            min_multiset=list(cert.min_multiset.items),
            max_multiset=list(cert.max_multiset.items),
        )


class CertificateMakeRequest(BaseModel):
    game: GameModel
    epsilon: float = Field(gt=0)
    seed: int = 0
    max_attempts: int = Field(default=20, ge=1)


class CertificateCheckRequest(BaseModel):
    game: GameModel
    certificate: CertificateModel


class VerdictResponse(BaseModel):
    accepted: bool
    min_exploitability: float
    max_guarantee: float
    reason: str


class AntiCheckRequest(BaseModel):
    family: str
    n: int = Field(ge=1, le=20)
    epsilon: float = Field(gt=0, lt=0.5)
    language: Optional[str] = None
    truth_table: Optional[str] = None
    seed: int = 0
    max_attempts: int = Field(default=20, ge=1)

    def to_language(self) -> Language:
        if self.truth_table is not None:
            return Language.from_truth_table_text(self.language or "custom", self.truth_table)
        if self.language is None:
            raise InvalidGame("request needs either a language name or a truth_table")
        return builtin_language(self.language, self.n, self.seed)


class AntiCheckerModel(BaseModel):
    language: str
    family: str
    n: int
    epsilon: float
    items: list[str]
    verified_min_error: float

    def to_anti_checker(self) -> AntiChecker:
        return AntiChecker.from_json_dict(self.model_dump())

    @classmethod
    def from_anti_checker(cls, ac: AntiChecker) -> "AntiCheckerModel":
        return cls(**ac.to_json_dict())


class HardSampleRequest(BaseModel):
    anti_checker: AntiCheckerModel
    seed: int = 0
    count: int = Field(default=1, ge=1)


class HardSampleResponse(BaseModel):
    samples: list[str]


class DovetailAntiCheckRequest(BaseModel):
    costs: list[list[float]]
    t: int
    epsilon: float = Field(gt=0)
    method: Literal["sampled", "greedy"] = "sampled"
    seed: int = 0
    max_attempts: int = Field(default=20, ge=1)


app = FastAPI(
    title="sparsegames",
    version=__version__,
    description="Zero-sum game values, sparse strategies, certificates, anti-checkers.",
)


@app.exception_handler(GameError)
async def game_error_handler(_, exc: GameError):
    status = 409 if isinstance(exc, _CONFLICT_ERRORS) else 400
    detail: dict = {"error": type(exc).__name__, "detail": str(exc)}
    if isinstance(exc, ValueBelowThreshold):
        detail["value"] = exc.value
    if isinstance(exc, NoHittingSet):
        detail["program"] = exc.program
    return JSONResponse(status_code=status, content=detail)


@app.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@app.post("/solve", response_model=SolveResponse)
def solve_endpoint(req: SolveRequest) -> SolveResponse:
    game = req.game.to_game()
    if req.method == "exact":
        result = solve_exact_small(game)
    elif req.method == "mwu":
        result = solve_mwu(game, delta=req.delta, max_iters=req.max_iters)
    else:
        result = solve(game, delta=req.delta, max_iters=req.max_iters)
    return SolveResponse(**result.to_json_dict())


@app.post("/sparsify", response_model=MultisetResponse)
def sparsify_endpoint(req: SparsifyRequest) -> MultisetResponse:
    game = req.game.to_game()
    player = Player(req.player)
    if req.method == "greedy":
        k = req.k or k_uniform_bound(game.n_strategies(player.opponent), req.epsilon)
        sparse = greedy_k_uniform(game, k, player)
    else:
        solution = solve(game, delta=max(req.epsilon * game.range_width / 8.0, 1e-9))
        source = solution.p if player is Player.MIN else solution.q
        params = SparsifyParams(
            player=player,
            epsilon=req.epsilon,
            k=req.k,
            seed=req.seed,
            max_attempts=req.max_attempts,
        )
        sparse = sample_k_uniform(game, source, params)
    return MultisetResponse(**sparse.to_json_dict())


@app.post("/dovetail", response_model=MultisetResponse)
def dovetail_endpoint(req: DovetailRequest) -> MultisetResponse:
    result = dovetail_set(
        req.game.to_game(),
        epsilon=req.epsilon,
        player=Player(req.player),
        method=req.method,
        seed=req.seed,
        max_attempts=req.max_attempts,
    )
    return MultisetResponse(**result.to_json_dict())


@app.post("/certificates/make", response_model=CertificateModel)
def certificate_make_endpoint(req: CertificateMakeRequest) -> CertificateModel:
    cert = make_certificate(
        req.game.to_game(), epsilon=req.epsilon, seed=req.seed, max_attempts=req.max_attempts
    )
    return CertificateModel.from_certificate(cert)


@app.post("/certificates/check", response_model=VerdictResponse)
def certificate_check_endpoint(req: CertificateCheckRequest) -> VerdictResponse:
    verdict = check_certificate(req.game.to_game(), req.certificate.to_certificate())
    return VerdictResponse(**verdict.to_json_dict())


@app.post("/anticheckers/build", response_model=AntiCheckerModel)
def anti_checker_endpoint(req: AntiCheckRequest) -> AntiCheckerModel:
    lang = req.to_language()
    if lang.n != req.n:
        raise InvalidGame(f"truth table implies n={lang.n}, request says n={req.n}")
    fam = builtin_family(req.family, req.n)
    ac = build_anti_checker(
        lang, fam, epsilon=req.epsilon, seed=req.seed, max_attempts=req.max_attempts
    )
    return AntiCheckerModel.from_anti_checker(ac)


@app.post("/anticheckers/sample", response_model=HardSampleResponse)
def hard_sample_endpoint(req: HardSampleRequest) -> HardSampleResponse:
    ac = req.anti_checker.to_anti_checker()
    return HardSampleResponse(samples=sample_hard(ac, seed=req.seed, count=req.count))


@app.post("/anticheckers/dovetail", response_model=MultisetResponse)
def dovetail_anti_checker_endpoint(req: DovetailAntiCheckRequest) -> MultisetResponse:
    result = dovetail_anti_checker(
        np.array(req.costs, dtype=np.float64),
        t=req.t,
        epsilon=req.epsilon,
        method=req.method,
        seed=req.seed,
        max_attempts=req.max_attempts,
    )
    return MultisetResponse(**result.to_json_dict())


@app.get("/generate/game")
def generate_game_endpoint(
    name: str,
    rows: int = Query(default=2, ge=1),
    cols: int = Query(default=2, ge=1),
    seed: int = 0,
    fmt: Literal["json", "csv"] = "json",
) -> Response:
    game = builtin_game(name, rows=rows, cols=cols, seed=seed)
    if fmt == "csv":
        return PlainTextResponse(game_to_csv(game))
    return JSONResponse(GameModel.from_game(game).model_dump())


@app.get("/generate/language")
def generate_language_endpoint(
    name: str, n: int = Query(ge=1, le=20), seed: int = 0
) -> PlainTextResponse:
    lang = builtin_language(name, n, seed)
    return PlainTextResponse(lang.to_truth_table_text() + "\n")
