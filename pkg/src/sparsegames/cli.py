"""Command-line front end: a thin client of the HTTP service.

By default the CLI talks to the service in-process (no network, no
running server needed), so file-based workflows are fully offline and
reproducible; pass ``--server URL`` to target a live instance instead.
Responses are printed verbatim, which keeps seeded invocations
byte-identical across runs.

Exit codes: 0 success, 1 mathematical/verification failure (rejected
certificate, unverified construction, non-converged solve), 2 usage or
parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import GameError
from .games import game_to_json_dict, load_game

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


def _client(server: str | None):
    if server:
        import httpx

        return httpx.Client(base_url=server)
    import warnings

    with warnings.catch_warnings():
        # The in-process client is an implementation detail; keep stderr clean.
        warnings.simplefilter("ignore", DeprecationWarning)
        warnings.simplefilter("ignore", UserWarning)
        from fastapi.testclient import TestClient

    from .service import app

    return TestClient(app)


def _emit(text: str, output: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_game_dict(path: str) -> dict:
    return game_to_json_dict(load_game(path))


def _post(args, path: str, body: dict, verified_key: str | None = None):
    """POST, print the raw response, and map it to an exit code."""
    with _client(args.server) as client:
        resp = client.post(path, json=body)
    return _finish(args, resp, verified_key)


def _finish(args, resp, verified_key: str | None = None) -> int:
    if resp.status_code == 409:
        _emit(resp.text, args.output)
        detail = resp.json().get("detail", resp.text)
        return _fail(detail, EXIT_VERIFICATION)
    if resp.status_code != 200:
        try:
            detail = resp.json().get("detail", resp.text)
        except ValueError:
            detail = resp.text
        return _fail(f"HTTP {resp.status_code}: {detail}", EXIT_USAGE)
    _emit(resp.text, args.output)
    if verified_key is not None:
        payload = resp.json()
        ok = payload.get(verified_key, True)
        if verified_key == "verified_min_error":
            ok = payload["verified_min_error"] >= 0.5 - payload["epsilon"]
        if not ok:
            return _fail(f"result not verified ({verified_key})", EXIT_VERIFICATION)
    return EXIT_OK


def _cmd_solve(args) -> int:
    body = {
        "game": _load_game_dict(args.game),
        "method": args.method,
        "delta": args.delta,
        "max_iters": args.max_iters,
    }
    return _post(args, "/solve", body, verified_key="converged")


def _cmd_sparsify(args) -> int:
    body = {
        "game": _load_game_dict(args.game),
        "player": args.player,
        "epsilon": args.epsilon,
        "k": args.k,
        "method": args.method,
        "seed": args.seed,
        "max_attempts": args.max_attempts,
    }
    return _post(args, "/sparsify", body, verified_key="verified")


def _cmd_dovetail(args) -> int:
    body = {
        "game": _load_game_dict(args.game),
        "player": args.player,
        "epsilon": args.epsilon,
        "method": args.method,
        "seed": args.seed,
        "max_attempts": args.max_attempts,
    }
    return _post(args, "/dovetail", body, verified_key="verified")


def _cmd_cert_make(args) -> int:
    body = {
        "game": _load_game_dict(args.game),
        "epsilon": args.epsilon,
        "seed": args.seed,
        "max_attempts": args.max_attempts,
    }
    return _post(args, "/certificates/make", body)


def _cmd_cert_check(args) -> int:
    with open(args.certificate, "r", encoding="utf-8") as fh:
        cert = json.load(fh)
    body = {"game": _load_game_dict(args.game), "certificate": cert}
    return _post(args, "/certificates/check", body, verified_key="accepted")


def _cmd_anticheck(args) -> int:
    if args.costs is not None:
        if args.t is None:
            return _fail("--costs requires --t", EXIT_USAGE)
        body = {
            "costs": _load_game_dict(args.costs)["payoffs"],
            "t": args.t,
            "epsilon": args.epsilon,
            "method": args.method,
            "seed": args.seed,
            "max_attempts": args.max_attempts,
        }
        return _post(args, "/anticheckers/dovetail", body, verified_key="verified")

    if args.family is None or args.n is None:
        return _fail("anticheck needs --family and --n (or --costs with --t)", EXIT_USAGE)
    body = {
        "family": args.family,
        "n": args.n,
        "epsilon": args.epsilon,
        "seed": args.seed,
        "max_attempts": args.max_attempts,
    }
    if args.language_file:
        with open(args.language_file, "r", encoding="utf-8") as fh:
            body["truth_table"] = fh.read().strip()
        body["language"] = args.language or "custom"
    elif args.language:
        body["language"] = args.language
    else:
        return _fail("anticheck needs --language or --language-file", EXIT_USAGE)
    return _post(args, "/anticheckers/build", body, verified_key="verified_min_error")


def _cmd_gen(args) -> int:
    with _client(args.server) as client:
        if args.name == "language":
            if not args.language or args.n is None:
                return _fail("gen language needs --language and --n", EXIT_USAGE)
            resp = client.get(
                "/generate/language",
                params={"name": args.language, "n": args.n, "seed": args.seed},
            )
        else:
            resp = client.get(
                "/generate/game",
                params={
                    "name": args.name,
                    "rows": args.rows,
                    "cols": args.cols,
                    "seed": args.seed,
                    "fmt": args.format,
                },
            )
    return _finish(args, resp)


def _cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("sparsegames.service:app", host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsegames",
        description="Zero-sum game values, sparse strategies, certificates, anti-checkers.",
    )
    parser.add_argument("--server", default=None, help="URL of a running service (default: in-process)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-attempts", type=int, default=20)
        p.add_argument("--output", default=None, help="write the JSON result here instead of stdout")

    p = sub.add_parser("solve", help="compute the game value and optimal strategies")
    p.add_argument("game", help="game file (.json or .csv)")
    p.add_argument("--delta", type=float, default=0.001, help="duality gap target for the iterative solver")
    p.add_argument("--method", choices=["auto", "exact", "mwu"], default="auto")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sparsify", help="build a k-uniform near-optimal strategy")
    p.add_argument("game")
    p.add_argument("--player", choices=["min", "max"], default="min")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--method", choices=["sampled", "greedy"], default="sampled")
    common(p)
    p.set_defaults(func=_cmd_sparsify)

    p = sub.add_parser("dovetail", help="build a dovetailing set")
    p.add_argument("game")
    p.add_argument("--player", choices=["min", "max"], default="min")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--method", choices=["sampled", "greedy"], default="sampled")
    common(p)
    p.set_defaults(func=_cmd_dovetail)

    p = sub.add_parser("cert-make", help="produce a value certificate for a game")
    p.add_argument("game")
    p.add_argument("--epsilon", type=float, required=True)
    common(p)
    p.set_defaults(func=_cmd_cert_make)

    p = sub.add_parser("cert-check", help="verify a certificate against a game")
    p.add_argument("game")
    p.add_argument("certificate", help="certificate JSON file")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_cert_check)

    p = sub.add_parser("anticheck", help="build an anti-checker (or, with --costs/--t, a dovetailed one)")
    p.add_argument("--language", default=None, help="built-in language name")
    p.add_argument("--language-file", default=None, help="truth-table text file (0/1 per input)")
    p.add_argument("--family", default=None, help="built-in program family name")
    p.add_argument("--n", type=int, default=None, help="input bit length")
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--costs", default=None, help="cost matrix file for the threshold variant")
    p.add_argument("--t", type=int, default=None, help="step budget for the threshold variant")
    p.add_argument("--method", choices=["sampled", "greedy"], default="sampled")
    common(p)
    p.set_defaults(func=_cmd_anticheck)

    p = sub.add_parser("gen", help="emit a built-in game or language")
    p.add_argument(
        "name",
        choices=["matching-pennies", "rps", "random", "cost-fixture", "language"],
    )
    p.add_argument("--rows", type=int, default=2)
    p.add_argument("--cols", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--language", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        return _fail(f"cannot read {exc.filename}", EXIT_USAGE)
    except (GameError, json.JSONDecodeError, ValueError, OSError) as exc:
        return _fail(str(exc), EXIT_USAGE)


def console_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_entry()
