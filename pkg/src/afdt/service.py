"""JSON-over-HTTP analysis service.

Clients POST a model (DSL text or the JSON interchange form) to ``/models``
and get back an opaque token; analysis endpoints operate on the uploaded
snapshot.  Models are immutable and every computation is pure, so requests
can run concurrently; the token map is the only synchronized state.
Snapshots expire after a configurable idle TTL, and an in-flight request
keeps using the snapshot it already resolved even if the token is evicted
meanwhile.

Status codes: 201 stored, 400 malformed transport or payload, 404 unknown
or expired token, 413 oversized body, 422 model findings (parse errors,
validation violations, schema errors) or analysis caps.  Model findings keep
their structured shapes (``parse_errors``/``violations``/``schema_error``);
every other failure body is ``{"error": {"code", "message"}}``.
"""

from __future__ import annotations

import argparse
import json
import secrets
import threading
import time
from dataclasses import dataclass
from typing import Iterable, Sequence

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import analysis, quant
from .dsl import ParseFailure, from_json, parse, to_dot
from .errors import (
    BadProbError,
    BudgetExceededError,
    MissingProbError,
    SchemaError,
    TooLargeError,
    TooManyDefensesError,
    UnknownDefenseError,
    UnknownLeafError,
)
from .model import Model, evaluate, leaves, validate

DEFAULT_PORT = 8741
DEFAULT_MAX_BODY = 1 << 20  # 1 MiB
DEFAULT_TTL_SECONDS = 3600.0


@dataclass
class _Entry:
    model: Model
    last_used: float


class _ModelStore:
    """Token -> model snapshots with idle-TTL eviction.

    Eviction happens lazily under the lock; readers receive the model object
    itself, so a snapshot handed out stays usable after eviction.
    """

    def __init__(self, ttl_seconds: float):
        self._ttl = ttl_seconds
        self._lock = threading.Lock()
        self._entries: dict[str, _Entry] = {}

    def put(self, model: Model) -> str:
        token = secrets.token_urlsafe(16)
        now = time.monotonic()
        with self._lock:
            self._sweep(now)
            self._entries[token] = _Entry(model, now)
        return token

    def get(self, token: str) -> Model | None:
        now = time.monotonic()
        with self._lock:
            self._sweep(now)
            entry = self._entries.get(token)
            if entry is None:
                return None
            entry.last_used = now
            return entry.model

    def _sweep(self, now: float) -> None:
        dead = [t for t, e in self._entries.items() if now - e.last_used > self._ttl]
        for token in dead:
            del self._entries[token]


def _fail(status: int, code: str, message: str) -> HTTPException:
    return HTTPException(status, {"code": code, "message": message})


def create_app(
    max_body: int = DEFAULT_MAX_BODY,
    ttl_seconds: float = DEFAULT_TTL_SECONDS,
    cors_origins: Sequence[str] = ("*",),
) -> FastAPI:
    app = FastAPI(title="afdt service")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=list(cors_origins),
            allow_methods=["*"],
            allow_headers=["*"],
        )
    store = _ModelStore(ttl_seconds)

    # Registered on the Starlette base class so router-raised errors
    # (404 on unknown paths, 405 on wrong methods) get the envelope too.
    @app.exception_handler(StarletteHTTPException)
    async def _error_envelope(request: Request, exc: StarletteHTTPException):
        detail = exc.detail
        if not isinstance(detail, dict):
            detail = {"code": "ERROR", "message": str(detail)}
        return JSONResponse(status_code=exc.status_code, content={"error": detail})

    def _model(token: str) -> Model:
        model = store.get(token)
        if model is None:
            raise _fail(404, "UNKNOWN_MODEL", "unknown or expired model token")
        return model

    async def _json_body(request: Request) -> dict:
        try:
            doc = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise _fail(400, "BAD_REQUEST", "body is not valid JSON") from None
        if not isinstance(doc, dict):
            raise _fail(400, "BAD_REQUEST", "body must be a JSON object")
        return doc

    def _id_list(value: object, what: str) -> list[str]:
        if not isinstance(value, list) or not all(isinstance(item, str) for item in value):
            raise _fail(400, "BAD_REQUEST", f"{what} must be an array of id strings")
        return value

    @app.post("/models", status_code=201)
    async def upload_model(request: Request):
        declared = request.headers.get("content-length", "")
        if declared.isdigit() and int(declared) > max_body:
            raise _fail(413, "BODY_TOO_LARGE", f"body exceeds the {max_body}-byte limit")
        body = await request.body()
        if len(body) > max_body:
            raise _fail(413, "BODY_TOO_LARGE", f"body exceeds the {max_body}-byte limit")
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError:
            raise _fail(400, "BAD_REQUEST", "body is not UTF-8 text") from None
        if not text.strip():
            raise _fail(400, "BAD_REQUEST", "empty body")

        if text.lstrip().startswith("{"):
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise _fail(400, "BAD_REQUEST", f"malformed JSON: {exc}") from None
            try:
                model = from_json(doc)
            except SchemaError as exc:
                return JSONResponse(
                    status_code=422,
                    content={"schema_error": {"path": exc.path, "message": exc.message}},
                )
        else:
            try:
                model = parse(text)
            except ParseFailure as exc:
                return JSONResponse(
                    status_code=422,
                    content={"parse_errors": [e.as_dict() for e in exc.errors]},
                )
        violations = validate(model)
        if violations:
            return JSONResponse(
                status_code=422,
                content={"violations": [v.as_dict() for v in violations]},
            )
        partition = leaves(model)
        labels = {n.id: n.label for n in model.nodes.values() if n.label is not None}
        return {
            "token": store.put(model),
            "leaves": {
                "bas": sorted(partition.bas),
                "bcf": sorted(partition.bcf),
                "bds": sorted(partition.bds),
            },
            "labels": labels,
            "violations": [],
        }

    @app.get("/models/{token}/mcs")
    def model_mcs(token: str, defenses: str = ""):
        model = _model(token)
        ids = [part.strip() for part in defenses.split(",") if part.strip()]
        try:
            family = analysis.minimal_cut_sets(model, ids)
        except UnknownDefenseError as exc:
            raise _fail(400, exc.code, exc.message) from None
        except BudgetExceededError as exc:
            raise _fail(422, exc.code, exc.message) from None
        return family.as_dict()

    @app.get("/models/{token}/impact")
    def model_impact(token: str):
        model = _model(token)
        try:
            entries = analysis.defense_impact(model)
        except (TooManyDefensesError, BudgetExceededError) as exc:
            raise _fail(422, exc.code, exc.message) from None
        return {"entries": [e.as_dict() for e in entries]}

    @app.post("/models/{token}/evaluate")
    async def model_evaluate(token: str, request: Request):
        model = _model(token)
        doc = await _json_body(request)
        active = _id_list(doc.get("active"), "active")
        try:
            value = evaluate(model, active)
        except UnknownLeafError as exc:
            raise _fail(400, exc.code, exc.message) from None
        return {"tle": value}

    @app.post("/models/{token}/probability")
    async def model_probability(token: str, request: Request):
        model = _model(token)
        doc = await _json_body(request)
        probs = doc.get("probs")
        if not isinstance(probs, dict):
            raise _fail(400, "BAD_REQUEST", "probs must be an object of {leaf id: probability}")
        defenses = _id_list(doc.get("defenses", []), "defenses")
        mc = doc.get("mc")
        seed = doc.get("seed", 0)
        if mc is not None and (not isinstance(mc, int) or isinstance(mc, bool) or mc < 1):
            raise _fail(400, "BAD_REQUEST", "mc must be a positive sample count")
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise _fail(400, "BAD_REQUEST", "seed must be an integer")
        try:
            if mc is not None:
                result = quant.tle_probability_mc(model, probs, defenses, samples=mc, seed=seed)
            else:
                result = quant.tle_probability_exact(model, probs, defenses)
        except (UnknownLeafError, UnknownDefenseError, MissingProbError, BadProbError) as exc:
            raise _fail(400, exc.code, exc.message) from None
        except TooLargeError as exc:
            raise _fail(422, exc.code, exc.message) from None
        return result.as_dict()

    @app.get("/models/{token}/dot")
    def model_dot(token: str):
        model = _model(token)
        return Response(content=to_dot(model), media_type="text/plain; charset=utf-8")

    return app


def main(argv: Iterable[str] | None = None) -> None:
    parser = argparse.ArgumentParser(
        prog="afdt-service", description="HTTP analysis service for attack-fault-defense trees."
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=DEFAULT_PORT)
    parser.add_argument("--max-body", type=int, default=DEFAULT_MAX_BODY, help="bytes")
    parser.add_argument("--ttl-seconds", type=float, default=DEFAULT_TTL_SECONDS)
    parser.add_argument(
        "--cors-origin",
        action="append",
        dest="cors_origins",
        help="allowed CORS origin (repeatable; default *)",
    )
    args = parser.parse_args(argv if argv is None else list(argv))

    import uvicorn

    app = create_app(
        max_body=args.max_body,
        ttl_seconds=args.ttl_seconds,
        cors_origins=tuple(args.cors_origins) if args.cors_origins else ("*",),
    )
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
