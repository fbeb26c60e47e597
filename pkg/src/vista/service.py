"""HTTP service: ingestion, the four view payloads, sequence queries.

Persistence is an append-only JSONL record log replayed at startup. Every
ingest publishes a fresh immutable :class:`CorpusSnapshot`; readers grab the
current snapshot once per request, so a response can never mix versions.
Responses are canonical JSON and carry the snapshot version in the
``X-Snapshot-Version`` header.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import analytics, seqquery
from .config import ServiceConfig
from .events import (
    FormatError,
    InteractionRecord,
    ParseResult,
    normalize,
    parse_log,
    serialize,
)
from .jsonutil import canonical_json_bytes
from .provenance import Attempt, reconstruct
from .seqquery import PatternSyntaxError, SemanticError

LOG_FILENAME = "records.jsonl"


@dataclass(frozen=True)
class CorpusSnapshot:
    version: int
    records: tuple[InteractionRecord, ...]  # normalized
    attempts: tuple[Attempt, ...]
    attempts_by_id: Mapping[str, Attempt]
    users: tuple[str, ...]
    problem_types: tuple[str, ...]


def _build_snapshot(version: int, records: list[InteractionRecord], idle_cap: float) -> CorpusSnapshot:
    normalized = normalize(records)
    attempts = tuple(reconstruct(normalized, idle_cap).attempts)
    return CorpusSnapshot(
        version=version,
        records=tuple(normalized),
        attempts=attempts,
        attempts_by_id={a.id: a for a in attempts},
        users=tuple(sorted({r.user_id for r in normalized})),
        problem_types=tuple(sorted({a.key.interface for a in attempts})),
    )


class CorpusStore:
    """Append-only record log with atomically published snapshots.

    Ingestion is serialized through a single writer lock; reads are lock-free
    against the current immutable snapshot.
    """

    def __init__(self, data_dir: Path, idle_cap: float = 600.0):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.log_path = self.data_dir / LOG_FILENAME
        self.idle_cap = idle_cap
        self._write_lock = threading.Lock()
        records: list[InteractionRecord] = []
        if self.log_path.exists():
            replayed = parse_log(self.log_path.read_bytes(), "jsonl")
            records = replayed.records
        self._snapshot = _build_snapshot(0, records, idle_cap)

    def snapshot(self) -> CorpusSnapshot:
        return self._snapshot

    def ingest(self, payload: bytes, fmt: str) -> tuple[ParseResult, int]:
        """Parse, append valid records to disk, publish a new snapshot."""
        result = parse_log(payload, fmt)
        with self._write_lock:
            if result.records:
                with open(self.log_path, "a", encoding="utf-8") as fh:
                    fh.write(serialize(result.records, "jsonl"))
                    fh.flush()
                    os.fsync(fh.fileno())
            merged = list(self._snapshot.records) + result.records
            new_snapshot = _build_snapshot(self._snapshot.version + 1, merged, self.idle_cap)
            self._snapshot = new_snapshot
            version = new_snapshot.version
        return result, version


# ---------------------------------------------------------------------------
# Snapshot -> JSON payloads (shared by HTTP handlers, the CLI, and tests)


def overview_payload(snapshot: CorpusSnapshot, include_skipped: bool) -> list:
    return [row.to_payload() for row in analytics.overview(snapshot.attempts, include_skipped)]


def students_payload(snapshot: CorpusSnapshot) -> list:
    return list(snapshot.users)


def timeline_payload(snapshot: CorpusSnapshot, user_id: str, problem_type: Optional[str]) -> list:
    bars = analytics.student_timeline(snapshot.attempts, user_id, problem_type)
    return [bar.to_payload() for bar in bars]


def problem_types_payload(snapshot: CorpusSnapshot) -> list:
    return list(snapshot.problem_types)


def paths_payload(snapshot: CorpusSnapshot, problem_type: str) -> dict:
    result = analytics.problem_type_paths(snapshot.attempts, problem_type)
    payload = result.to_payload()
    payload["problem_type"] = problem_type
    return payload


def details_payload(snapshot: CorpusSnapshot, attempt_id: str) -> dict:
    detail = analytics.attempt_details(snapshot.attempts, attempt_id)
    payload = detail.to_payload()
    payload["problem_type"] = detail.key.interface
    return payload


def query_payload(snapshot: CorpusSnapshot, pattern_text: str, scope: str, same_step: bool) -> dict:
    pattern = seqquery.parse_pattern(pattern_text, scope=scope, same_step=same_step)
    streams = seqquery.build_streams(snapshot.attempts, pattern.scope)
    matches = seqquery.find_matches(pattern, streams)
    return {
        "pattern": pattern_text,
        "scope": scope,
        "same_step": same_step,
        "matches": [
            {"stream_id": m.stream_id, "start": m.start, "end": m.end, "symbols": m.symbols}
            for m in matches
        ],
    }


def ingest_payload(result: ParseResult, version: int) -> dict:
    return {
        "accepted": len(result.records),
        "errors": [{"row": e.row, "reason": e.reason} for e in result.errors],
        "version": version,
    }


# ---------------------------------------------------------------------------
# FastAPI app


class QueryRequest(BaseModel):
    pattern: str
    scope: str = "attempt"
    same_step: bool = False


_CONTENT_TYPE_FORMATS = {
    "text/csv": "csv",
    "application/csv": "csv",
    "application/jsonl": "jsonl",
    "application/x-ndjson": "jsonl",
    "application/jsonlines": "jsonl",
}


def _json_response(payload, version: int, status_code: int = 200) -> Response:
    return Response(
        content=canonical_json_bytes(payload),
        status_code=status_code,
        media_type="application/json",
        headers={"X-Snapshot-Version": str(version)},
    )


def create_app(config: ServiceConfig, store: Optional[CorpusStore] = None) -> FastAPI:
    if store is None:
        store = CorpusStore(config.data_dir, idle_cap=config.idle_cap_seconds)
    app = FastAPI(title="tutor-analytics", docs_url=None, redoc_url=None)
    app.state.store = store
    app.state.config = config
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def check_auth(request: Request) -> None:
        if not config.auth_token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {config.auth_token}":
            raise HTTPException(status_code=401, detail="invalid bearer token")

    auth = Depends(check_auth)

    @app.post("/api/ingest", dependencies=[auth])
    async def ingest(request: Request) -> Response:
        body = await request.body()
        if len(body) > config.max_body_bytes:
            raise HTTPException(status_code=413, detail="body over size limit")
        content_type = request.headers.get("content-type", "").split(";")[0].strip().lower()
        fmt = _CONTENT_TYPE_FORMATS.get(content_type)
        if fmt is None:
            raise HTTPException(
                status_code=400, detail=f"unsupported content type: {content_type!r}"
            )
        try:
            result, version = store.ingest(body, fmt)
        except FormatError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        return _json_response(ingest_payload(result, version), version)

    @app.get("/api/overview", dependencies=[auth])
    def overview(include_skipped: bool = Query(default=True)) -> Response:
        snapshot = store.snapshot()
        return _json_response(overview_payload(snapshot, include_skipped), snapshot.version)

    @app.get("/api/students", dependencies=[auth])
    def students() -> Response:
        snapshot = store.snapshot()
        return _json_response(students_payload(snapshot), snapshot.version)

    @app.get("/api/students/{user_id}/timeline", dependencies=[auth])
    def student_timeline(user_id: str, problem_type: Optional[str] = None) -> Response:
        snapshot = store.snapshot()
        if user_id not in snapshot.users:
            raise HTTPException(status_code=404, detail=f"unknown student: {user_id}")
        if problem_type is not None and problem_type not in snapshot.problem_types:
            raise HTTPException(status_code=404, detail=f"unknown problem type: {problem_type}")
        return _json_response(
            timeline_payload(snapshot, user_id, problem_type), snapshot.version
        )

    @app.get("/api/problem_types", dependencies=[auth])
    def problem_types() -> Response:
        snapshot = store.snapshot()
        return _json_response(problem_types_payload(snapshot), snapshot.version)

    @app.get("/api/problem_types/{name}/paths", dependencies=[auth])
    def type_paths(name: str) -> Response:
        snapshot = store.snapshot()
        if name not in snapshot.problem_types:
            raise HTTPException(status_code=404, detail=f"unknown problem type: {name}")
        return _json_response(paths_payload(snapshot, name), snapshot.version)

    @app.get("/api/attempts/{attempt_id}", dependencies=[auth])
    def attempt_details(attempt_id: str) -> Response:
        snapshot = store.snapshot()
        if attempt_id not in snapshot.attempts_by_id:
            raise HTTPException(status_code=404, detail=f"unknown attempt: {attempt_id}")
        return _json_response(details_payload(snapshot, attempt_id), snapshot.version)

    @app.post("/api/query", dependencies=[auth])
    def query(body: QueryRequest) -> Response:
        snapshot = store.snapshot()
        try:
            payload = query_payload(snapshot, body.pattern, body.scope, body.same_step)
        except PatternSyntaxError as exc:
            return _json_response(
                {"error": exc.message, "offset": exc.offset}, snapshot.version, status_code=422
            )
        except SemanticError as exc:
            return _json_response(
                {"error": str(exc), "offset": None}, snapshot.version, status_code=422
            )
        return _json_response(payload, snapshot.version)

    if config.static_dir is not None and Path(config.static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(config.static_dir), html=True), name="ui")

    return app
