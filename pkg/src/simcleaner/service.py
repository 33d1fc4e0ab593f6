"""Local HTTP service exposing the review session to the browser UI.

One session per workspace. Every mutation carries an ``If-Match`` header
with the version the client last saw; a stale version is rejected with a
conflict and changes nothing. Mutations are serialized behind a lock and
the dictionary plus sidecar are rewritten atomically after each one, so
killing the process never leaves a torn file.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from simcleaner.dictionary import (
    RESOLUTION_PENDING,
    Dictionary,
    InvalidDictionaryError,
    ReviewConflictError,
    ReviewItem,
    accept_review,
    load_dictionary_file,
    reassign_variant,
    reject_review,
    rename_key,
    save_dictionary,
    validate_dictionary,
)
from simcleaner.errors import SimCleanerError
from simcleaner.pipeline import ChangeLog, Workspace, apply_dictionary
from simcleaner.tableio import open_delimited


class ServiceError(SimCleanerError):
    def __init__(self, status: int, code: str, message: str, details: dict | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.details = details or {}

    def body(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


class ReviewSession:
    """Mutable review state shared between the service and the UI.

    The version counter increments by exactly one per successful mutation
    and the dictionary validates clean after every one.
    """

    def __init__(
        self,
        workspace: Workspace,
        dictionary: Dictionary,
        review_items: list[ReviewItem],
        rejected_pairs: set[tuple[str, str]],
        meta: dict,
    ):
        self.workspace = workspace
        self.dictionary = dictionary
        self.review_items = review_items
        self.rejected_pairs = rejected_pairs
        self.meta = meta
        self.version = 0
        self.last_log: ChangeLog | None = None
        self._lock = threading.Lock()

    @classmethod
    def load(cls, workspace: Workspace) -> "ReviewSession":
        path = workspace.dictionary_path
        if not path.is_file():
            raise SimCleanerError(
                f"workspace {workspace.root} has no dictionary.json; run build-dict first"
            )
        loaded = load_dictionary_file(path)
        return cls(
            workspace=workspace,
            dictionary=loaded.dictionary,
            review_items=loaded.review_items,
            rejected_pairs=loaded.rejected_pairs,
            meta=loaded.session,
        )

    def persist(self) -> None:
        save_dictionary(
            self.dictionary,
            self.workspace.dictionary_path,
            review_items=self.review_items,
            rejected_pairs=self.rejected_pairs,
            session=self.meta,
        )

    def mutate(self, expected_version: int, operation: Callable[[], None]) -> int:
        """Run one mutation under the optimistic-concurrency check."""
        with self._lock:
            if expected_version != self.version:
                raise ServiceError(
                    409,
                    "version-conflict",
                    "session has moved on; refresh and retry",
                    {"expected": expected_version, "actual": self.version},
                )
            operation()
            violations = validate_dictionary(self.dictionary)
            if violations:  # mutation operations preserve invariants; belt and braces
                raise ServiceError(
                    500,
                    "invariant-broken",
                    "mutation left the dictionary invalid",
                    {"violations": [str(v) for v in violations]},
                )
            self.persist()
            self.version += 1
            return self.version

    def find_item(self, item_id: int) -> ReviewItem:
        for item in self.review_items:
            if item.item_id == item_id:
                return item
        raise ServiceError(404, "not-found", f"no review item with id {item_id}")

    def counts(self) -> dict:
        pending = sum(1 for i in self.review_items if i.resolution == RESOLUTION_PENDING)
        return {
            "clusters": len(self.dictionary.clusters),
            "variants": sum(len(c.variants) for c in self.dictionary.clusters),
            "pending_reviews": pending,
            "resolved_reviews": len(self.review_items) - pending,
            "outliers": len(self.meta.get("outliers", [])),
            "total_rows": self.meta.get("total_rows", 0),
        }


def _require_version(if_match: str | None) -> int:
    if if_match is None:
        raise ServiceError(
            428, "precondition-required", "mutations require an If-Match header"
        )
    try:
        return int(if_match)
    except ValueError:
        raise ServiceError(
            400, "bad-request", f"If-Match must be an integer version, got {if_match!r}"
        ) from None


def _changelog_json(log: ChangeLog, limit: int) -> dict:
    return {
        "timestamp": log.timestamp,
        "input_path": log.input_path,
        "column": log.column,
        "dictionary_fingerprint": log.dictionary_fingerprint,
        "summary": log.summary(),
        "entry_total": len(log.entries),
        "entries": [
            {"row": e.row, "column": e.column, "old": e.old, "new": e.new}
            for e in log.entries[:limit]
        ],
    }


def create_app(session: ReviewSession, ui_dir: Path | None = None) -> FastAPI:
    app = FastAPI(title="simcleaner review service", docs_url=None, redoc_url=None)

    @app.exception_handler(ServiceError)
    async def service_error_handler(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={
                "code": "bad-request",
                "message": "malformed request body",
                "details": {"errors": exc.errors()},
            },
        )

    def counts_of(value: str) -> int:
        return session.meta.get("value_counts", {}).get(value, 0)

    @app.get("/api/session")
    def get_session():
        return {
            "version": session.version,
            "column": session.meta.get("column"),
            "source_path": session.meta.get("source_path"),
            "workspace": str(session.workspace.root),
            "counts": session.counts(),
        }

    @app.get("/api/clusters")
    def get_clusters(status: str | None = None):
        clusters = [
            {
                "key": c.key,
                "status": c.status,
                "count": counts_of(c.key),
                "variants": [
                    {"value": v.value, "score": v.score, "count": counts_of(v.value)}
                    for v in c.variants
                ],
            }
            for c in session.dictionary.clusters
            if status is None or c.status == status
        ]
        return {"version": session.version, "clusters": clusters}

    @app.get("/api/review")
    def get_review(all: bool = False):
        items = [
            {
                "id": i.item_id,
                "candidate": i.candidate,
                "proposed_key": i.proposed_key,
                "score": i.score,
                "resolution": i.resolution,
                "count": counts_of(i.candidate),
            }
            for i in session.review_items
            if all or i.resolution == RESOLUTION_PENDING
        ]
        items.sort(key=lambda i: (-i["score"], i["id"]))
        return {"version": session.version, "items": items}

    def _edit(expected: int, operation: Callable[[], None]) -> dict:
        try:
            version = session.mutate(expected, operation)
        except ReviewConflictError as exc:
            raise ServiceError(409, "review-conflict", str(exc)) from None
        except InvalidDictionaryError as exc:
            raise ServiceError(
                400,
                "validation-failed",
                str(exc),
                {"violations": [str(v) for v in exc.violations]},
            ) from None
        except ServiceError:
            raise
        except SimCleanerError as exc:
            raise ServiceError(400, "edit-rejected", str(exc)) from None
        return {"version": version}

    @app.post("/api/review/{item_id}/accept")
    def post_accept(item_id: int, if_match: str | None = Header(None, alias="If-Match")):
        expected = _require_version(if_match)
        item = session.find_item(item_id)

        def operation():
            session.dictionary = accept_review(session.dictionary, item)

        return _edit(expected, operation)

    @app.post("/api/review/{item_id}/reject")
    def post_reject(item_id: int, if_match: str | None = Header(None, alias="If-Match")):
        expected = _require_version(if_match)
        item = session.find_item(item_id)

        def operation():
            session.dictionary = reject_review(session.dictionary, item)
            session.rejected_pairs.add((item.candidate, item.proposed_key))

        return _edit(expected, operation)

    @app.post("/api/clusters/reassign")
    def post_reassign(body: dict, if_match: str | None = Header(None, alias="If-Match")):
        expected = _require_version(if_match)
        missing = {"variant", "from", "to"} - body.keys()
        if missing:
            raise ServiceError(
                400, "bad-request", f"missing fields: {', '.join(sorted(missing))}"
            )

        def operation():
            session.dictionary = reassign_variant(
                session.dictionary, body["variant"], body["from"], body["to"]
            )

        return _edit(expected, operation)

    @app.post("/api/clusters/rename")
    def post_rename(body: dict, if_match: str | None = Header(None, alias="If-Match")):
        expected = _require_version(if_match)
        missing = {"old", "new"} - body.keys()
        if missing:
            raise ServiceError(
                400, "bad-request", f"missing fields: {', '.join(sorted(missing))}"
            )

        def operation():
            session.dictionary = rename_key(session.dictionary, body["old"], body["new"])

        return _edit(expected, operation)

    @app.post("/api/apply")
    def post_apply(
        body: dict | None = None, if_match: str | None = Header(None, alias="If-Match")
    ):
        expected = _require_version(if_match)
        body = body or {}
        input_path = body.get("input") or session.meta.get("source_path")
        column = body.get("column") or session.meta.get("column")
        if not input_path or not column:
            raise ServiceError(
                400,
                "bad-request",
                "no input/column in session metadata; pass them in the request body",
            )

        def operation():
            source = open_delimited(input_path)
            _out, log = apply_dictionary(
                source,
                column,
                session.dictionary,
                session.workspace,
                quarantined=session.meta.get("quarantined", []),
            )
            session.last_log = log

        result = _edit(expected, operation)
        assert session.last_log is not None
        result["report"] = _changelog_json(session.last_log, limit=20)
        result["output_path"] = str(session.workspace.output_path)
        return result

    @app.get("/api/log")
    def get_log(limit: int = 100):
        if session.last_log is None:
            return {"version": session.version, "available": False}
        return {
            "version": session.version,
            "available": True,
            **_changelog_json(session.last_log, limit=limit),
        }

    if ui_dir is not None:
        ui_dir = Path(ui_dir)
        if not ui_dir.is_dir():
            raise SimCleanerError(f"UI directory {ui_dir} does not exist")
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
