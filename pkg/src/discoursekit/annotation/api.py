"""HTTP+JSON surface for the adjudication service (localhost tool).

Field names and payload shapes are documented in ``api-schema.json``
next to this module; the browser UI is a static bundle served under
``/ui`` when built.  Responses to one annotator never include the other
annotator's labels until the first has finished (blind coding); only
aggregate progress counts are shared.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..errors import NotFoundError, PreconditionError
from ..variants.candidates import VariantCandidate, candidate_from_json
from .store import (
    ConflictError,
    IncompleteAdjudicationError,
    InsufficientDataError,
    SessionStore,
)

__all__ = ["create_app"]


def _candidate_payload(cand: VariantCandidate) -> dict:
    return {
        "surface": cand.surface,
        "keyword": cand.keyword,
        "cosine_to_keyword": cand.cosine_to_keyword,
        "levenshtein": cand.levenshtein,
        "similarity_ratio": cand.similarity_ratio,
        "rule_decision": cand.rule_decision.value,
        "rule_fired": cand.rule_fired.value,
    }


def _progress_payload(progress: dict[str, tuple[int, int]]) -> dict:
    return {ann: {"labeled": p[0], "total": p[1]} for ann, p in progress.items()}


def create_app(store: SessionStore, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="discoursekit annotation service", docs_url=None, redoc_url=None)

    @app.exception_handler(NotFoundError)
    async def _not_found(_: Request, exc: NotFoundError) -> JSONResponse:
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ConflictError)
    async def _conflict(_: Request, exc: ConflictError) -> JSONResponse:
        return JSONResponse(status_code=409, content={"error": str(exc)})

    @app.exception_handler(InsufficientDataError)
    async def _insufficient(_: Request, exc: InsufficientDataError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(IncompleteAdjudicationError)
    async def _incomplete(_: Request, exc: IncompleteAdjudicationError) -> JSONResponse:
        return JSONResponse(
            status_code=422, content={"error": str(exc), "unresolved": exc.unresolved}
        )

    @app.exception_handler(PreconditionError)
    async def _precondition(_: Request, exc: PreconditionError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": str(exc)})

    @app.post("/sessions", status_code=201)
    async def create_session(body: dict) -> dict:
        candidates = [
            candidate_from_json(json.dumps(record)) for record in body["candidates"]
        ]
        session_id = store.create_session(
            candidates=candidates,
            annotators=list(body["annotators"]),
            keyword=body.get("keyword", ""),
            examples=body.get("examples"),
        )
        return {"session_id": session_id, "candidate_count": len(candidates)}

    @app.get("/sessions/{session_id}")
    async def session_info(session_id: str) -> dict:
        session = store.get(session_id)
        return {
            "session_id": session.session_id,
            "keyword": session.keyword,
            "annotators": list(session.annotators),
            "candidate_count": len(session.candidates),
            "round": session.round,
            "progress": _progress_payload(
                {ann: session.progress(ann) for ann in session.annotators}
            ),
        }

    @app.get("/sessions/{session_id}/next")
    async def next_candidate(session_id: str, annotator: str = Query(...)) -> dict:
        session = store.get(session_id)
        cand = store.next_candidate(session_id, annotator)
        labeled, total = session.progress(annotator)
        if cand is None:
            waiting = [
                other
                for other in session.annotators
                if other != annotator and not session.is_complete(other)
            ]
            return {
                "done": True,
                "waiting_for": waiting,
                "progress": {"labeled": labeled, "total": total},
            }
        return {
            "done": False,
            "candidate": _candidate_payload(cand),
            "examples": session.examples.get(cand.surface, []),
            "progress": {"labeled": labeled, "total": total},
        }

    @app.post("/sessions/{session_id}/labels")
    async def submit_label(session_id: str, body: dict) -> dict:
        progress = store.submit_label(
            session_id,
            annotator=body["annotator"],
            candidate_id=body["candidate_id"],
            label=body["label"],
        )
        return {"ok": True, "progress": _progress_payload(progress)}

    @app.get("/sessions/{session_id}/agreement")
    async def agreement(session_id: str) -> dict:
        report = store.agreement(session_id)
        payload = asdict(report)
        payload["confusion"] = {
            "both_include": report.both_include,
            "a_only": report.a_only,
            "b_only": report.b_only,
            "both_exclude": report.both_exclude,
        }
        return payload

    @app.post("/sessions/{session_id}/tiebreaks")
    async def tiebreak(session_id: str, body: dict) -> dict:
        store.record_tiebreak(session_id, body["candidate_id"], body["label"])
        return {"ok": True}

    @app.post("/sessions/{session_id}/rounds")
    async def new_round(session_id: str) -> dict:
        return {"round": store.start_new_round(session_id)}

    @app.post("/sessions/{session_id}/export")
    async def export(session_id: str, body: dict | None = None) -> dict:
        policy = (body or {}).get("policy", "discussion_resolved")
        content = store.export(session_id, policy)
        out_path = store.root / session_id / f"adjudicated-{policy}.jsonl"
        out_path.write_text(content, encoding="utf-8")
        included = sum(
            1 for line in content.splitlines() if '"human_label": "include"' in line
        )
        return {
            "policy": policy,
            "content": content,
            "included_count": included,
            "path": str(out_path),
        }

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
