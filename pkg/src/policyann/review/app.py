"""HTTP API over the review service, plus static serving of the review UI.

Reviewer identity is the bearer token (single-team trust model): the token
string is taken verbatim as the reviewer id.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, HTTPException, Response
from fastapi.responses import FileResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import (
    AlreadyReviewed,
    IncompleteReview,
    InvalidAnnotation,
    NotDisputed,
    TaskFinalized,
)
from ..model import (
    GDPR_REFERENCES,
    LABEL_COLORS,
    REQUIREMENTS,
    annotation_to_dict,
    passage_to_dict,
    sorted_annotations,
)
from .service import ReviewService, ReviewTask


class AnnotationPayload(BaseModel):
    requirement: str
    value: str
    performed: bool


class ReviewPayload(BaseModel):
    annotations: list[AnnotationPayload]


class ResolvePayload(BaseModel):
    decision: str
    annotations: Optional[list[AnnotationPayload]] = None


def _reviewer_from_header(authorization: Optional[str]) -> str:
    if not authorization or not authorization.startswith("Bearer "):
        raise HTTPException(status_code=401, detail="bearer token required")
    token = authorization[len("Bearer ") :].strip()
    if not token:
        raise HTTPException(status_code=401, detail="empty bearer token")
    return token


def _task_payload(task: ReviewTask) -> dict:
    body = {
        "task_id": task.task_id,
        "policy_id": task.policy_id,
        "state": task.state,
        "item": passage_to_dict(task.passage),
    }
    diff = task.diff()
    if diff is not None:
        body["reviews"] = [
            {
                "reviewer_id": r.reviewer_id,
                "annotations": [
                    annotation_to_dict(a) for a in sorted_annotations(r.annotations)
                ],
            }
            for r in task.reviews
        ]
        body["diff"] = {
            "only_in_1": [annotation_to_dict(a) for a in diff.only_in_1],
            "only_in_2": [annotation_to_dict(a) for a in diff.only_in_2],
            "common": [annotation_to_dict(a) for a in diff.common],
        }
    return body


def create_app(service: ReviewService, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="policy annotation review")

    @app.get("/api/policies")
    def policies():
        return service.policy_progress()

    @app.get("/api/labels")
    def labels():
        return [
            {
                "name": label.value,
                "gdpr_references": GDPR_REFERENCES[label],
                "color": LABEL_COLORS[label],
            }
            for label in REQUIREMENTS
        ]

    @app.get("/api/tasks/next")
    def next_task(authorization: Optional[str] = Header(default=None)):
        reviewer_id = _reviewer_from_header(authorization)
        task = service.next_task(reviewer_id)
        if task is None:
            return Response(status_code=204)
        return _task_payload(task)

    @app.post("/api/tasks/{task_id}/review")
    def submit_review(
        task_id: str,
        payload: ReviewPayload,
        authorization: Optional[str] = Header(default=None),
    ):
        reviewer_id = _reviewer_from_header(authorization)
        try:
            state = service.submit_review(
                task_id,
                reviewer_id,
                [a.model_dump() for a in payload.annotations],
            )
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no task {task_id}")
        except AlreadyReviewed as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except TaskFinalized as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidAnnotation as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"task_id": task_id, "state": state}

    @app.get("/api/disputes")
    def disputes():
        return [_task_payload(task) for task in service.disputes()]

    @app.post("/api/disputes/{task_id}/resolve")
    def resolve(
        task_id: str,
        payload: ResolvePayload,
        authorization: Optional[str] = Header(default=None),
    ):
        jury_id = _reviewer_from_header(authorization)
        annotations = (
            [a.model_dump() for a in payload.annotations]
            if payload.annotations is not None
            else None
        )
        try:
            task = service.resolve_dispute(task_id, jury_id, payload.decision, annotations)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no task {task_id}")
        except NotDisputed as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except InvalidAnnotation as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"task_id": task_id, "state": task.state, "resolution": task.resolution}

    @app.get("/api/export/{policy_id}")
    def export(policy_id: str):
        try:
            body = service.export_ground_truth_bytes(policy_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"no policy {policy_id}")
        except IncompleteReview as exc:
            raise HTTPException(
                status_code=409,
                detail={"policy_id": exc.policy_id, "pending": exc.pending_ids},
            )
        return Response(content=body, media_type="application/json; charset=utf-8")

    if ui_dir and ui_dir.is_dir():
        index = ui_dir / "index.html"
        if index.exists():

            @app.get("/")
            def root():
                return FileResponse(index)

        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
