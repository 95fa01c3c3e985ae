"""Event-sourced dual-review workflow: two independent reviews per passage,
agreement detection, jury adjudication and ground-truth export."""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from ..errors import (
    AlreadyReviewed,
    IncompleteReview,
    InvalidAnnotation,
    NotDisputed,
    SpanNotFound,
    TaskFinalized,
)
from ..model import (
    AnnotatedPassage,
    Annotation,
    PolicyDocument,
    TransparencyRequirement,
    annotation_to_dict,
    passage_to_dict,
    parse_policy,
    serialize_policy,
    sorted_annotations,
    validate_annotation,
)

STATE_PENDING = "pending"
STATE_ONE_REVIEW = "one_review"
STATE_DISPUTED = "disputed"
STATE_FINALIZED = "finalized"

DEFAULT_LEASE_SECONDS = 30 * 60


@dataclass
class Review:
    reviewer_id: str
    annotations: frozenset[Annotation]
    timestamp: float


@dataclass(frozen=True)
class ReviewDiff:
    only_in_1: tuple[Annotation, ...]
    only_in_2: tuple[Annotation, ...]
    common: tuple[Annotation, ...]


@dataclass
class ReviewTask:
    task_id: str
    policy_id: str
    passage: AnnotatedPassage  # pipeline output, shown as the starting point
    order: int
    state: str = STATE_PENDING
    reviews: list[Review] = field(default_factory=list)
    jury_resolution: Optional[frozenset[Annotation]] = None
    final: Optional[frozenset[Annotation]] = None
    resolution: str = ""  # agreed | jury:<decision>

    def diff(self) -> Optional[ReviewDiff]:
        if len(self.reviews) < 2:
            return None
        first, second = self.reviews[0].annotations, self.reviews[1].annotations
        return ReviewDiff(
            only_in_1=tuple(sorted_annotations(first - second)),
            only_in_2=tuple(sorted_annotations(second - first)),
            common=tuple(sorted_annotations(first & second)),
        )


def _annotations_from_payload(payload: list[dict], passage_text: str) -> frozenset[Annotation]:
    annotations = set()
    for item in payload:
        try:
            annotation = Annotation(
                span=item["value"],
                label=TransparencyRequirement(item["requirement"]),
                performed=bool(item["performed"]),
            )
            validate_annotation(annotation, passage_text)
        except (KeyError, ValueError, SpanNotFound) as exc:
            raise InvalidAnnotation(f"rejected annotation {item!r}: {exc}") from exc
        annotations.add(annotation)
    return frozenset(annotations)


class ReviewService:
    """All mutations append to a single event log; replaying the log from
    empty reconstructs identical state."""

    def __init__(
        self,
        log_path: Optional[Path] = None,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        clock: Callable[[], float] = time.time,
    ):
        self._lock = threading.RLock()
        self._log_path = Path(log_path) if log_path else None
        self._lease_seconds = lease_seconds
        self._clock = clock
        self.tasks: dict[str, ReviewTask] = {}
        self.policies: dict[str, dict] = {}  # policy_id -> {source_url, task_ids}
        self._leases: dict[str, tuple[str, float]] = {}
        if self._log_path and self._log_path.exists():
            for line in self._log_path.read_text("utf-8").splitlines():
                if line.strip():
                    self._apply(json.loads(line))

    # -- event handling -------------------------------------------------

    def _append(self, event: dict) -> None:
        self._apply(event)
        if self._log_path:
            with self._log_path.open("a", encoding="utf-8") as handle:
                handle.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _apply(self, event: dict) -> None:
        kind = event["event"]
        if kind == "policy_registered":
            self._apply_policy_registered(event)
        elif kind == "review_submitted":
            self._apply_review_submitted(event)
        elif kind == "dispute_resolved":
            self._apply_dispute_resolved(event)
        else:
            raise ValueError(f"unknown event kind {kind!r}")

    def _apply_policy_registered(self, event: dict) -> None:
        policy_id = event["policy_id"]
        document = parse_policy(
            json.dumps(event["passages"]), policy_id, event.get("source_url")
        )
        task_ids = []
        for order, annotated in enumerate(document.passages):
            task_id = f"{policy_id}:{order}"
            self.tasks[task_id] = ReviewTask(
                task_id=task_id,
                policy_id=policy_id,
                passage=annotated,
                order=len(self.tasks),
            )
            task_ids.append(task_id)
        self.policies[policy_id] = {
            "source_url": event.get("source_url"),
            "task_ids": task_ids,
        }

    def _apply_review_submitted(self, event: dict) -> None:
        task = self.tasks[event["task_id"]]
        annotations = _annotations_from_payload(
            event["annotations"], task.passage.passage.text
        )
        task.reviews.append(
            Review(
                reviewer_id=event["reviewer_id"],
                annotations=annotations,
                timestamp=event["timestamp"],
            )
        )
        if len(task.reviews) == 1:
            task.state = STATE_ONE_REVIEW
        else:
            first, second = task.reviews[0].annotations, task.reviews[1].annotations
            if first == second:
                task.final = first
                task.state = STATE_FINALIZED
                task.resolution = "agreed"
            else:
                task.state = STATE_DISPUTED

    def _apply_dispute_resolved(self, event: dict) -> None:
        task = self.tasks[event["task_id"]]
        decision = event["decision"]
        if decision == "pick_review_1":
            final = task.reviews[0].annotations
        elif decision == "pick_review_2":
            final = task.reviews[1].annotations
        else:
            final = _annotations_from_payload(
                event["annotations"], task.passage.passage.text
            )
        task.jury_resolution = final
        task.final = final
        task.state = STATE_FINALIZED
        task.resolution = f"jury:{decision}:{event['jury_id']}"

    # -- public API ------------------------------------------------------

    def register_policy(self, document: PolicyDocument) -> None:
        with self._lock:
            if document.policy_id in self.policies:
                raise ValueError(f"policy {document.policy_id!r} already registered")
            self._append(
                {
                    "event": "policy_registered",
                    "policy_id": document.policy_id,
                    "source_url": document.source_url,
                    "passages": [passage_to_dict(p) for p in document.passages],
                }
            )

    def next_task(self, reviewer_id: str) -> Optional[ReviewTask]:
        """The next open task in document order that this reviewer has not
        reviewed and that is not leased to someone else."""
        with self._lock:
            now = self._clock()
            for task in sorted(self.tasks.values(), key=lambda t: t.order):
                if task.state not in (STATE_PENDING, STATE_ONE_REVIEW):
                    continue
                if any(r.reviewer_id == reviewer_id for r in task.reviews):
                    continue
                lease = self._leases.get(task.task_id)
                if lease and lease[0] != reviewer_id and lease[1] > now:
                    continue
                self._leases[task.task_id] = (reviewer_id, now + self._lease_seconds)
                return task
            return None

    def submit_review(
        self, task_id: str, reviewer_id: str, annotations: list[dict]
    ) -> str:
        with self._lock:
            task = self.tasks[task_id]
            if task.state == STATE_FINALIZED:
                raise TaskFinalized(task_id)
            if any(r.reviewer_id == reviewer_id for r in task.reviews):
                raise AlreadyReviewed(f"{reviewer_id} already reviewed {task_id}")
            # validation happens in _apply; probe first so invalid submissions
            # never reach the log
            _annotations_from_payload(annotations, task.passage.passage.text)
            self._append(
                {
                    "event": "review_submitted",
                    "task_id": task_id,
                    "reviewer_id": reviewer_id,
                    "annotations": annotations,
                    "timestamp": self._clock(),
                }
            )
            self._leases.pop(task_id, None)
            return self.tasks[task_id].state

    def disputes(self) -> list[ReviewTask]:
        with self._lock:
            return [
                t
                for t in sorted(self.tasks.values(), key=lambda t: t.order)
                if t.state == STATE_DISPUTED
            ]

    def resolve_dispute(
        self,
        task_id: str,
        jury_id: str,
        decision: str,
        annotations: Optional[list[dict]] = None,
    ) -> ReviewTask:
        with self._lock:
            task = self.tasks[task_id]
            if task.state != STATE_DISPUTED:
                raise NotDisputed(f"task {task_id} is {task.state}")
            if any(r.reviewer_id == jury_id for r in task.reviews):
                raise InvalidAnnotation(
                    f"jury member {jury_id!r} reviewed this passage first-pass"
                )
            if decision not in ("pick_review_1", "pick_review_2", "custom"):
                raise ValueError(f"unknown decision {decision!r}")
            if decision == "custom":
                if annotations is None:
                    raise InvalidAnnotation("custom decision requires annotations")
                _annotations_from_payload(annotations, task.passage.passage.text)
            self._append(
                {
                    "event": "dispute_resolved",
                    "task_id": task_id,
                    "jury_id": jury_id,
                    "decision": decision,
                    "annotations": annotations or [],
                    "timestamp": self._clock(),
                }
            )
            return self.tasks[task_id]

    def policy_progress(self) -> list[dict]:
        with self._lock:
            out = []
            for policy_id, info in self.policies.items():
                tasks = [self.tasks[t] for t in info["task_ids"]]
                out.append(
                    {
                        "policy_id": policy_id,
                        "source_url": info["source_url"],
                        "passages": len(tasks),
                        "finalized": sum(1 for t in tasks if t.state == STATE_FINALIZED),
                        "disputed": sum(1 for t in tasks if t.state == STATE_DISPUTED),
                    }
                )
            return out

    def export_ground_truth(self, policy_id: str) -> PolicyDocument:
        with self._lock:
            info = self.policies[policy_id]
            tasks = [self.tasks[t] for t in info["task_ids"]]
            pending = [t.task_id for t in tasks if t.state != STATE_FINALIZED]
            if pending:
                raise IncompleteReview(policy_id, pending)
            passages = tuple(
                AnnotatedPassage(passage=t.passage.passage, annotations=t.final)
                for t in tasks
            )
            return PolicyDocument(
                policy_id=policy_id, passages=passages, source_url=info["source_url"]
            )

    def export_ground_truth_bytes(self, policy_id: str) -> bytes:
        return serialize_policy(self.export_ground_truth(policy_id))

    def state_snapshot(self) -> dict:
        """Comparable digest of persistent state (used by replay tests)."""
        with self._lock:
            return {
                task_id: {
                    "state": task.state,
                    "resolution": task.resolution,
                    "reviews": [
                        (
                            r.reviewer_id,
                            [annotation_to_dict(a) for a in sorted_annotations(r.annotations)],
                        )
                        for r in task.reviews
                    ],
                    "final": [
                        annotation_to_dict(a) for a in sorted_annotations(task.final)
                    ]
                    if task.final is not None
                    else None,
                }
                for task_id, task in self.tasks.items()
            }
