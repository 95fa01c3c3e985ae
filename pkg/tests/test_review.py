import json

import pytest
from fastapi.testclient import TestClient

from policyann.errors import (
    AlreadyReviewed,
    IncompleteReview,
    InvalidAnnotation,
    NotDisputed,
    TaskFinalized,
)
from policyann.model import parse_policy, serialize_policy
from policyann.review.app import create_app
from policyann.review.service import ReviewService

POLICY_ITEMS = [
    {
        "type": "text",
        "context": [{"text": "What we collect", "type": "h2"}],
        "passage": "We collect your name and e-mail address to create your account.",
        "annotations": [
            {"requirement": "Data Categories", "value": "your name", "performed": True}
        ],
    },
    {
        "type": "text",
        "context": [],
        "passage": "Logs are stored for 6 months.",
        "annotations": [],
    },
]

A_NAME = {"requirement": "Data Categories", "value": "your name", "performed": True}
A_MAIL = {
    "requirement": "Data Categories",
    "value": "your [...] e-mail address",
    "performed": True,
}
A_PURPOSE = {
    "requirement": "Processing Purpose",
    "value": "to create your account",
    "performed": True,
}
A_RETENTION = {
    "requirement": "Data Retention Period",
    "value": "for 6 months",
    "performed": True,
}


def make_service(tmp_path=None, **kwargs) -> ReviewService:
    log = tmp_path / "events.jsonl" if tmp_path else None
    service = ReviewService(log_path=log, **kwargs)
    service.register_policy(parse_policy(json.dumps(POLICY_ITEMS), "pol1"))
    return service


class TestTaskFlow:
    def test_next_task_document_order(self):
        service = make_service()
        task = service.next_task("alice")
        assert task.task_id == "pol1:0"

    def test_agreement_auto_finalizes(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME, A_MAIL])
        state = service.submit_review("pol1:0", "bob", [A_MAIL, A_NAME])
        assert state == "finalized"
        task = service.tasks["pol1:0"]
        assert task.resolution == "agreed"
        assert task.final == task.reviews[0].annotations

    def test_divergence_opens_dispute_with_diff(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME, A_MAIL])
        state = service.submit_review("pol1:0", "bob", [A_NAME, A_PURPOSE])
        assert state == "disputed"
        diff = service.tasks["pol1:0"].diff()
        assert len(diff.only_in_1) == 1 and diff.only_in_1[0].span == A_MAIL["value"]
        assert len(diff.only_in_2) == 1 and diff.only_in_2[0].span == A_PURPOSE["value"]
        assert len(diff.common) == 1

    def test_same_reviewer_twice_rejected(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME])
        with pytest.raises(AlreadyReviewed):
            service.submit_review("pol1:0", "alice", [A_NAME])

    def test_reviewed_task_never_reoffered(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME])
        task = service.next_task("alice")
        assert task.task_id == "pol1:1"

    def test_finalized_task_immutable(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME])
        service.submit_review("pol1:0", "bob", [A_NAME])
        with pytest.raises(TaskFinalized):
            service.submit_review("pol1:0", "carol", [A_NAME])

    def test_invalid_annotation_rejected_before_logging(self, tmp_path):
        service = make_service(tmp_path)
        bad = {"requirement": "Data Categories", "value": "absent span", "performed": True}
        with pytest.raises(InvalidAnnotation):
            service.submit_review("pol1:0", "alice", [bad])
        log = (tmp_path / "events.jsonl").read_text().splitlines()
        assert all(json.loads(line)["event"] != "review_submitted" for line in log)

    def test_exhaustion_returns_none(self):
        service = make_service()
        for task_id in ("pol1:0", "pol1:1"):
            service.submit_review(task_id, "alice", [])
            service.submit_review(task_id, "bob", [])
        assert service.next_task("carol") is None


class TestLeases:
    def test_leased_task_hidden_from_others_until_timeout(self):
        now = [0.0]
        service = ReviewService(lease_seconds=100, clock=lambda: now[0])
        service.register_policy(parse_policy(json.dumps(POLICY_ITEMS), "pol1"))
        first = service.next_task("alice")
        other = service.next_task("bob")
        assert first.task_id != other.task_id
        now[0] = 101.0
        # alice never submitted; her lease expired, so bob may take it over
        reissued = service.next_task("bob")
        assert reissued is None or reissued.task_id == first.task_id


class TestDisputes:
    @staticmethod
    def disputed_service(tmp_path=None):
        service = make_service(tmp_path)
        service.submit_review("pol1:0", "alice", [A_NAME, A_MAIL])
        service.submit_review("pol1:0", "bob", [A_NAME, A_PURPOSE])
        return service

    def test_pick_review_1(self):
        service = self.disputed_service()
        task = service.resolve_dispute("pol1:0", "judy", "pick_review_1")
        assert task.final == task.reviews[0].annotations
        assert task.state == "finalized"

    def test_pick_review_2(self):
        service = self.disputed_service()
        task = service.resolve_dispute("pol1:0", "judy", "pick_review_2")
        assert task.final == task.reviews[1].annotations

    def test_custom_set(self):
        service = self.disputed_service()
        task = service.resolve_dispute(
            "pol1:0", "judy", "custom", [A_NAME, A_MAIL, A_PURPOSE]
        )
        assert len(task.final) == 3

    def test_resolve_agreed_task_rejected(self):
        service = make_service()
        service.submit_review("pol1:1", "alice", [A_RETENTION])
        service.submit_review("pol1:1", "bob", [A_RETENTION])
        with pytest.raises(NotDisputed):
            service.resolve_dispute("pol1:1", "judy", "pick_review_1")

    def test_jury_must_not_be_a_reviewer(self):
        service = self.disputed_service()
        with pytest.raises(InvalidAnnotation):
            service.resolve_dispute("pol1:0", "alice", "pick_review_1")

    def test_custom_requires_annotations(self):
        service = self.disputed_service()
        with pytest.raises(InvalidAnnotation):
            service.resolve_dispute("pol1:0", "judy", "custom")


class TestExport:
    def test_incomplete_review_lists_pending(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME])
        service.submit_review("pol1:0", "bob", [A_NAME])
        with pytest.raises(IncompleteReview) as info:
            service.export_ground_truth("pol1")
        assert info.value.pending_ids == ["pol1:1"]

    def test_export_carries_final_sets(self):
        service = make_service()
        service.submit_review("pol1:0", "alice", [A_NAME, A_MAIL])
        service.submit_review("pol1:0", "bob", [A_NAME, A_PURPOSE])
        service.resolve_dispute("pol1:0", "judy", "custom", [A_MAIL])
        service.submit_review("pol1:1", "alice", [A_RETENTION])
        service.submit_review("pol1:1", "bob", [A_RETENTION])
        document = service.export_ground_truth("pol1")
        spans = {a.span for a in document.passages[0].annotations}
        assert spans == {A_MAIL["value"]}
        # export parses back as a schema-valid document
        parse_policy(serialize_policy(document), "pol1")


class TestEventLogReplay:
    def test_replay_reconstructs_identical_state(self, tmp_path):
        service = make_service(tmp_path)
        service.submit_review("pol1:0", "alice", [A_NAME, A_MAIL])
        service.submit_review("pol1:0", "bob", [A_NAME, A_PURPOSE])
        service.resolve_dispute("pol1:0", "judy", "pick_review_2")
        service.submit_review("pol1:1", "alice", [A_RETENTION])

        replayed = ReviewService(log_path=tmp_path / "events.jsonl")
        assert replayed.state_snapshot() == service.state_snapshot()
        assert replayed.policies == service.policies


class TestHttpApi:
    @pytest.fixture
    def client(self):
        return TestClient(create_app(make_service()))

    @staticmethod
    def auth(reviewer):
        return {"Authorization": f"Bearer {reviewer}"}

    def test_requires_bearer_token(self, client):
        assert client.get("/api/tasks/next").status_code == 401

    def test_labels_endpoint(self, client):
        labels = client.get("/api/labels").json()
        assert len(labels) == 21
        assert all({"name", "gdpr_references", "color"} <= set(l) for l in labels)

    def test_policies_progress(self, client):
        policies = client.get("/api/policies").json()
        assert policies == [
            {
                "policy_id": "pol1",
                "source_url": None,
                "passages": 2,
                "finalized": 0,
                "disputed": 0,
            }
        ]

    def test_full_workflow_over_http(self, client):
        task = client.get("/api/tasks/next", headers=self.auth("alice")).json()
        assert task["task_id"] == "pol1:0"
        assert task["item"]["passage"].startswith("We collect")

        r = client.post(
            "/api/tasks/pol1:0/review",
            headers=self.auth("alice"),
            json={"annotations": [A_NAME, A_MAIL]},
        )
        assert r.json()["state"] == "one_review"
        r = client.post(
            "/api/tasks/pol1:0/review",
            headers=self.auth("bob"),
            json={"annotations": [A_NAME, A_PURPOSE]},
        )
        assert r.json()["state"] == "disputed"

        disputes = client.get("/api/disputes").json()
        assert len(disputes) == 1
        assert len(disputes[0]["diff"]["only_in_1"]) == 1

        r = client.post(
            "/api/disputes/pol1:0/resolve",
            headers=self.auth("judy"),
            json={"decision": "custom", "annotations": [A_MAIL]},
        )
        assert r.json()["state"] == "finalized"

        for reviewer in ("alice", "bob"):
            client.post(
                "/api/tasks/pol1:1/review",
                headers=self.auth(reviewer),
                json={"annotations": [A_RETENTION]},
            )

        exported = client.get("/api/export/pol1")
        assert exported.status_code == 200
        document = parse_policy(exported.content, "pol1")
        assert {a.span for a in document.passages[0].annotations} == {A_MAIL["value"]}

    def test_incomplete_export_conflict(self, client):
        r = client.get("/api/export/pol1")
        assert r.status_code == 409
        assert r.json()["detail"]["pending"] == ["pol1:0", "pol1:1"]

    def test_duplicate_review_conflict(self, client):
        client.post(
            "/api/tasks/pol1:0/review",
            headers=self.auth("alice"),
            json={"annotations": []},
        )
        r = client.post(
            "/api/tasks/pol1:0/review",
            headers=self.auth("alice"),
            json={"annotations": []},
        )
        assert r.status_code == 409

    def test_invalid_annotation_unprocessable(self, client):
        r = client.post(
            "/api/tasks/pol1:0/review",
            headers=self.auth("alice"),
            json={
                "annotations": [
                    {"requirement": "Data Categories", "value": "nope", "performed": True}
                ]
            },
        )
        assert r.status_code == 422

    def test_204_when_exhausted(self, client):
        for task_id in ("pol1:0", "pol1:1"):
            for reviewer in ("alice", "bob"):
                client.post(
                    f"/api/tasks/{task_id}/review",
                    headers=self.auth(reviewer),
                    json={"annotations": []},
                )
        assert client.get("/api/tasks/next", headers=self.auth("carol")).status_code == 204
