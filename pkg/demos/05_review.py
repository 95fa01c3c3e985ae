"""Dual-review curation walkthrough: two reviewers, one agreement, one
dispute resolved by a jury, then ground-truth export."""

import json
import tempfile
from pathlib import Path

from policyann.model import parse_policy
from policyann.review.service import ReviewService

ITEMS = [
    {
        "type": "text",
        "context": [],
        "passage": "We collect your name and e-mail address to create your account.",
        "annotations": [],
    },
    {
        "type": "text",
        "context": [],
        "passage": "Logs are stored for 6 months.",
        "annotations": [],
    },
]

NAME = {"requirement": "Data Categories", "value": "your name", "performed": True}
MAIL = {"requirement": "Data Categories", "value": "your [...] e-mail address", "performed": True}
PURPOSE = {"requirement": "Processing Purpose", "value": "to create your account", "performed": True}
RETENTION = {"requirement": "Data Retention Period", "value": "for 6 months", "performed": True}


def main():
    log = Path(tempfile.mkdtemp()) / "events.jsonl"
    service = ReviewService(log_path=log)
    service.register_policy(parse_policy(json.dumps(ITEMS), "demo"))

    print("alice reviews passage 1:", service.submit_review("demo:1", "alice", [RETENTION]))
    print("bob agrees:             ", service.submit_review("demo:1", "bob", [RETENTION]))

    print("alice reviews passage 0:", service.submit_review("demo:0", "alice", [NAME, MAIL]))
    print("bob diverges:           ", service.submit_review("demo:0", "bob", [NAME, PURPOSE]))

    diff = service.tasks["demo:0"].diff()
    print("dispute diff: only_in_1 =", [a.span for a in diff.only_in_1],
          "| only_in_2 =", [a.span for a in diff.only_in_2])

    task = service.resolve_dispute("demo:0", "judy", "custom", [NAME, MAIL, PURPOSE])
    print("jury resolution:", task.resolution)

    exported = service.export_ground_truth_bytes("demo")
    print("\nexported ground truth:")
    print(exported.decode("utf-8"))

    replayed = ReviewService(log_path=log)
    print("replay reconstructs identical state:",
          replayed.state_snapshot() == service.state_snapshot())


if __name__ == "__main__":
    main()
