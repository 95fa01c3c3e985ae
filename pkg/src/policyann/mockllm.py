"""A deterministic rule-based chat mock so the full pipeline runs offline.

The mock recognises the detector prompt and the two annotation layers by
their system prompts. Annotation replies come from a fixed keyword table
applied to the passage text; self-correction echoes the input annotations.
"""

from __future__ import annotations

import json

from .annotate import _TASK_SELF_CORRECTION  # layer marker
from .preprocess.filters import DETECTOR_PROMPT
from .providers import ChatRequest

# (phrase that must occur verbatim in the passage, label, performed)
KEYWORD_RULES: tuple[tuple[str, str, bool], ...] = (
    ("your name", "Data Categories", True),
    ("e-mail address", "Data Categories", True),
    ("your IP address", "Data Categories", True),
    ("device identifiers", "Data Categories", True),
    ("usage data", "Data Categories", True),
    ("do not collect your precise location", "Data Categories", False),
    ("to improve our services", "Processing Purpose", True),
    ("to create your account", "Processing Purpose", True),
    ("to contact you", "Processing Purpose", True),
    ("your consent", "Legal Basis for Processing", True),
    ("for 6 months", "Data Retention Period", True),
    ("for as long as your account exists", "Data Retention Period", True),
    ("Google Analytics", "Data Recipients", True),
    ("our hosting provider", "Data Recipients", True),
    ("United States", "Third-country Transfers", True),
    ("Example Apps Ltd", "Controller Name", True),
    ("privacy@example-apps.test", "Controller Contact", True),
    ("dpo@example-apps.test", "DPO Contact", True),
    ("right to access", "Right to Access", True),
    ("right to delete", "Right to Erasure", True),
    ("right to correct", "Right to Rectification", True),
    ("lodge a complaint", "Right to Lodge Complaint", True),
    ("withdraw your consent", "Right to Withdraw Consent", True),
)

_POLICY_HINTS = ("privacy", "personal data", "gdpr")


class RuleBasedMockChat:
    """Pure function of the request; identical replies across runs."""

    def __init__(self):
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        if request.system_prompt == DETECTOR_PROMPT:
            return self._detect(request.user_content)
        if _TASK_SELF_CORRECTION in request.system_prompt:
            return self._self_correct(request.user_content)
        return self._annotate(request.user_content)

    @staticmethod
    def _detect(segment: str) -> str:
        lowered = segment.lower()
        return "true" if any(hint in lowered for hint in _POLICY_HINTS) else "unknown"

    @staticmethod
    def _annotate(user_content: str) -> str:
        try:
            item = json.loads(user_content.split("\n\nYour previous reply")[0])
            text = item["passage"]
        except (json.JSONDecodeError, KeyError, TypeError):
            return "[]"
        found = [
            {"requirement": label, "value": phrase, "performed": performed}
            for phrase, label, performed in KEYWORD_RULES
            if phrase in text
        ]
        found.sort(key=lambda a: (a["requirement"], a["value"]))
        return json.dumps(found, ensure_ascii=False)

    @staticmethod
    def _self_correct(user_content: str) -> str:
        try:
            item = json.loads(user_content.split("\n\nYour previous reply")[0])
            annotations = item.get("annotations", [])
        except (json.JSONDecodeError, TypeError):
            return "[]"
        return json.dumps(annotations, ensure_ascii=False)
