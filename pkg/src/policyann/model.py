"""Core data model: passages, annotations, the 21-label taxonomy and the
JSON wire format for annotated privacy policies."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import jsonschema

from .errors import InvalidAnnotation, SchemaViolation, SpanNotFound

DISCONTINUITY = "[...]"


class TransparencyRequirement(enum.Enum):
    """The 21 transparency requirements derived from GDPR Articles 13 and 14."""

    CONTROLLER_NAME = "Controller Name"
    CONTROLLER_CONTACT = "Controller Contact"
    DPO_CONTACT = "DPO Contact"
    DATA_CATEGORIES = "Data Categories"
    PROCESSING_PURPOSE = "Processing Purpose"
    LEGAL_BASIS = "Legal Basis for Processing"
    LEGITIMATE_INTERESTS = "Legitimate Interests for Processing"
    SOURCE_OF_DATA = "Source of Data"
    RETENTION_PERIOD = "Data Retention Period"
    DATA_RECIPIENTS = "Data Recipients"
    THIRD_COUNTRY_TRANSFERS = "Third-country Transfers"
    MANDATORY_DISCLOSURE = "Mandatory Data Disclosure"
    AUTOMATED_DECISION_MAKING = "Automated Decision-Making"
    RIGHT_TO_ACCESS = "Right to Access"
    RIGHT_TO_RECTIFICATION = "Right to Rectification"
    RIGHT_TO_ERASURE = "Right to Erasure"
    RIGHT_TO_RESTRICT = "Right to Restrict"
    RIGHT_TO_OBJECT = "Right to Object"
    RIGHT_TO_PORTABILITY = "Right to Portability"
    RIGHT_TO_WITHDRAW_CONSENT = "Right to Withdraw Consent"
    RIGHT_TO_LODGE_COMPLAINT = "Right to Lodge Complaint"

    @property
    def gdpr_references(self) -> str:
        return GDPR_REFERENCES[self]

    @property
    def color(self) -> str:
        return LABEL_COLORS[self]

    @classmethod
    def from_string(cls, value: str) -> "TransparencyRequirement":
        try:
            return cls(value)
        except ValueError:
            raise KeyError(f"unknown transparency requirement: {value!r}") from None


REQUIREMENTS: tuple[TransparencyRequirement, ...] = tuple(TransparencyRequirement)
REQUIREMENT_NAMES: tuple[str, ...] = tuple(r.value for r in REQUIREMENTS)

GDPR_REFERENCES: dict[TransparencyRequirement, str] = {
    TransparencyRequirement.CONTROLLER_NAME: "Art. 13(1)(a), 14(1)(a)",
    TransparencyRequirement.CONTROLLER_CONTACT: "Art. 13(1)(a), 14(1)(a)",
    TransparencyRequirement.DPO_CONTACT: "Art. 13(1)(b), 14(1)(b)",
    TransparencyRequirement.DATA_CATEGORIES: "Art. 14(1)(d)",
    TransparencyRequirement.PROCESSING_PURPOSE: "Art. 13(1)(c), 14(1)(c)",
    TransparencyRequirement.LEGAL_BASIS: "Art. 13(1)(c), 14(1)(c)",
    TransparencyRequirement.LEGITIMATE_INTERESTS: "Art. 13(1)(d)",
    TransparencyRequirement.SOURCE_OF_DATA: "Art. 14(2)(f)",
    TransparencyRequirement.RETENTION_PERIOD: "Art. 13(2)(a), 14(2)(a)",
    TransparencyRequirement.DATA_RECIPIENTS: "Art. 13(1)(e), 14(1)(e)",
    TransparencyRequirement.THIRD_COUNTRY_TRANSFERS: "Art. 13(1)(f), 14(1)(f)",
    TransparencyRequirement.MANDATORY_DISCLOSURE: "Art. 13(2)(e)",
    TransparencyRequirement.AUTOMATED_DECISION_MAKING: "Art. 13(2)(f), 14(2)(f)",
    TransparencyRequirement.RIGHT_TO_ACCESS: "Art. 13(2)(b), 14(2)(c)",
    TransparencyRequirement.RIGHT_TO_RECTIFICATION: "Art. 13(2)(b), 14(2)(c)",
    TransparencyRequirement.RIGHT_TO_ERASURE: "Art. 13(2)(b), 14(2)(c)",
    TransparencyRequirement.RIGHT_TO_RESTRICT: "Art. 13(2)(b), 14(2)(c)",
    TransparencyRequirement.RIGHT_TO_OBJECT: "Art. 13(2)(b), 14(2)(c)",
    TransparencyRequirement.RIGHT_TO_PORTABILITY: "Art. 13(2)(b), 14(2)(c)",
    TransparencyRequirement.RIGHT_TO_WITHDRAW_CONSENT: "Art. 13(2)(c), 14(2)(d)",
    TransparencyRequirement.RIGHT_TO_LODGE_COMPLAINT: "Art. 13(2)(d), 14(2)(e)",
}

# Fixed palette shared by the review UI and exports (one colour per label).
LABEL_COLORS: dict[TransparencyRequirement, str] = {
    TransparencyRequirement.CONTROLLER_NAME: "#1f77b4",
    TransparencyRequirement.CONTROLLER_CONTACT: "#aec7e8",
    TransparencyRequirement.DPO_CONTACT: "#ff7f0e",
    TransparencyRequirement.DATA_CATEGORIES: "#ffbb78",
    TransparencyRequirement.PROCESSING_PURPOSE: "#2ca02c",
    TransparencyRequirement.LEGAL_BASIS: "#98df8a",
    TransparencyRequirement.LEGITIMATE_INTERESTS: "#d62728",
    TransparencyRequirement.SOURCE_OF_DATA: "#ff9896",
    TransparencyRequirement.RETENTION_PERIOD: "#9467bd",
    TransparencyRequirement.DATA_RECIPIENTS: "#c5b0d5",
    TransparencyRequirement.THIRD_COUNTRY_TRANSFERS: "#8c564b",
    TransparencyRequirement.MANDATORY_DISCLOSURE: "#c49c94",
    TransparencyRequirement.AUTOMATED_DECISION_MAKING: "#e377c2",
    TransparencyRequirement.RIGHT_TO_ACCESS: "#f7b6d2",
    TransparencyRequirement.RIGHT_TO_RECTIFICATION: "#7f7f7f",
    TransparencyRequirement.RIGHT_TO_ERASURE: "#c7c7c7",
    TransparencyRequirement.RIGHT_TO_RESTRICT: "#bcbd22",
    TransparencyRequirement.RIGHT_TO_OBJECT: "#dbdb8d",
    TransparencyRequirement.RIGHT_TO_PORTABILITY: "#17becf",
    TransparencyRequirement.RIGHT_TO_WITHDRAW_CONSENT: "#9edae5",
    TransparencyRequirement.RIGHT_TO_LODGE_COMPLAINT: "#ffd92f",
}


class ElementType(enum.Enum):
    HEADLINE = "headline"
    LIST_ITEM = "list_item"
    TABLE_CELL = "table_cell"
    TABLE_HEADER = "table_header"
    TEXT = "text"


CONTEXT_TAGS = frozenset(
    {"div", "h1", "h2", "h3", "h4", "h5", "h6", "li", "p", "td", "th"}
)


@dataclass(frozen=True)
class ContextElement:
    text: str
    tag: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("context element text must be non-empty")
        if self.tag not in CONTEXT_TAGS:
            raise ValueError(f"context tag {self.tag!r} outside the closed set")


@dataclass(frozen=True)
class Passage:
    element_type: ElementType
    context: tuple[ContextElement, ...]
    text: str
    id: str = ""

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("passage text must be non-empty")
        object.__setattr__(self, "context", tuple(self.context))


@dataclass(frozen=True)
class Annotation:
    span: str
    label: TransparencyRequirement
    performed: bool

    def __post_init__(self):
        if not self.span.strip():
            raise ValueError("annotation span must be non-empty")
        for segment in span_segments(self.span):
            if not segment:
                raise ValueError("annotation contains an empty span segment")


def span_segments(span: str) -> list[str]:
    """Split a span on the discontinuity placeholder.

    Whitespace around the placeholder belongs to the placeholder, not the
    segments, so each segment is trimmed before matching.
    """
    return [part.strip() for part in span.split(DISCONTINUITY)]


def validate_annotation(annotation: Annotation, passage_text: str) -> list[tuple[int, int]]:
    """Locate each span segment in the passage text.

    Matching is exact (case- and whitespace-sensitive). Segments must occur in
    order without overlap; for repeated occurrences the leftmost one after the
    previous segment's end is chosen. Returns the covered character ranges.
    """
    ranges: list[tuple[int, int]] = []
    cursor = 0
    for segment in span_segments(annotation.span):
        index = passage_text.find(segment, cursor)
        if index < 0:
            raise SpanNotFound(
                f"segment {segment!r} not found in passage after offset {cursor}"
            )
        cursor = index + len(segment)
        ranges.append((index, cursor))
    return ranges


@dataclass(frozen=True)
class AnnotatedPassage:
    passage: Passage
    annotations: frozenset[Annotation] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "annotations", frozenset(self.annotations))
        for annotation in self.annotations:
            try:
                validate_annotation(annotation, self.passage.text)
            except SpanNotFound as exc:
                raise InvalidAnnotation(
                    f"annotation {annotation.span!r} does not fit passage "
                    f"{self.passage.id or self.passage.text[:40]!r}: {exc}"
                ) from exc

    def labels(self) -> frozenset[TransparencyRequirement]:
        return labels_of(self)


@dataclass(frozen=True)
class PolicyDocument:
    policy_id: str
    passages: tuple[AnnotatedPassage, ...]
    source_url: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "passages", tuple(self.passages))
        ids = [p.passage.id for p in self.passages]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate passage ids in policy {self.policy_id!r}")


def labels_of(annotated: AnnotatedPassage) -> frozenset[TransparencyRequirement]:
    """The set of labels present in a passage's annotations (performed ignored)."""
    return frozenset(a.label for a in annotated.annotations)


def label_vector(annotated: AnnotatedPassage) -> list[int]:
    """21-dim binary vector in canonical label order."""
    present = labels_of(annotated)
    return [1 if label in present else 0 for label in REQUIREMENTS]


# JSON schema for the serialized passage list. Closed sets are enforced via
# enums and unknown fields are rejected.
PASSAGE_LIST_SCHEMA: dict = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "type": {
                "type": "string",
                "enum": [e.value for e in ElementType],
            },
            "context": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "text": {"type": "string", "minLength": 1},
                        "type": {"type": "string", "enum": sorted(CONTEXT_TAGS)},
                    },
                    "required": ["text", "type"],
                    "additionalProperties": False,
                },
            },
            "passage": {"type": "string", "minLength": 1},
            "annotations": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "requirement": {
                            "type": "string",
                            "enum": list(REQUIREMENT_NAMES),
                        },
                        "value": {"type": "string", "minLength": 1},
                        "performed": {"type": "boolean"},
                    },
                    "required": ["requirement", "value", "performed"],
                    "additionalProperties": False,
                },
            },
        },
        "required": ["type", "context", "passage", "annotations"],
        "additionalProperties": False,
    },
}

_VALIDATOR = jsonschema.Draft7Validator(PASSAGE_LIST_SCHEMA)


def _json_path(error: jsonschema.ValidationError) -> str:
    parts = []
    for part in error.absolute_path:
        if isinstance(part, int):
            parts.append(f"[{part}]")
        else:
            parts.append(f".{part}" if parts else part)
    path = "".join(parts)
    return f"items{path}" if path.startswith("[") else (path or "$")


def parse_policy(
    data: bytes | str,
    policy_id: str = "policy",
    source_url: Optional[str] = None,
) -> PolicyDocument:
    """Parse and strictly validate a serialized passage list."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaViolation("$", f"not valid JSON: {exc}") from exc

    errors = sorted(_VALIDATOR.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        first = errors[0]
        raise SchemaViolation(_json_path(first), first.message)

    passages = []
    for index, item in enumerate(raw):
        context = tuple(
            ContextElement(text=c["text"], tag=c["type"]) for c in item["context"]
        )
        passage = Passage(
            element_type=ElementType(item["type"]),
            context=context,
            text=item["passage"],
            id=f"{policy_id}:{index}",
        )
        annotations = set()
        for a_index, entry in enumerate(item["annotations"]):
            annotation = Annotation(
                span=entry["value"],
                label=TransparencyRequirement(entry["requirement"]),
                performed=entry["performed"],
            )
            try:
                validate_annotation(annotation, passage.text)
            except SpanNotFound as exc:
                raise SchemaViolation(
                    f"items[{index}].annotations[{a_index}].value", str(exc)
                ) from exc
            annotations.add(annotation)
        passages.append(AnnotatedPassage(passage=passage, annotations=frozenset(annotations)))
    return PolicyDocument(policy_id=policy_id, passages=tuple(passages), source_url=source_url)


def annotation_to_dict(annotation: Annotation) -> dict:
    return {
        "requirement": annotation.label.value,
        "value": annotation.span,
        "performed": annotation.performed,
    }


def sorted_annotations(annotations: Iterable[Annotation]) -> list[Annotation]:
    return sorted(annotations, key=lambda a: (a.label.value, a.span, a.performed))


def passage_to_dict(annotated: AnnotatedPassage) -> dict:
    passage = annotated.passage
    return {
        "type": passage.element_type.value,
        "context": [{"text": c.text, "type": c.tag} for c in passage.context],
        "passage": passage.text,
        "annotations": [
            annotation_to_dict(a) for a in sorted_annotations(annotated.annotations)
        ],
    }


def serialize_policy(document: PolicyDocument) -> bytes:
    """Serialize a policy document: UTF-8, 2-space indent, keys in schema order."""
    items = [passage_to_dict(p) for p in document.passages]
    return (json.dumps(items, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def passages_from_document(document: PolicyDocument) -> list[Passage]:
    return [p.passage for p in document.passages]


def document_from_passages(
    policy_id: str,
    passages: Sequence[Passage],
    source_url: Optional[str] = None,
) -> PolicyDocument:
    """Wrap bare passages into a document with empty annotation sets."""
    return PolicyDocument(
        policy_id=policy_id,
        passages=tuple(AnnotatedPassage(passage=p) for p in passages),
        source_url=source_url,
    )
