"""Two-layer annotation pipeline: prompt assembly, reply parsing with
validation, and the self-correction pass."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Optional, Union

from .errors import SpanNotFound, Unparseable
from .model import (
    AnnotatedPassage,
    Annotation,
    GDPR_REFERENCES,
    Passage,
    PolicyDocument,
    REQUIREMENTS,
    TransparencyRequirement,
    annotation_to_dict,
    sorted_annotations,
    validate_annotation,
)
from .providers import ChatProvider, ChatRequest

LAYER_ANNOTATION = "annotation"
LAYER_SELF_CORRECTION = "self_correction"

_BACKGROUND = (
    "The EU General Data Protection Regulation (GDPR) obliges data "
    "controllers to inform data subjects about how their personal data is "
    "collected, processed and shared. Articles 13 and 14 define the "
    "information a privacy policy must disclose; this information is "
    "organised below as 21 Transparency Requirements."
)

_TASK_ANNOTATION = (
    "Your task is to annotate the specific words or phrases in given text "
    "passages (extracted from privacy policies) that address any of the "
    "following list of 21 Transparency Requirements defined by GDPR "
    "Articles 13 and 14:"
)

_TASK_SELF_CORRECTION = (
    "You will be provided with JSON objects representing passages of "
    "privacy policies. Each passage comes with a list of annotations that "
    "highlight specific words or phrases in the given text passages "
    "(extracted from privacy policies) that address any of the following "
    "list of 21 Transparency Requirements defined by GDPR Articles 13 "
    "and 14:"
)

# Illustrative phrase per label, shown alongside its GDPR reference.
LABEL_EXAMPLES: dict[TransparencyRequirement, str] = {
    TransparencyRequirement.CONTROLLER_NAME: "AppDeveloper Ltd",
    TransparencyRequirement.CONTROLLER_CONTACT: "email@appdeveloper.com",
    TransparencyRequirement.DPO_CONTACT: "dpo@appdeveloper.com",
    TransparencyRequirement.DATA_CATEGORIES: "e-mail address",
    TransparencyRequirement.PROCESSING_PURPOSE: "to improve our services",
    TransparencyRequirement.LEGAL_BASIS: "your consent",
    TransparencyRequirement.LEGITIMATE_INTERESTS: "to protect our services",
    TransparencyRequirement.SOURCE_OF_DATA: "from third parties",
    TransparencyRequirement.RETENTION_PERIOD: "for 6 months",
    TransparencyRequirement.DATA_RECIPIENTS: "Google Analytics",
    TransparencyRequirement.THIRD_COUNTRY_TRANSFERS: "United States",
    TransparencyRequirement.MANDATORY_DISCLOSURE: "you are required by law to provide your data",
    TransparencyRequirement.AUTOMATED_DECISION_MAKING: "profile building",
    TransparencyRequirement.RIGHT_TO_ACCESS: "you have the right to access your data",
    TransparencyRequirement.RIGHT_TO_RECTIFICATION: "you have the right to correct your data",
    TransparencyRequirement.RIGHT_TO_ERASURE: "you have the right to delete your data",
    TransparencyRequirement.RIGHT_TO_RESTRICT: "you have the right to restrict processing",
    TransparencyRequirement.RIGHT_TO_OBJECT: "you have the right to object to processing",
    TransparencyRequirement.RIGHT_TO_PORTABILITY: "you have the right to receive your data",
    TransparencyRequirement.RIGHT_TO_WITHDRAW_CONSENT: "you have the right to withdraw your consent",
    TransparencyRequirement.RIGHT_TO_LODGE_COMPLAINT: "you have the right to lodge a complaint",
}

_GENERAL_GUIDELINES = """When annotating, follow these guidelines:

- Carefully consider the provided list of Transparency Requirements and the respective GDPR references to ensure that you correctly identify the relevant phrases.
- Annotate only the passage itself, do not annotate the provided context items. Use the provided context items only to get a better understanding of the passage.
- Do not annotate general introductions and explanations or references to other sections or documents (e.g. "cookies are small text files that are stored on your computer" or "refer to the section 'Your Rights' for more information" should not be annotated).
- Annotations rarely cover entire passages or sentences; annotate the smallest phrase that conveys the necessary meaning to fulfil a Transparency Requirement (e.g. in the sentence "We log device identifiers.", only annotate "device identifiers" as Data Categories).
- Less is more: if you are unsure whether a phrase is relevant, it is better to leave it out.
- Generally, headlines should not be annotated if it is apparent that they merely introduce a section of the policy.
- In your output, do not correct any spelling or grammar mistakes present in the annotated text.
- Never make up information that is not present in the text.
- Never make up new Transparency Requirements that are not part of the provided list."""

_SELF_CORRECTION_GUIDELINES_INTRO = """The annotations were generated by an automated system and may contain errors. Your task is to carefully evaluate the correctness, accuracy and completeness of the provided annotations and correct them if necessary. If you deem an annotation correct, leave it unchanged. If you find an annotation to be incorrect, incomplete or superfluous, delete or correct it. If you find that an annotation is missing, add it.

The annotations were generated based on the following guidelines. Follow these guidelines carefully when reviewing the annotations:"""

_LINGUISTIC_INSTRUCTIONS = """Linguistic and grammatical instructions:

- Include restrictive/defining clauses in the annotation (e.g. "your name", "other companies we are affiliated with", "our partners").
- A passage may address multiple different Transparency Requirements. Thus, a passage may have any number of annotations (e.g. "we collect your e-mail address to contact you" contains a Data Categories phrase ("your e-mail address") and a Processing Purpose ("contact you")).
- Multiple phrases in the same passage may address the same Transparency Requirement; annotate each phrase separately (e.g. "we log IP-addresses and device models" contains two instances of Data Categories: "IP-addresses" and "device models").
- A single word or phrase may have multiple annotations (e.g. "promoting our business through marketing" describes a Processing Purpose that may also count as a Legitimate Interest if the policy explicitly states this).
- If an annotated phrase is interrupted by an irrelevant injected clause, replace the injected clause with the placeholder string "[...]" (e.g. "we use your usage data to determine, if necessary, the cause of crashes" describes the Processing Purpose "determine [...] the cause of crashes").
- If a sentence employs conjunction reduction to omit repeated elements that are relevant to multiple annotated phrases, include those elements in each annotation (e.g. "You have the right to access and delete your data" addresses the Right to Access with "You have the right to access [...] your data" as well as the Right to Erasure with "You have the right to [...] delete your data"). This also applies to shared restrictive/defining clauses (e.g. in "your name and e-mail address", the "your" should be used for both annotations: "your name" and "your [...] e-mail address")."""

ANNOTATION_ITEM_SCHEMA = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "requirement": {"type": "string"},
            "value": {"type": "string"},
            "performed": {"type": "boolean"},
        },
        "required": ["requirement", "value", "performed"],
    },
}

_OUTPUT_FORMAT = (
    "For each annotation, provide the following information:\n"
    "1. \"requirement\": The Transparency Requirement that the annotated "
    "phrase addresses.\n"
    "2. \"value\": The annotated phrase itself, copied verbatim from the "
    "passage (with \"[...]\" marking skipped irrelevant clauses).\n"
    "3. \"performed\": Whether the annotated phrase addresses the "
    "Transparency Requirement positively (true) or explicitly states the "
    "absence of the information (false).\n\n"
    "Your output must be a JSON array following this schema:\n"
)

REPAIR_INSTRUCTION = (
    "Your previous reply could not be parsed. Respond with only a JSON "
    "array following the schema, without any surrounding text."
)


def _label_class_lines() -> str:
    lines = []
    for index, requirement in enumerate(REQUIREMENTS, start=1):
        lines.append(
            f'{index}. "{requirement.value}": {GDPR_REFERENCES[requirement]}, '
            f'e.g. "{LABEL_EXAMPLES[requirement]}"'
        )
    return "\n".join(lines)


def build_system_prompt(layer: str) -> str:
    """Assemble the six prompt components for the given layer."""
    if layer == LAYER_ANNOTATION:
        task = _TASK_ANNOTATION
        guidelines = _GENERAL_GUIDELINES
    elif layer == LAYER_SELF_CORRECTION:
        task = _TASK_SELF_CORRECTION
        guidelines = (
            _SELF_CORRECTION_GUIDELINES_INTRO
            + "\n\n"
            + _GENERAL_GUIDELINES
        )
    else:
        raise ValueError(f"unknown layer {layer!r}")
    schema_text = json.dumps(ANNOTATION_ITEM_SCHEMA, indent=2)
    return "\n\n".join(
        [
            _BACKGROUND,
            task,
            _label_class_lines(),
            guidelines,
            _LINGUISTIC_INSTRUCTIONS,
            _OUTPUT_FORMAT + schema_text,
        ]
    )


@dataclass(frozen=True)
class PromptBundle:
    layer: str
    system_prompt: str
    few_shot: tuple[tuple[str, str], ...]
    schema_text: str

    def __post_init__(self):
        if len(self.few_shot) != 3:
            raise ValueError("prompt bundles carry exactly 3 few-shot pairs")
        missing = [r.value for r in REQUIREMENTS if r.value not in self.system_prompt]
        if missing:
            raise ValueError(f"system prompt missing label names: {missing}")


def _load_few_shot(layer: str) -> tuple[tuple[str, str], ...]:
    raw = resources.files("policyann.data").joinpath("few_shot.json").read_text("utf-8")
    data = json.loads(raw)
    pairs = []
    for example in data[layer]:
        pairs.append(
            (
                json.dumps(example["input"], indent=2, ensure_ascii=False),
                json.dumps(example["output"], indent=2, ensure_ascii=False),
            )
        )
    return tuple(pairs)


def prompt_bundle(layer: str) -> PromptBundle:
    return PromptBundle(
        layer=layer,
        system_prompt=build_system_prompt(layer),
        few_shot=_load_few_shot(layer),
        schema_text=json.dumps(ANNOTATION_ITEM_SCHEMA, indent=2),
    )


def passage_item(
    passage: Passage,
    annotations: Optional[Iterable[Annotation]] = None,
) -> dict:
    """Single-item wire representation; the annotations field is only
    present for the self-correction layer."""
    item = {
        "type": passage.element_type.value,
        "context": [{"text": c.text, "type": c.tag} for c in passage.context],
        "passage": passage.text,
    }
    if annotations is not None:
        item["annotations"] = [
            annotation_to_dict(a) for a in sorted_annotations(annotations)
        ]
    return item


def build_prompt(
    layer: str,
    target: Union[Passage, AnnotatedPassage],
    temperature: Optional[float] = None,
) -> ChatRequest:
    bundle = prompt_bundle(layer)
    if layer == LAYER_SELF_CORRECTION:
        if not isinstance(target, AnnotatedPassage):
            raise ValueError("self-correction requires an annotated passage")
        item = passage_item(target.passage, target.annotations)
    else:
        passage = target.passage if isinstance(target, AnnotatedPassage) else target
        item = passage_item(passage)
    return ChatRequest(
        system_prompt=bundle.system_prompt,
        few_shot=bundle.few_shot,
        user_content=json.dumps(item, indent=2, ensure_ascii=False),
        response_format="json_array",
        temperature=temperature,
    )


@dataclass
class AnnotationRunRecord:
    passage_id: str
    layer: str
    raw_reply: str
    outcome: str  # ok | repaired | failed
    dropped: list[tuple[dict, str]] = field(default_factory=list)
    reason: str = ""

    def __post_init__(self):
        if self.outcome == "failed" and not self.reason:
            raise ValueError("failed runs carry a non-empty reason")

    def to_dict(self) -> dict:
        return {
            "passage_id": self.passage_id,
            "layer": self.layer,
            "outcome": self.outcome,
            "dropped": [
                {"item": item, "reason": reason} for item, reason in self.dropped
            ],
            "reason": self.reason,
        }


def _extract_json_array(raw: str) -> list:
    decoder = json.JSONDecoder()
    for index, char in enumerate(raw):
        if char != "[":
            continue
        try:
            value, _ = decoder.raw_decode(raw[index:])
        except json.JSONDecodeError:
            continue
        if isinstance(value, list):
            return value
    raise Unparseable("no JSON array found in reply")


def parse_llm_annotations(
    raw: str, passage: Passage
) -> tuple[frozenset[Annotation], list[tuple[dict, str]]]:
    """Extract and validate annotations from a model reply.

    Invalid items are dropped with a reason; raises Unparseable when the
    reply contains no JSON array at all.
    """
    items = _extract_json_array(raw)
    annotations: set[Annotation] = set()
    dropped: list[tuple[dict, str]] = []
    for item in items:
        if not isinstance(item, dict):
            dropped.append(({"item": item}, "not an object"))
            continue
        requirement = item.get("requirement")
        value = item.get("value")
        performed = item.get("performed")
        if not isinstance(requirement, str) or requirement not in {
            r.value for r in REQUIREMENTS
        }:
            dropped.append((item, f"unknown label: {requirement!r}"))
            continue
        if not isinstance(value, str) or not value.strip():
            dropped.append((item, "missing or empty value"))
            continue
        if not isinstance(performed, bool):
            dropped.append((item, "performed is not a boolean"))
            continue
        try:
            annotation = Annotation(
                span=value,
                label=TransparencyRequirement(requirement),
                performed=performed,
            )
            validate_annotation(annotation, passage.text)
        except (SpanNotFound, ValueError) as exc:
            dropped.append((item, f"span rejected: {exc}"))
            continue
        annotations.add(annotation)
    return frozenset(annotations), dropped


def _run_layer(
    layer: str,
    target: Union[Passage, AnnotatedPassage],
    llm: ChatProvider,
    fallback: frozenset[Annotation],
) -> tuple[frozenset[Annotation], AnnotationRunRecord]:
    passage = target.passage if isinstance(target, AnnotatedPassage) else target
    request = build_prompt(layer, target)
    reply = llm.complete(request)
    try:
        annotations, dropped = parse_llm_annotations(reply, passage)
        record = AnnotationRunRecord(passage.id, layer, reply, "ok", dropped)
        return annotations, record
    except Unparseable:
        pass

    repair = ChatRequest(
        system_prompt=request.system_prompt,
        few_shot=request.few_shot,
        user_content=request.user_content + "\n\n" + REPAIR_INSTRUCTION,
        response_format=request.response_format,
        temperature=request.temperature,
    )
    reply = llm.complete(repair)
    try:
        annotations, dropped = parse_llm_annotations(reply, passage)
        record = AnnotationRunRecord(passage.id, layer, reply, "repaired", dropped)
        return annotations, record
    except Unparseable as exc:
        record = AnnotationRunRecord(
            passage.id, layer, reply, "failed", [], reason=str(exc)
        )
        return fallback, record


def annotate_passage(
    passage: Passage, llm: ChatProvider
) -> tuple[AnnotatedPassage, AnnotationRunRecord]:
    """First-layer annotation; falls back to an empty set after a failed
    repair attempt."""
    annotations, record = _run_layer(LAYER_ANNOTATION, passage, llm, frozenset())
    return AnnotatedPassage(passage=passage, annotations=annotations), record


def self_correct(
    annotated: AnnotatedPassage, llm: ChatProvider
) -> tuple[AnnotatedPassage, AnnotationRunRecord]:
    """Second-layer review; the reply replaces the annotation set wholesale.
    On double parse failure the input annotations are kept."""
    annotations, record = _run_layer(
        LAYER_SELF_CORRECTION, annotated, llm, annotated.annotations
    )
    return AnnotatedPassage(passage=annotated.passage, annotations=annotations), record


def annotate_document(
    document: PolicyDocument, llm: ChatProvider
) -> tuple[PolicyDocument, list[AnnotationRunRecord]]:
    results = [annotate_passage(p.passage, llm) for p in document.passages]
    return (
        PolicyDocument(
            policy_id=document.policy_id,
            passages=tuple(annotated for annotated, _ in results),
            source_url=document.source_url,
        ),
        [record for _, record in results],
    )


def self_correct_document(
    document: PolicyDocument, llm: ChatProvider
) -> tuple[PolicyDocument, list[AnnotationRunRecord]]:
    results = [self_correct(p, llm) for p in document.passages]
    return (
        PolicyDocument(
            policy_id=document.policy_id,
            passages=tuple(annotated for annotated, _ in results),
            source_url=document.source_url,
        ),
        [record for _, record in results],
    )
