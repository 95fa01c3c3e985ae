import json

import pytest
from hypothesis import given, strategies as st

from policyann.errors import InvalidAnnotation, SchemaViolation, SpanNotFound
from policyann.model import (
    CONTEXT_TAGS,
    DISCONTINUITY,
    GDPR_REFERENCES,
    LABEL_COLORS,
    REQUIREMENT_NAMES,
    REQUIREMENTS,
    AnnotatedPassage,
    Annotation,
    ContextElement,
    ElementType,
    Passage,
    PolicyDocument,
    TransparencyRequirement,
    parse_policy,
    serialize_policy,
    span_segments,
    validate_annotation,
)

from conftest import annotated, make_annotation, make_passage


class TestTaxonomy:
    def test_exactly_21_labels(self):
        assert len(REQUIREMENTS) == 21
        assert len(set(REQUIREMENT_NAMES)) == 21

    def test_every_label_has_reference_and_color(self):
        assert set(GDPR_REFERENCES) == set(REQUIREMENTS)
        assert set(LABEL_COLORS) == set(REQUIREMENTS)
        assert len(set(LABEL_COLORS.values())) == 21

    def test_canonical_names(self):
        assert TransparencyRequirement("Legal Basis for Processing")
        assert TransparencyRequirement("Right to Lodge Complaint")
        with pytest.raises(ValueError):
            TransparencyRequirement("Legal Basis")

    def test_from_string_rejects_unknown(self):
        with pytest.raises(KeyError):
            TransparencyRequirement.from_string("Cookies")


class TestSpanValidation:
    def test_contiguous_span(self):
        a = make_annotation("your name", "Data Categories")
        assert validate_annotation(a, "we collect your name and age") == [(11, 20)]

    def test_discontinuous_span(self):
        text = "determine, if necessary, the cause of crashes"
        a = make_annotation("determine [...] the cause of crashes", "Processing Purpose")
        ranges = validate_annotation(a, text)
        start = text.index("the cause")
        assert ranges == [(0, len("determine")), (start, start + len("the cause of crashes"))]

    def test_segments_trimmed_around_placeholder(self):
        assert span_segments("a [...] b") == ["a", "b"]
        assert span_segments(f"a{DISCONTINUITY}b") == ["a", "b"]

    def test_exact_match_is_case_sensitive(self):
        a = make_annotation("Your Name", "Data Categories")
        with pytest.raises(SpanNotFound):
            validate_annotation(a, "we collect your name")

    def test_segments_must_occur_in_order(self):
        a = make_annotation("b [...] a", "Data Categories")
        with pytest.raises(SpanNotFound):
            validate_annotation(a, "a then b")

    def test_leftmost_match_after_previous_end(self):
        text = "we use data and we use data again"
        a = make_annotation("we use data [...] we use data", "Processing Purpose")
        assert validate_annotation(a, text) == [(0, 11), (16, 27)]

    def test_empty_segment_rejected(self):
        with pytest.raises(ValueError):
            make_annotation("a [...] ", "Data Categories")

    def test_annotated_passage_rejects_bad_span(self):
        with pytest.raises(InvalidAnnotation):
            annotated("short text", make_annotation("absent", "Data Categories"))


class TestSetSemantics:
    def test_annotations_are_a_set(self):
        a = make_annotation("your name", "Data Categories")
        b = make_annotation("your name", "Data Categories")
        ap = annotated("we collect your name", a, b)
        assert len(ap.annotations) == 1

    def test_same_span_different_label_kept(self):
        text = "we promote our business through marketing"
        a = make_annotation("marketing", "Processing Purpose")
        b = make_annotation("marketing", "Legitimate Interests for Processing")
        ap = annotated(text, a, b)
        assert len(ap.annotations) == 2

    def test_duplicate_passage_ids_rejected(self):
        p = annotated("some text", pid="x")
        with pytest.raises(ValueError):
            PolicyDocument(policy_id="p", passages=(p, p))


def _doc_items():
    return [
        {
            "type": "headline",
            "context": [],
            "passage": "Your rights",
            "annotations": [],
        },
        {
            "type": "text",
            "context": [{"text": "Your rights", "type": "h2"}],
            "passage": "You have the right to access and delete your data.",
            "annotations": [
                {
                    "requirement": "Right to Access",
                    "value": "right to access [...] your data",
                    "performed": True,
                },
                {
                    "requirement": "Right to Erasure",
                    "value": "right to [...] delete your data",
                    "performed": True,
                },
            ],
        },
    ]


class TestWireFormat:
    def test_parse_round_trip_fixpoint(self):
        blob = json.dumps(_doc_items())
        doc = parse_policy(blob, "p")
        once = serialize_policy(doc)
        twice = serialize_policy(parse_policy(once, "p"))
        assert once == twice

    def test_serialization_is_utf8_with_trailing_newline(self):
        items = _doc_items()
        items[0]["passage"] = "Ihre Rechte — Überblick"
        doc = parse_policy(json.dumps(items), "p")
        blob = serialize_policy(doc)
        assert blob.endswith(b"\n")
        assert "Überblick" in blob.decode("utf-8")

    def test_unknown_field_rejected_with_path(self):
        items = _doc_items()
        items[1]["annotations"][0]["note"] = "extra"
        with pytest.raises(SchemaViolation) as info:
            parse_policy(json.dumps(items), "p")
        assert "items[1].annotations[0]" in info.value.path

    def test_unknown_label_rejected(self):
        items = _doc_items()
        items[1]["annotations"][0]["requirement"] = "Cookie Usage"
        with pytest.raises(SchemaViolation):
            parse_policy(json.dumps(items), "p")

    def test_unknown_element_type_rejected(self):
        items = _doc_items()
        items[0]["type"] = "paragraph"
        with pytest.raises(SchemaViolation):
            parse_policy(json.dumps(items), "p")

    def test_span_mismatch_reported_at_annotation_path(self):
        items = _doc_items()
        items[1]["annotations"][1]["value"] = "right to be forgotten"
        with pytest.raises(SchemaViolation) as info:
            parse_policy(json.dumps(items), "p")
        assert info.value.path == "items[1].annotations[1].value"

    def test_not_json_rejected(self):
        with pytest.raises(SchemaViolation):
            parse_policy("not json", "p")

    def test_context_tags_closed_set(self):
        items = _doc_items()
        items[1]["context"][0]["type"] = "section"
        with pytest.raises(SchemaViolation):
            parse_policy(json.dumps(items), "p")


@given(
    st.lists(
        st.sampled_from(sorted(CONTEXT_TAGS)),
        max_size=4,
    )
)
def test_context_round_trip(tags):
    items = [
        {
            "type": "text",
            "context": [{"text": f"heading {i}", "type": tag} for i, tag in enumerate(tags)],
            "passage": "a passage",
            "annotations": [],
        }
    ]
    doc = parse_policy(json.dumps(items), "p")
    assert serialize_policy(parse_policy(serialize_policy(doc), "p")) == serialize_policy(doc)
