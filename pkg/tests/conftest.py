import json
from pathlib import Path

import pytest

from policyann.model import (
    AnnotatedPassage,
    Annotation,
    ElementType,
    Passage,
    TransparencyRequirement,
)

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def basic_html() -> str:
    return (FIXTURES / "basic.html").read_text("utf-8")


def make_passage(text: str, element_type=ElementType.TEXT, pid: str = "p1") -> Passage:
    return Passage(element_type=element_type, context=(), text=text, id=pid)


def make_annotation(span: str, label: str, performed: bool = True) -> Annotation:
    return Annotation(span=span, label=TransparencyRequirement(label), performed=performed)


def annotated(text: str, *annotations: Annotation, pid: str = "p1") -> AnnotatedPassage:
    return AnnotatedPassage(passage=make_passage(text, pid=pid), annotations=frozenset(annotations))


def load_json(path: Path):
    return json.loads(path.read_text("utf-8"))
