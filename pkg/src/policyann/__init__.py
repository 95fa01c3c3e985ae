"""Toolkit for LLM-assisted annotation of GDPR transparency requirements in
privacy policies: preprocessing, two-layer annotation, evaluation, sampling
and dual-review curation."""

from .errors import PolicyAnnError
from .model import (
    AnnotatedPassage,
    Annotation,
    ContextElement,
    ElementType,
    Passage,
    PolicyDocument,
    TransparencyRequirement,
    parse_policy,
    serialize_policy,
    validate_annotation,
)

__version__ = "0.1.0"

__all__ = [
    "PolicyAnnError",
    "AnnotatedPassage",
    "Annotation",
    "ContextElement",
    "ElementType",
    "Passage",
    "PolicyDocument",
    "TransparencyRequirement",
    "parse_policy",
    "serialize_policy",
    "validate_annotation",
    "__version__",
]
