"""HTML-to-passages preprocessing: dedup, main-content isolation, filtering,
structure simplification and passage parsing."""

from .dedup import RawDocument, RejectionRecord, dedup_corpus, normalize_main_text
from .filters import (
    FilterConfig,
    StopwordLanguageDetector,
    apply_filters,
    detect_privacy_policy,
)
from .main_content import isolate_main_content
from .passages import parse_passages
from .simplify import simplify_html

__all__ = [
    "RawDocument",
    "RejectionRecord",
    "FilterConfig",
    "StopwordLanguageDetector",
    "dedup_corpus",
    "normalize_main_text",
    "isolate_main_content",
    "apply_filters",
    "detect_privacy_policy",
    "simplify_html",
    "parse_passages",
]
