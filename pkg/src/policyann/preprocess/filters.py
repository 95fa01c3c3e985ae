"""Language/length/keyword filtering and the LLM-backed policy detector."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Protocol

from ..providers import ChatProvider, ChatRequest
from .dedup import RejectionRecord

DETECTOR_PROMPT = (
    "Your task is to analyse a given text snippet and determine if the "
    "excerpt is likely part of a privacy policy.\n\n"
    "Respond with only a single word, omit any additional explanations or "
    "context:\n\n"
    "- 'true' if the excerpt is likely to be from a privacy policy,\n"
    "- 'false' if it likely is not, and\n"
    "- 'unknown' if there's not enough information to decide.\n"
)

# Length of the text segment forwarded to the detector model.
DETECTOR_SEGMENT_CHARS = 1500


@dataclass(frozen=True)
class FilterConfig:
    target_language: str = "en"
    min_words: int = 50
    max_words: int = 50_000
    keyword_requirements: tuple[str, ...] = ()
    dedup_enabled: bool = True
    language_confidence: float = 0.7

    def __post_init__(self):
        if not (0 < self.min_words < self.max_words):
            raise ValueError("require 0 < min_words < max_words")
        object.__setattr__(self, "keyword_requirements", tuple(self.keyword_requirements))


class LanguageDetector(Protocol):
    def detect(self, text: str) -> tuple[str, float]:
        """Return (language code, confidence in [0, 1])."""
        ...


_STOPWORDS = {
    "en": {
        "the", "and", "of", "to", "in", "that", "is", "we", "you", "your",
        "for", "with", "are", "this", "not", "our", "or", "as", "by", "on",
        "be", "will", "may", "have", "it", "from", "can", "us", "any", "if",
    },
    "de": {
        "der", "die", "das", "und", "zu", "den", "von", "sie", "ist", "des",
        "sich", "mit", "dem", "dass", "er", "es", "ein", "ich", "auf", "so",
        "eine", "auch", "als", "an", "nach", "wie", "im", "für", "wir", "nicht",
    },
    "fr": {
        "le", "la", "les", "de", "des", "et", "est", "vous", "nous", "une",
        "un", "du", "que", "qui", "dans", "pour", "pas", "sur", "ce", "votre",
        "au", "aux", "avec", "ne", "se", "sont", "plus", "par", "vos", "ou",
    },
    "es": {
        "el", "la", "los", "las", "de", "y", "que", "en", "un", "una",
        "es", "no", "con", "por", "para", "su", "se", "del", "al", "como",
        "más", "o", "sus", "le", "lo", "si", "nos", "usted", "este", "esta",
    },
}


class StopwordLanguageDetector:
    """Lightweight language identification from stopword frequencies.

    Confidence is the share of stopword hits won by the top language, which
    is high for clean monolingual text and low for short or mixed input.
    """

    def __init__(self, languages: Optional[dict[str, set[str]]] = None):
        self.languages = languages or _STOPWORDS

    def detect(self, text: str) -> tuple[str, float]:
        tokens = [t.strip(".,;:!?()[]\"'").lower() for t in text.split()]
        tokens = [t for t in tokens if t]
        if not tokens:
            return "und", 0.0
        hits = {
            code: sum(1 for t in tokens if t in words)
            for code, words in self.languages.items()
        }
        total = sum(hits.values())
        if total == 0:
            return "und", 0.0
        code = max(hits, key=lambda c: (hits[c], c))
        return code, hits[code] / total


def apply_filters(
    main_text: str,
    config: FilterConfig,
    detector: Optional[LanguageDetector] = None,
    doc_id: str = "",
) -> Optional[RejectionRecord]:
    """Return a RejectionRecord when the text fails a filter, else None."""
    detector = detector or StopwordLanguageDetector()

    code, confidence = detector.detect(main_text)
    if code != config.target_language or confidence < config.language_confidence:
        return RejectionRecord(
            doc_id, "language",
            f"detected {code!r} with confidence {confidence:.2f}, "
            f"want {config.target_language!r} at >= {config.language_confidence}",
        )

    word_count = len(main_text.split())
    if not (config.min_words <= word_count <= config.max_words):
        return RejectionRecord(
            doc_id, "length",
            f"{word_count} words outside [{config.min_words}, {config.max_words}]",
        )

    lowered = main_text.lower()
    for keyword in config.keyword_requirements:
        if keyword.lower() not in lowered:
            return RejectionRecord(doc_id, "keyword", f"required keyword absent: {keyword!r}")

    return None


def detect_privacy_policy(main_text: str, llm: ChatProvider) -> str:
    """Classify a text segment as 'true', 'false' or 'unknown'.

    The reply is trimmed and lowercased; anything outside the three expected
    words maps to 'unknown'.
    """
    if not main_text.strip():
        raise ValueError("main_text must be non-empty")
    request = ChatRequest(
        system_prompt=DETECTOR_PROMPT,
        few_shot=(),
        user_content=main_text[:DETECTOR_SEGMENT_CHARS],
        response_format="free_text",
    )
    reply = llm.complete(request).strip().lower()
    return reply if reply in ("true", "false", "unknown") else "unknown"
