"""Three-stage corpus deduplication: URL grouping, raw-byte hashing and
normalized main-text hashing."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Optional

REJECTION_STAGES = frozenset(
    {"main_content", "language", "length", "duplicate", "detector", "keyword"}
)

_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class RawDocument:
    doc_id: str
    bytes: bytes
    url: Optional[str] = None
    fetched_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc), compare=False
    )

    def __post_init__(self):
        if not self.bytes:
            raise ValueError("raw document payload must be non-empty")


@dataclass(frozen=True)
class RejectionRecord:
    doc_id: str
    stage: str
    detail: str

    def __post_init__(self):
        if self.stage not in REJECTION_STAGES:
            raise ValueError(f"unknown rejection stage {self.stage!r}")


def normalize_main_text(text: str) -> str:
    """Normalization used for stage-3 equality: lowercase, collapsed whitespace."""
    return _WS_RE.sub(" ", text.lower()).strip()


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def dedup_corpus(
    docs: list[RawDocument],
    main_text_fn: Optional[Callable[[RawDocument], str]] = None,
) -> tuple[list[RawDocument], list[RejectionRecord]]:
    """Drop duplicate documents; the first-seen document always wins.

    Stage 1 groups by identical URL, stage 2 by raw-byte hash. Stage 3
    (normalized main-text hash) only runs when `main_text_fn` is given; a
    document for which main-text extraction fails is passed through for the
    downstream main_content stage to reject.
    """
    kept: list[RawDocument] = []
    rejections: list[RejectionRecord] = []

    seen_urls: set[str] = set()
    seen_raw: set[str] = set()
    seen_text: set[str] = set()

    for doc in docs:
        if doc.url is not None:
            if doc.url in seen_urls:
                rejections.append(
                    RejectionRecord(doc.doc_id, "duplicate", f"url already seen: {doc.url}")
                )
                continue
            seen_urls.add(doc.url)

        raw_hash = _sha256(doc.bytes)
        if raw_hash in seen_raw:
            rejections.append(
                RejectionRecord(doc.doc_id, "duplicate", f"identical raw bytes ({raw_hash[:12]})")
            )
            continue
        seen_raw.add(raw_hash)

        if main_text_fn is not None:
            try:
                main_text = main_text_fn(doc)
            except Exception:
                kept.append(doc)
                continue
            text_hash = _sha256(normalize_main_text(main_text).encode("utf-8"))
            if text_hash in seen_text:
                rejections.append(
                    RejectionRecord(
                        doc.doc_id, "duplicate", f"identical main text ({text_hash[:12]})"
                    )
                )
                continue
            seen_text.add(text_hash)

        kept.append(doc)

    return kept, rejections
