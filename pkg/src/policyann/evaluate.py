"""Two-tiered evaluation: label-level multi-label metrics and span-level
hybrid-similarity matching with micro precision/recall/F1."""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .model import (
    AnnotatedPassage,
    Annotation,
    REQUIREMENTS,
    TransparencyRequirement,
    labels_of,
)
from .providers import EmbeddingProvider, HashEmbedder

_PUNCT = string.punctuation


def span_tokens(span: str) -> frozenset[str]:
    """Tokenize for word-overlap: lowercase, whitespace split, strip leading
    and trailing punctuation, drop placeholders and empty tokens."""
    tokens = []
    for token in span.lower().split():
        token = token.strip(_PUNCT)
        if token:
            tokens.append(token)
    return frozenset(tokens)


def jaccard(span_a: str, span_b: str) -> float:
    a, b = span_tokens(span_a), span_tokens(span_b)
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    return len(a & b) / len(a | b)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def span_similarity(span_a: str, span_b: str, embedder: EmbeddingProvider) -> float:
    """Mean of token Jaccard and embedding cosine, the cosine clamped at 0
    so the score stays in [0, 1]."""
    semantic = max(0.0, cosine(embedder.embed(span_a), embedder.embed(span_b)))
    return (jaccard(span_a, span_b) + semantic) / 2.0


@dataclass
class EvalConfig:
    tau: float = 0.5
    embedder: EmbeddingProvider = field(default_factory=HashEmbedder)
    require_performed_match: bool = False  # strict mode: b must also agree

    def __post_init__(self):
        if not (0.0 <= self.tau <= 1.0):
            raise ValueError("tau must lie in [0, 1]")


@dataclass(frozen=True)
class EvalCounts:
    tp_o: frozenset[Annotation]
    tp_gt: frozenset[Annotation]
    fp: frozenset[Annotation]
    fn: frozenset[Annotation]


def match_annotations(
    predicted: Iterable[Annotation],
    ground_truth: Iterable[Annotation],
    config: EvalConfig,
) -> EvalCounts:
    """Existential matching: a predicted annotation is a true positive iff
    some ground-truth annotation shares its label and exceeds the similarity
    threshold (strictly), and symmetrically for ground truth. No one-to-one
    assignment is made."""
    predicted = frozenset(predicted)
    ground_truth = frozenset(ground_truth)

    def matches(a: Annotation, b: Annotation) -> bool:
        if a.label is not b.label:
            return False
        if config.require_performed_match and a.performed != b.performed:
            return False
        return span_similarity(a.span, b.span, config.embedder) > config.tau

    tp_o = frozenset(
        a for a in predicted if any(matches(a, g) for g in ground_truth)
    )
    tp_gt = frozenset(
        g for g in ground_truth if any(matches(p, g) for p in predicted)
    )
    return EvalCounts(
        tp_o=tp_o,
        tp_gt=tp_gt,
        fp=predicted - tp_o,
        fn=ground_truth - tp_gt,
    )


@dataclass(frozen=True)
class Prf:
    precision: float
    recall: float
    f1: float
    support: int
    degenerate: bool = False


def _prf(tp_o: int, fp: int, tp_gt: int, fn: int) -> Prf:
    degenerate = (tp_o + fp == 0) or (tp_gt + fn == 0)
    precision = tp_o / (tp_o + fp) if tp_o + fp else 0.0
    recall = tp_gt / (tp_gt + fn) if tp_gt + fn else 0.0
    f1 = (
        2.0 / (1.0 / precision + 1.0 / recall)
        if precision > 0 and recall > 0
        else 0.0
    )
    return Prf(precision, recall, f1, support=tp_gt + fn, degenerate=degenerate)


@dataclass(frozen=True)
class MetricsReport:
    level: str  # label | span
    overall: Prf
    per_label: dict[TransparencyRequirement, Prf]
    tau: Optional[float] = None
    layer: Optional[str] = None

    @property
    def precision(self) -> float:
        return self.overall.precision

    @property
    def recall(self) -> float:
        return self.overall.recall

    @property
    def f1(self) -> float:
        return self.overall.f1

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "layer": self.layer,
            "tau": self.tau,
            "precision": self.overall.precision,
            "recall": self.overall.recall,
            "f1": self.overall.f1,
            "degenerate": self.overall.degenerate,
            "per_label": {
                label.value: {
                    "precision": prf.precision,
                    "recall": prf.recall,
                    "f1": prf.f1,
                    "support": prf.support,
                    "degenerate": prf.degenerate,
                }
                for label, prf in self.per_label.items()
            },
        }


PassagePair = tuple[Iterable[Annotation], Iterable[Annotation]]


def span_metrics(
    pairs: Sequence[PassagePair],
    config: EvalConfig,
    layer: Optional[str] = None,
) -> MetricsReport:
    """Micro-aggregate span-level counts over all passages, overall and per
    label."""
    counts = [match_annotations(pred, gt, config) for pred, gt in pairs]

    def tally(label: Optional[TransparencyRequirement]) -> tuple[int, int, int, int]:
        def sel(annotations: frozenset[Annotation]) -> int:
            if label is None:
                return len(annotations)
            return sum(1 for a in annotations if a.label is label)

        return (
            sum(sel(c.tp_o) for c in counts),
            sum(sel(c.fp) for c in counts),
            sum(sel(c.tp_gt) for c in counts),
            sum(sel(c.fn) for c in counts),
        )

    overall = _prf(*tally(None))
    per_label = {label: _prf(*tally(label)) for label in REQUIREMENTS}
    return MetricsReport(
        level="span", overall=overall, per_label=per_label, tau=config.tau, layer=layer
    )


LabelPair = tuple[AnnotatedPassage, AnnotatedPassage]


def label_metrics(
    pairs: Sequence[LabelPair],
    layer: Optional[str] = None,
) -> MetricsReport:
    """Micro-averaged multi-label metrics over (passage, label) cells; true
    negatives are never used."""
    cells: list[tuple[TransparencyRequirement, bool, bool]] = []
    for predicted, ground_truth in pairs:
        pred_labels = labels_of(predicted)
        gt_labels = labels_of(ground_truth)
        for label in REQUIREMENTS:
            cells.append((label, label in pred_labels, label in gt_labels))

    def tally(label: Optional[TransparencyRequirement]) -> tuple[int, int, int, int]:
        tp = fp = fn = 0
        for cell_label, in_pred, in_gt in cells:
            if label is not None and cell_label is not label:
                continue
            if in_pred and in_gt:
                tp += 1
            elif in_pred:
                fp += 1
            elif in_gt:
                fn += 1
        return tp, fp, tp, fn

    overall = _prf(*tally(None))
    per_label = {label: _prf(*tally(label)) for label in REQUIREMENTS}
    return MetricsReport(level="label", overall=overall, per_label=per_label, layer=layer)


def report_text(report: MetricsReport) -> str:
    """Plain-text summary table."""
    lines = [
        f"{report.level}-level metrics"
        + (f" ({report.layer} layer)" if report.layer else "")
        + (f", tau={report.tau}" if report.tau is not None else ""),
        f"  overall  P={report.precision:.3f}  R={report.recall:.3f}  F1={report.f1:.3f}"
        + ("  [degenerate]" if report.overall.degenerate else ""),
        "  per label:",
    ]
    for label, prf in report.per_label.items():
        if prf.support == 0 and prf.precision == 0 and prf.recall == 0:
            continue
        lines.append(
            f"    {label.value:<38} P={prf.precision:.3f}  R={prf.recall:.3f}  "
            f"F1={prf.f1:.3f}  n={prf.support}"
        )
    return "\n".join(lines)
