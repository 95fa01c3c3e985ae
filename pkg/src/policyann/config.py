"""Declarative run configuration: one YAML file covering the chat provider,
preprocessing filters, evaluation threshold, sampler and review service."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import yaml

from .errors import ConfigError
from .mockllm import RuleBasedMockChat
from .preprocess.filters import FilterConfig
from .providers import (
    ChatProvider,
    EmbeddingProvider,
    ExactMatchEmbedder,
    HashEmbedder,
    HttpChatProvider,
    ProviderConfig,
)
from .sampler import SamplerConfig

_KNOWN_BLOCKS = frozenset({"provider", "embedder", "filters", "evaluate", "sampler", "review"})


@dataclass(frozen=True)
class ReviewConfig:
    log: str = "review-events.jsonl"
    host: str = "127.0.0.1"
    port: int = 8000
    ui_dir: Optional[str] = None


@dataclass(frozen=True)
class ToolkitConfig:
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    embedder: str = "hash"  # hash | exact | sbert
    filters: FilterConfig = field(default_factory=FilterConfig)
    tau: float = 0.5
    sampler: SamplerConfig = field(default_factory=lambda: SamplerConfig(sample_size=200))
    review: ReviewConfig = field(default_factory=ReviewConfig)

    def make_chat_provider(self) -> ChatProvider:
        if self.provider.kind == "mock":
            return RuleBasedMockChat()
        if self.provider.kind == "http":
            if not self.provider.endpoint:
                raise ConfigError("provider.endpoint", "required for kind 'http'")
            if not self.provider.model:
                raise ConfigError("provider.model", "required for kind 'http'")
            return HttpChatProvider(self.provider)
        raise ConfigError("provider.kind", f"unknown kind {self.provider.kind!r}")

    def make_embedder(self) -> EmbeddingProvider:
        if self.embedder == "hash":
            return HashEmbedder()
        if self.embedder == "exact":
            return ExactMatchEmbedder()
        if self.embedder == "sbert":
            from .providers import make_sbert_embedder

            return make_sbert_embedder()
        raise ConfigError("embedder", f"unknown embedder {self.embedder!r}")


def _require(mapping: dict, block: str, key: str, types, default):
    value = mapping.get(key, default)
    if not isinstance(value, types):
        raise ConfigError(f"{block}.{key}", f"expected {types}, got {value!r}")
    return value


def _block(raw: dict, name: str) -> dict:
    block = raw.get(name, {})
    if block is None:
        return {}
    if not isinstance(block, dict):
        raise ConfigError(name, f"expected a mapping, got {block!r}")
    return block


def load_config(path: Optional[Path | str] = None) -> ToolkitConfig:
    """Parse and validate a YAML config file; without a path the defaults
    apply (mock provider, hash embedder)."""
    if path is None:
        return ToolkitConfig()
    path = Path(path)
    if not path.exists():
        raise ConfigError("$", f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text("utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError("$", f"not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("$", "top level must be a mapping")
    unknown = set(raw) - _KNOWN_BLOCKS
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration block")

    provider_raw = _block(raw, "provider")
    provider = ProviderConfig(
        kind=_require(provider_raw, "provider", "kind", str, "mock"),
        endpoint=_require(provider_raw, "provider", "endpoint", str, ""),
        model=_require(provider_raw, "provider", "model", str, ""),
        api_key_env=_require(provider_raw, "provider", "api_key_env", str, "POLICYANN_API_KEY"),
        timeout=float(_require(provider_raw, "provider", "timeout", (int, float), 60.0)),
        max_retries=_require(provider_raw, "provider", "max_retries", int, 3),
        concurrency=_require(provider_raw, "provider", "concurrency", int, 4),
    )
    if provider.kind not in ("mock", "http"):
        raise ConfigError("provider.kind", f"unknown kind {provider.kind!r}")

    embedder = raw.get("embedder", "hash")
    if not isinstance(embedder, str) or embedder not in ("hash", "exact", "sbert"):
        raise ConfigError("embedder", f"expected one of hash/exact/sbert, got {embedder!r}")

    filters_raw = _block(raw, "filters")
    keywords = filters_raw.get("keywords", [])
    if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
        raise ConfigError("filters.keywords", "expected a list of strings")
    try:
        filters = FilterConfig(
            target_language=_require(filters_raw, "filters", "target_language", str, "en"),
            min_words=_require(filters_raw, "filters", "min_words", int, 50),
            max_words=_require(filters_raw, "filters", "max_words", int, 50_000),
            keyword_requirements=tuple(keywords),
            language_confidence=float(
                _require(filters_raw, "filters", "language_confidence", (int, float), 0.7)
            ),
        )
    except ValueError as exc:
        raise ConfigError("filters", str(exc)) from exc

    eval_raw = _block(raw, "evaluate")
    tau = float(_require(eval_raw, "evaluate", "tau", (int, float), 0.5))
    if not (0.0 <= tau <= 1.0):
        raise ConfigError("evaluate.tau", f"must lie in [0, 1], got {tau}")

    sampler_raw = _block(raw, "sampler")
    k = sampler_raw.get("k", "auto")
    if not (k == "auto" or isinstance(k, int)):
        raise ConfigError("sampler.k", f"expected an integer or 'auto', got {k!r}")
    try:
        sampler = SamplerConfig(
            sample_size=_require(sampler_raw, "sampler", "sample_size", int, 200),
            k=k,
            seed=_require(sampler_raw, "sampler", "seed", int, 0),
            bins=_require(sampler_raw, "sampler", "bins", int, 5),
        )
    except ValueError as exc:
        raise ConfigError("sampler", str(exc)) from exc

    review_raw = _block(raw, "review")
    ui_dir = review_raw.get("ui_dir")
    if ui_dir is not None and not isinstance(ui_dir, str):
        raise ConfigError("review.ui_dir", f"expected a string, got {ui_dir!r}")
    review = ReviewConfig(
        log=_require(review_raw, "review", "log", str, "review-events.jsonl"),
        host=_require(review_raw, "review", "host", str, "127.0.0.1"),
        port=_require(review_raw, "review", "port", int, 8000),
        ui_dir=ui_dir,
    )

    return ToolkitConfig(
        provider=provider,
        embedder=embedder,
        filters=filters,
        tau=tau,
        sampler=sampler,
        review=review,
    )
