"""Chat-completion and embedding provider contracts, an OpenAI-style HTTP
backend, and deterministic mock implementations for offline runs."""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

import numpy as np

from .errors import ProviderUnavailable, ResponseTooLong


@dataclass(frozen=True)
class ChatRequest:
    system_prompt: str
    few_shot: tuple[tuple[str, str], ...] = ()
    user_content: str = ""
    response_format: str = "free_text"  # free_text | json_array
    temperature: Optional[float] = None  # None forwards the provider default

    def __post_init__(self):
        object.__setattr__(self, "few_shot", tuple(tuple(pair) for pair in self.few_shot))
        if self.response_format not in ("free_text", "json_array"):
            raise ValueError(f"unknown response format {self.response_format!r}")


def request_fingerprint(request: ChatRequest) -> str:
    """Stable hash over the full request, used as a cache/canned-reply key."""
    payload = json.dumps(
        {
            "system": request.system_prompt,
            "few_shot": list(request.few_shot),
            "user": request.user_content,
            "format": request.response_format,
            "temperature": request.temperature,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class ChatProvider(Protocol):
    def complete(self, request: ChatRequest) -> str: ...


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


@dataclass
class ProviderConfig:
    kind: str = "mock"
    endpoint: str = ""
    model: str = ""
    api_key_env: str = "POLICYANN_API_KEY"
    timeout: float = 60.0
    max_retries: int = 3
    concurrency: int = 4
    temperature: Optional[float] = None

    @classmethod
    def from_env(cls) -> "ProviderConfig":
        return cls(
            kind="http",
            endpoint=os.environ.get("POLICYANN_ENDPOINT", ""),
            model=os.environ.get("POLICYANN_MODEL", ""),
        )


class HttpChatProvider:
    """OpenAI-compatible chat completions backend.

    Transport failures are retried with exponential backoff up to
    `max_retries` attempts before ProviderUnavailable is raised.
    """

    def __init__(self, config: ProviderConfig, backoff_base: float = 0.5):
        import httpx

        self.config = config
        self.backoff_base = backoff_base
        headers = {}
        api_key = os.environ.get(config.api_key_env, "")
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._client = httpx.Client(
            base_url=config.endpoint, timeout=config.timeout, headers=headers
        )
        self._semaphore = threading.Semaphore(max(1, config.concurrency))

    def complete(self, request: ChatRequest) -> str:
        messages = [{"role": "system", "content": request.system_prompt}]
        for shot_in, shot_out in request.few_shot:
            messages.append({"role": "user", "content": shot_in})
            messages.append({"role": "assistant", "content": shot_out})
        messages.append({"role": "user", "content": request.user_content})
        body: dict = {"model": self.config.model, "messages": messages}
        if request.temperature is not None:
            body["temperature"] = request.temperature
        elif self.config.temperature is not None:
            body["temperature"] = self.config.temperature

        last_error: Optional[Exception] = None
        for attempt in range(self.config.max_retries):
            try:
                with self._semaphore:
                    response = self._client.post("/chat/completions", json=body)
                response.raise_for_status()
                data = response.json()
                choice = data["choices"][0]
                if choice.get("finish_reason") == "length":
                    raise ResponseTooLong("completion truncated by the backend")
                return choice["message"]["content"]
            except ResponseTooLong:
                raise
            except Exception as exc:  # transport or protocol failure
                last_error = exc
                if attempt + 1 < self.config.max_retries:
                    time.sleep(self.backoff_base * (2 ** attempt))
        raise ProviderUnavailable(
            f"chat backend unreachable after {self.config.max_retries} attempts: {last_error}"
        )


class CannedChatProvider:
    """Replies from a fixed map of request fingerprints; byte-identical
    across runs."""

    def __init__(self, replies: dict[str, str], default: Optional[str] = None):
        self.replies = dict(replies)
        self.default = default
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        key = request_fingerprint(request)
        if key in self.replies:
            return self.replies[key]
        if self.default is not None:
            return self.default
        raise ProviderUnavailable(f"no canned reply for request {key[:12]}")


class ScriptedChatProvider:
    """Returns pre-scripted replies in order; callables raise on demand."""

    def __init__(self, replies: Sequence[str | Callable[[], str]]):
        self._replies = list(replies)
        self.requests: list[ChatRequest] = []

    def complete(self, request: ChatRequest) -> str:
        self.requests.append(request)
        if not self._replies:
            raise ProviderUnavailable("script exhausted")
        reply = self._replies.pop(0)
        return reply() if callable(reply) else reply


class FailingChatProvider:
    def __init__(self, attempts_seen: Optional[list] = None):
        self.attempts_seen = attempts_seen if attempts_seen is not None else []

    def complete(self, request: ChatRequest) -> str:
        self.attempts_seen.append(request)
        raise ProviderUnavailable("backend configured to fail")


class HashEmbedder:
    """Deterministic bag-of-tokens embedding for tests and offline runs.

    Each token adds weight to one dimension chosen by a stable hash, so
    identical texts embed identically and disjoint token sets are orthogonal
    up to hash collisions. Vectors are unit-normalized.
    """

    def __init__(self, dimension: int = 256):
        self.dimension = dimension
        self._cache: dict[str, np.ndarray] = {}
        self._lock = threading.Lock()

    @staticmethod
    def _tokens(text: str) -> list[str]:
        tokens = [t.strip(".,;:!?()[]{}\"'").lower() for t in text.split()]
        return [t for t in tokens if t]

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise ValueError("cannot embed empty text")
        with self._lock:
            cached = self._cache.get(text)
            if cached is not None:
                return cached
        vector = np.zeros(self.dimension)
        tokens = self._tokens(text) or [text]
        for token in tokens:
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
            vector[int.from_bytes(digest, "big") % self.dimension] += 1.0
        vector /= np.linalg.norm(vector)
        with self._lock:
            self._cache[text] = vector
        return vector


class ExactMatchEmbedder:
    """One-hot embedding of the whole (whitespace-normalized) text: cosine 1
    for identical texts, 0 otherwise (up to hash collisions)."""

    def __init__(self, dimension: int = 4096):
        self.dimension = dimension

    def embed(self, text: str) -> np.ndarray:
        if not text.strip():
            raise ValueError("cannot embed empty text")
        normalized = " ".join(text.split()).lower()
        digest = hashlib.blake2b(normalized.encode("utf-8"), digest_size=8).digest()
        vector = np.zeros(self.dimension)
        vector[int.from_bytes(digest, "big") % self.dimension] = 1.0
        return vector


def make_sbert_embedder(model_name: str = "all-MiniLM-L6-v2"):
    """Sentence-transformers backend; imported lazily because it pulls in
    torch and may download model weights."""
    from sentence_transformers import SentenceTransformer

    model = SentenceTransformer(model_name)
    dimension = model.get_sentence_embedding_dimension()

    class _SbertEmbedder:
        def __init__(self):
            self.dimension = dimension
            self._cache: dict[str, np.ndarray] = {}
            self._lock = threading.Lock()

        def embed(self, text: str) -> np.ndarray:
            with self._lock:
                cached = self._cache.get(text)
            if cached is not None:
                return cached
            vector = np.asarray(model.encode([text])[0], dtype=float)
            norm = np.linalg.norm(vector)
            if norm > 0:
                vector = vector / norm
            with self._lock:
                self._cache[text] = vector
            return vector

    return _SbertEmbedder()
