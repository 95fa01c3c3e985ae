import numpy as np
import pytest

from policyann.errors import ProviderUnavailable, ResponseTooLong
from policyann.providers import (
    CannedChatProvider,
    ChatRequest,
    ExactMatchEmbedder,
    FailingChatProvider,
    HashEmbedder,
    HttpChatProvider,
    ProviderConfig,
    ScriptedChatProvider,
    request_fingerprint,
)


class TestChatRequest:
    def test_fingerprint_stable_and_sensitive(self):
        a = ChatRequest(system_prompt="s", user_content="u")
        b = ChatRequest(system_prompt="s", user_content="u")
        c = ChatRequest(system_prompt="s", user_content="v")
        assert request_fingerprint(a) == request_fingerprint(b)
        assert request_fingerprint(a) != request_fingerprint(c)

    def test_unknown_format_rejected(self):
        with pytest.raises(ValueError):
            ChatRequest(system_prompt="s", response_format="xml")


class TestMockProviders:
    def test_canned_replies_by_fingerprint(self):
        request = ChatRequest(system_prompt="s", user_content="u")
        provider = CannedChatProvider({request_fingerprint(request): "reply"})
        assert provider.complete(request) == "reply"
        with pytest.raises(ProviderUnavailable):
            provider.complete(ChatRequest(system_prompt="other"))

    def test_scripted_in_order_then_exhausted(self):
        provider = ScriptedChatProvider(["a", "b"])
        request = ChatRequest(system_prompt="s")
        assert provider.complete(request) == "a"
        assert provider.complete(request) == "b"
        with pytest.raises(ProviderUnavailable):
            provider.complete(request)

    def test_failing_provider_records_attempts(self):
        provider = FailingChatProvider()
        with pytest.raises(ProviderUnavailable):
            provider.complete(ChatRequest(system_prompt="s"))
        assert len(provider.attempts_seen) == 1


class TestHttpProvider:
    @pytest.fixture
    def transport_factory(self, monkeypatch):
        """Patch httpx.Client to a MockTransport-backed client."""
        import httpx

        def install(handler):
            calls = []

            def wrapped(request):
                calls.append(request)
                return handler(request)

            real_client = httpx.Client

            def fake_client(**kwargs):
                kwargs.pop("base_url", None)
                return real_client(
                    base_url="http://test", transport=httpx.MockTransport(wrapped), **kwargs
                )

            monkeypatch.setattr(httpx, "Client", fake_client)
            return calls

        return install

    @staticmethod
    def provider():
        return HttpChatProvider(
            ProviderConfig(kind="http", endpoint="http://test", model="m", max_retries=3),
            backoff_base=0.0,
        )

    def test_messages_include_few_shot_pairs(self, transport_factory):
        import httpx

        captured = transport_factory(
            lambda request: httpx.Response(
                200,
                json={"choices": [{"message": {"content": "ok"}, "finish_reason": "stop"}]},
            )
        )
        request = ChatRequest(
            system_prompt="sys", few_shot=(("q1", "a1"), ("q2", "a2")), user_content="u"
        )
        assert self.provider().complete(request) == "ok"
        import json

        body = json.loads(captured[0].content)
        roles = [m["role"] for m in body["messages"]]
        assert roles == ["system", "user", "assistant", "user", "assistant", "user"]

    def test_retries_then_unavailable(self, transport_factory):
        import httpx

        calls = transport_factory(lambda request: httpx.Response(503))
        with pytest.raises(ProviderUnavailable):
            self.provider().complete(ChatRequest(system_prompt="s"))
        assert len(calls) == 3

    def test_truncated_reply_raises(self, transport_factory):
        import httpx

        transport_factory(
            lambda request: httpx.Response(
                200,
                json={"choices": [{"message": {"content": "x"}, "finish_reason": "length"}]},
            )
        )
        with pytest.raises(ResponseTooLong):
            self.provider().complete(ChatRequest(system_prompt="s"))


class TestEmbedders:
    def test_hash_embedder_deterministic_unit_norm(self):
        embedder = HashEmbedder()
        v1 = embedder.embed("we collect your data")
        v2 = embedder.embed("we collect your data")
        assert np.allclose(v1, v2)
        assert np.isclose(np.linalg.norm(v1), 1.0)

    def test_hash_embedder_overlap_orders_similarity(self):
        embedder = HashEmbedder()
        a = embedder.embed("your e-mail address")
        b = embedder.embed("your e-mail address and name")
        c = embedder.embed("completely unrelated words here")
        assert float(a @ b) > float(a @ c)

    def test_hash_embedder_rejects_empty(self):
        with pytest.raises(ValueError):
            HashEmbedder().embed("   ")

    def test_exact_match_embedder_is_one_hot(self):
        embedder = ExactMatchEmbedder()
        a = embedder.embed("Same  Text")
        b = embedder.embed("same text")
        c = embedder.embed("different text")
        assert float(a @ b) == 1.0
        assert float(a @ c) == 0.0
