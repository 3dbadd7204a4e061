"""HTTP clients for the production providers.

Credentials and endpoints come from environment variables only (API keys
never live in config files):

    OPENAI_API_KEY                 chat completion + embeddings
    OPENAI_BASE_URL                default https://api.openai.com/v1
    LATERALPROBE_CHAT_MODEL        default gpt-3.5-turbo
    LATERALPROBE_EMBEDDING_MODEL   default text-embedding-ada-002
    SEARCH_API_KEY                 web search subscription key
    SEARCH_ENDPOINT                default https://api.bing.microsoft.com/v7.0/search
    LATERALPROBE_SEARCH_MARKET     optional pass-through (e.g. en-US)
    LATERALPROBE_SEARCH_FRESHNESS  optional pass-through (Day | Week | Month)
    LATERALPROBE_SEARCH_SAFESEARCH optional pass-through (Off | Moderate | Strict)

Transient failures (network errors, 5xx, 429) raise ProviderUnreachableError
and are retried once after a fixed delay; 4xx responses raise
ProviderRefusedError and are not retried.
"""

from __future__ import annotations

import logging
import os
from typing import Mapping, Sequence

import httpx

from ..errors import ProviderRefusedError, ProviderUnreachableError
from .base import (
    ChatRequest,
    ChatResponse,
    EmbeddingVector,
    FINISH_COMPLETE,
    FINISH_ERROR,
    FINISH_TRUNCATED,
    SearchResult,
    call_with_retry,
    check_embed_inputs,
    dedupe_and_rank,
    ensure_uniform_dimension,
)

logger = logging.getLogger(__name__)

DEFAULT_OPENAI_BASE_URL = "https://api.openai.com/v1"
DEFAULT_CHAT_MODEL = "gpt-3.5-turbo"
DEFAULT_EMBEDDING_MODEL = "text-embedding-ada-002"
DEFAULT_SEARCH_ENDPOINT = "https://api.bing.microsoft.com/v7.0/search"

_REQUEST_TIMEOUT = 60.0

_FINISH_REASONS = {"stop": FINISH_COMPLETE, "length": FINISH_TRUNCATED}


def _require_env(env: Mapping[str, str], key: str) -> str:
    value = env.get(key, "").strip()
    if not value:
        raise ProviderRefusedError(f"environment variable {key} is not set")
    return value


def _post_json(client: httpx.Client, url: str, *, headers: dict, payload: dict) -> dict:
    try:
        response = client.post(url, headers=headers, json=payload, timeout=_REQUEST_TIMEOUT)
    except httpx.HTTPError as exc:
        raise ProviderUnreachableError(f"POST {url} failed: {exc}")
    return _handle_status(response, url)


def _handle_status(response: httpx.Response, url: str) -> dict:
    if response.status_code == 429 or response.status_code >= 500:
        raise ProviderUnreachableError(f"{url} returned {response.status_code}")
    if response.status_code >= 400:
        raise ProviderRefusedError(f"{url} returned {response.status_code}: {response.text[:500]}")
    try:
        return response.json()
    except ValueError as exc:
        raise ProviderRefusedError(f"{url} returned non-JSON body: {exc}")


class LiveChatProvider:
    def __init__(
        self,
        api_key: str,
        *,
        base_url: str = DEFAULT_OPENAI_BASE_URL,
        model: str = DEFAULT_CHAT_MODEL,
        client: httpx.Client | None = None,
    ):
        self._api_key = api_key
        self._base_url = base_url.rstrip("/")
        self._model = model
        self._client = client or httpx.Client()

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None, client: httpx.Client | None = None):
        env = os.environ if env is None else env
        return cls(
            _require_env(env, "OPENAI_API_KEY"),
            base_url=env.get("OPENAI_BASE_URL", DEFAULT_OPENAI_BASE_URL),
            model=env.get("LATERALPROBE_CHAT_MODEL", DEFAULT_CHAT_MODEL),
            client=client,
        )

    def chat_complete(self, request: ChatRequest) -> ChatResponse:
        payload = {
            "model": self._model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        data = call_with_retry(
            lambda: _post_json(
                self._client,
                f"{self._base_url}/chat/completions",
                headers={"Authorization": f"Bearer {self._api_key}"},
                payload=payload,
            )
        )
        try:
            choice = data["choices"][0]
            content = (choice["message"]["content"] or "").strip()
            finish = _FINISH_REASONS.get(choice.get("finish_reason"), FINISH_ERROR)
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderRefusedError(f"unexpected chat completion payload: {exc}")
        if finish == FINISH_COMPLETE and not content:
            finish = FINISH_ERROR
        return ChatResponse(content=content, finish_reason=finish)


class LiveEmbeddingProvider:
    def __init__(
        self,
        api_key: str,
        *,
        base_url: str = DEFAULT_OPENAI_BASE_URL,
        model: str = DEFAULT_EMBEDDING_MODEL,
        client: httpx.Client | None = None,
    ):
        self._api_key = api_key
        self._base_url = base_url.rstrip("/")
        self._model = model
        self._client = client or httpx.Client()

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None, client: httpx.Client | None = None):
        env = os.environ if env is None else env
        return cls(
            _require_env(env, "OPENAI_API_KEY"),
            base_url=env.get("OPENAI_BASE_URL", DEFAULT_OPENAI_BASE_URL),
            model=env.get("LATERALPROBE_EMBEDDING_MODEL", DEFAULT_EMBEDDING_MODEL),
            client=client,
        )

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        check_embed_inputs(texts)
        if not texts:
            return []
        data = call_with_retry(
            lambda: _post_json(
                self._client,
                f"{self._base_url}/embeddings",
                headers={"Authorization": f"Bearer {self._api_key}"},
                payload={"model": self._model, "input": list(texts)},
            )
        )
        try:
            rows = sorted(data["data"], key=lambda row: row["index"])
            vectors = [EmbeddingVector(tuple(row["embedding"])) for row in rows]
        except (KeyError, TypeError) as exc:
            raise ProviderRefusedError(f"unexpected embeddings payload: {exc}")
        if len(vectors) != len(texts):
            raise ProviderRefusedError(
                f"embeddings payload has {len(vectors)} rows for {len(texts)} inputs"
            )
        ensure_uniform_dimension(vectors)
        return vectors


class LiveSearchProvider:
    """Web-search API client (Bing-compatible wire format).

    Region, freshness, and safe-search are pass-through options with no
    defaults; parameters are only sent when explicitly configured.
    """

    def __init__(
        self,
        api_key: str,
        *,
        endpoint: str = DEFAULT_SEARCH_ENDPOINT,
        market: str | None = None,
        freshness: str | None = None,
        safe_search: str | None = None,
        client: httpx.Client | None = None,
    ):
        self._api_key = api_key
        self._endpoint = endpoint
        self._market = market
        self._freshness = freshness
        self._safe_search = safe_search
        self._client = client or httpx.Client()

    @classmethod
    def from_env(cls, env: Mapping[str, str] | None = None, client: httpx.Client | None = None):
        env = os.environ if env is None else env
        return cls(
            _require_env(env, "SEARCH_API_KEY"),
            endpoint=env.get("SEARCH_ENDPOINT", DEFAULT_SEARCH_ENDPOINT),
            market=env.get("LATERALPROBE_SEARCH_MARKET") or None,
            freshness=env.get("LATERALPROBE_SEARCH_FRESHNESS") or None,
            safe_search=env.get("LATERALPROBE_SEARCH_SAFESEARCH") or None,
            client=client,
        )

    def search(self, query: str, n: int) -> list[SearchResult]:
        if not query.strip():
            raise ValueError("query must be non-empty")
        if n < 1:
            raise ValueError("n must be >= 1")
        params: dict[str, str | int] = {"q": query, "count": n}
        if self._market:
            params["mkt"] = self._market
        if self._freshness:
            params["freshness"] = self._freshness
        if self._safe_search:
            params["safeSearch"] = self._safe_search

        def do_get() -> dict:
            try:
                response = self._client.get(
                    self._endpoint,
                    params=params,
                    headers={"Ocp-Apim-Subscription-Key": self._api_key},
                    timeout=_REQUEST_TIMEOUT,
                )
            except httpx.HTTPError as exc:
                raise ProviderUnreachableError(f"GET {self._endpoint} failed: {exc}")
            return _handle_status(response, self._endpoint)

        data = call_with_retry(do_get)
        pages = (data.get("webPages") or {}).get("value") or []
        entries = []
        for page in pages:
            url = page.get("url")
            if not url:
                continue
            entries.append((url, page.get("name", ""), page.get("snippet", "")))
        return dedupe_and_rank(entries, n)
