"""Provider contracts: chat completion, text embedding, and web search.

Each capability has a live HTTP client (``providers.live``) and a
deterministic scripted mock (``providers.mock``) that satisfies the same
contract, so the full pipeline can run offline. Implementations must be safe
for concurrent invocation from multiple in-flight question pipelines.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol, Sequence, TypeVar
from urllib.parse import urlsplit, urlunsplit

from ..errors import DimensionMismatchError, ProviderUnreachableError

T = TypeVar("T")

ROLE_SYSTEM = "system"
ROLE_USER = "user"

FINISH_COMPLETE = "complete"
FINISH_TRUNCATED = "truncated"
FINISH_ERROR = "error"


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in (ROLE_SYSTEM, ROLE_USER):
            raise ValueError(f"unsupported message role: {self.role!r}")


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    temperature: float
    max_output_tokens: int

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0].role != ROLE_SYSTEM:
            raise ValueError("first message must have the system role")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_output_tokens < 1:
            raise ValueError("max_output_tokens must be positive")

    @property
    def system_text(self) -> str:
        return self.messages[0].content

    @property
    def user_text(self) -> str:
        for message in self.messages:
            if message.role == ROLE_USER:
                return message.content
        return ""


@dataclass(frozen=True)
class ChatResponse:
    content: str
    finish_reason: str

    def __post_init__(self):
        if self.finish_reason not in (FINISH_COMPLETE, FINISH_TRUNCATED, FINISH_ERROR):
            raise ValueError(f"unknown finish_reason: {self.finish_reason!r}")
        if self.finish_reason == FINISH_COMPLETE and not self.content:
            raise ValueError("complete response must carry content")


@dataclass(frozen=True)
class EmbeddingVector:
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise ValueError("embedding vector must have at least one dimension")

    @property
    def dimension(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class SearchResult:
    rank: int
    url: str
    title: str
    snippet: str

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be >= 1")
        parts = urlsplit(self.url)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise ValueError(f"url must be absolute http(s): {self.url!r}")


class ChatProvider(Protocol):
    def chat_complete(self, request: ChatRequest) -> ChatResponse: ...


class EmbeddingProvider(Protocol):
    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]: ...


class SearchProvider(Protocol):
    def search(self, query: str, n: int) -> list[SearchResult]: ...


def normalize_url(url: str) -> str:
    """Dedup key for result URLs: lowercase scheme and host, drop the
    fragment, keep the query string (fragments never change fetched content)."""
    parts = urlsplit(url)
    return urlunsplit((parts.scheme.lower(), parts.netloc.lower(), parts.path, parts.query, ""))


def dedupe_and_rank(entries: Iterable[tuple[str, str, str]], n: int) -> list[SearchResult]:
    """Build a ranked result list from (url, title, snippet) tuples in provider
    order: URL duplicates (after normalization) are dropped, the list is capped
    at n, and ranks are reassigned contiguously from 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    seen: set[str] = set()
    results: list[SearchResult] = []
    for url, title, snippet in entries:
        key = normalize_url(url)
        if key in seen:
            continue
        seen.add(key)
        results.append(SearchResult(rank=len(results) + 1, url=url, title=title, snippet=snippet))
        if len(results) == n:
            break
    return results


def check_embed_inputs(texts: Sequence[str]) -> None:
    for i, text in enumerate(texts):
        if not text.strip():
            raise ValueError(f"text at index {i} is empty after whitespace normalization")


def ensure_uniform_dimension(vectors: Sequence[EmbeddingVector]) -> None:
    dims = {v.dimension for v in vectors}
    if len(dims) > 1:
        raise DimensionMismatchError(f"provider returned mixed dimensions: {sorted(dims)}")


def call_with_retry(
    op: Callable[[], T],
    *,
    delay_seconds: float = 1.0,
    sleep: Callable[[float], None] | None = None,
) -> T:
    """One retry after a fixed delay on transient provider failures; all other
    errors propagate immediately."""
    try:
        return op()
    except ProviderUnreachableError:
        (time.sleep if sleep is None else sleep)(delay_seconds)
        return op()
