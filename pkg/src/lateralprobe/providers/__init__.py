"""Pluggable external capabilities: chat completion, text embedding, web search."""

from .base import (
    ChatMessage,
    ChatProvider,
    ChatRequest,
    ChatResponse,
    EmbeddingProvider,
    EmbeddingVector,
    SearchProvider,
    SearchResult,
    call_with_retry,
    dedupe_and_rank,
    normalize_url,
)

__all__ = [
    "ChatMessage",
    "ChatProvider",
    "ChatRequest",
    "ChatResponse",
    "EmbeddingProvider",
    "EmbeddingVector",
    "SearchProvider",
    "SearchResult",
    "call_with_retry",
    "dedupe_and_rank",
    "normalize_url",
]
