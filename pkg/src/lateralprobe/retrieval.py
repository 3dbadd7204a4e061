"""Per-page segment ranking: embed the question and a page's segments, score
by cosine similarity, keep the top k per page.

Selection is strictly per page. A strong page never crowds out a weak one;
every retrieved page contributes its own best segments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import DimensionMismatchError, EmptyContextError, ZeroVectorError
from .ingest import FETCH_OK, TextSegment, WebDocument
from .providers.base import EmbeddingProvider, EmbeddingVector
from .questions import LateralQuestion


@dataclass(frozen=True)
class RetrievalConfig:
    k_segments_per_page: int = 2
    results_per_question: int = 3

    def __post_init__(self):
        if self.k_segments_per_page < 1 or self.results_per_question < 1:
            raise ValueError("retrieval parameters must be >= 1")


@dataclass(frozen=True)
class ScoredSegment:
    segment: TextSegment
    score: float


@dataclass(frozen=True)
class DocumentContext:
    """One document's contribution to an answer prompt: its selected segments
    in document (seq) order."""

    doc_number: int
    url: str
    title: str
    segments: tuple[ScoredSegment, ...]


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding drift."""
    if a.dimension != b.dimension:
        raise DimensionMismatchError(f"dimensions differ: {a.dimension} vs {b.dimension}")
    dot = sum(x * y for x, y in zip(a.values, b.values))
    norm_a = sum(x * x for x in a.values) ** 0.5
    norm_b = sum(y * y for y in b.values) ** 0.5
    if norm_a == 0.0 or norm_b == 0.0:
        raise ZeroVectorError("cosine undefined for zero vectors")
    return max(-1.0, min(1.0, dot / (norm_a * norm_b)))


def top_k_segments(
    question: LateralQuestion,
    doc_segments: Sequence[TextSegment],
    k: int,
    embedder: EmbeddingProvider,
    *,
    question_vector: EmbeddingVector | None = None,
) -> list[ScoredSegment]:
    """Score one document's segments against the question and keep the best k.

    Returns min(k, len(doc_segments)) segments sorted by descending score,
    ties broken by ascending seq. The question is embedded once; pass
    question_vector to reuse an embedding across documents. Segments are
    embedded in a single batched call.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if not doc_segments:
        return []
    if question_vector is None:
        question_vector = embedder.embed([question.text])[0]
    vectors = embedder.embed([seg.text for seg in doc_segments])
    scored = [
        ScoredSegment(segment=seg, score=cosine(question_vector, vec))
        for seg, vec in zip(doc_segments, vectors)
    ]
    scored.sort(key=lambda s: (-s.score, s.segment.seq))
    return scored[:k]


def select_context(
    question: LateralQuestion,
    docs: Sequence[WebDocument],
    cfg: RetrievalConfig,
    embedder: EmbeddingProvider,
) -> list[DocumentContext]:
    """Select each document's top-k segments for the answer prompt.

    Documents are processed independently and stay in document order; within a
    document the selected segments are reordered by ascending seq so the
    prompt reads in page order. Raises EmptyContextError when no document
    contributes any segment.
    """
    for doc in docs:
        if doc.fetch_status != FETCH_OK:
            raise ValueError(f"document {doc.doc_number} is not fetch_status=ok")
    question_vector = embedder.embed([question.text])[0] if docs else None
    entries: list[DocumentContext] = []
    for doc in docs:
        top = top_k_segments(
            question,
            doc.segments,
            cfg.k_segments_per_page,
            embedder,
            question_vector=question_vector,
        )
        if not top:
            continue
        ordered = tuple(sorted(top, key=lambda s: s.segment.seq))
        entries.append(DocumentContext(doc.doc_number, doc.url, doc.title, ordered))
    if not entries:
        raise EmptyContextError(f"no segments retrievable for question {question.index}")
    return entries
