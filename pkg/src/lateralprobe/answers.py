"""Answer-prompt construction over selected segments, plus parsing and
validation of the attributed answer the model returns.

Length and attribution rules (at most 100 words, every sentence cited, every
document cited at least once) are soft contracts: violations are surfaced as
quality flags on the answer, never as rejections.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .providers.base import ChatMessage, ChatProvider, ChatRequest, ROLE_SYSTEM, ROLE_USER
from .questions import LateralQuestion
from .retrieval import DocumentContext
from .textutil import collapse_ws, count_words

ANSWER_SYSTEM_PROMPT = (
    "You are a factual and helpful assistant designed to read and cohesively summarize "
    "segments from different relevant document sources to answer the question at hand. "
    "Your answer should be informative but no more than 100 words. Your answer should be "
    "concise, easy to understand and should only use information from the provided relevant "
    "segments but combine the search results into a coherent answer. Do not repeat text and "
    "do not include irrelevant text in your answers. Use an unbiased and journalistic tone. "
    "Make sure the output is in plaintext. Attribute each sentence with proper citations "
    "using the document number with the [${doc_number}] notation (Example: "
    '"Hydroxychloroquine is not a cure for COVID-19 [1][3]."). Ensure each sentence in the '
    "answer is properly attributed. Ensure each of the documents is cited at least once. "
    "If different results refer to different entities with the same name, cite them "
    "separately."
)

ANSWER_USER_TEMPLATE = (
    "My question is {question}. Cohesively and factually summarize the following documents "
    "to answer my question.\n\n{doc_texts}"
)

DEFAULT_ANSWER_WORD_LIMIT = 100


@dataclass(frozen=True)
class AnswerSentence:
    """One answer sentence with its citation markers lifted into a set."""

    text: str
    citations: frozenset[int]


@dataclass(frozen=True)
class SourceRef:
    doc_number: int
    url: str
    title: str
    cited: bool


@dataclass(frozen=True)
class AttributedAnswer:
    question_index: int
    raw_text: str
    sentences: tuple[AnswerSentence, ...]
    sources: tuple[SourceRef, ...]
    word_count: int
    unattributed_sentence_count: int
    out_of_range_citations: frozenset[int]
    overlength: bool

    @property
    def uncited_sources(self) -> list[int]:
        return [source.doc_number for source in self.sources if not source.cited]


def render_doc_texts(context: Sequence[DocumentContext]) -> str:
    """Render the selected segments for the prompt: one header line per
    document, segments separated by blank lines."""
    blocks = []
    for entry in context:
        segment_texts = "\n\n".join(scored.segment.text for scored in entry.segments)
        blocks.append(f"Document [{entry.doc_number}] ({entry.url}):\n{segment_texts}")
    return "\n\n".join(blocks)


def build_answer_prompt(
    question: LateralQuestion,
    context: Sequence[DocumentContext],
    *,
    temperature: float = 0.2,
    max_output_tokens: int = 512,
) -> ChatRequest:
    if not context:
        raise ValueError("context must be non-empty")
    user = ANSWER_USER_TEMPLATE.replace("{question}", question.text).replace(
        "{doc_texts}", render_doc_texts(context)
    )
    return ChatRequest(
        messages=(
            ChatMessage(ROLE_SYSTEM, ANSWER_SYSTEM_PROMPT),
            ChatMessage(ROLE_USER, user),
        ),
        temperature=temperature,
        max_output_tokens=max_output_tokens,
    )


# A sentence ends at . ! or ? followed by whitespace or end-of-text; citation
# markers sitting between the terminator and the boundary attach to the
# sentence they follow.
_BOUNDARY = re.compile(r"[.!?](?:\s*\[\d+\])*(?=\s|$)")

# Fixed exception list; the terminator after one of these never splits.
_ABBREVIATION_AT_END = re.compile(
    r"(?:^|[\s(\[\"'])(?:e\.g|i\.e|etc|vs|dr|u\.s)\.$", re.IGNORECASE
)

_MARKER = re.compile(r"\[(\d+)\]")


def split_sentences(text: str) -> list[str]:
    """Split an answer into sentences by the terminator rule.

    Text with no terminator is a single sentence; whitespace-only text yields
    no sentences.
    """
    sentences: list[str] = []
    pos = 0
    for match in _BOUNDARY.finditer(text):
        terminator_end = match.start() + 1
        if text[match.start()] == "." and _ABBREVIATION_AT_END.search(text[pos:terminator_end]):
            continue
        candidate = text[pos : match.end()].strip()
        if candidate:
            sentences.append(candidate)
        pos = match.end()
    remainder = text[pos:].strip()
    if remainder:
        sentences.append(remainder)
    return sentences


def parse_citations(raw: str, num_docs: int) -> tuple[list[AnswerSentence], set[int]]:
    """Extract per-sentence citation sets from bracketed document numbers.

    Markers outside 1..num_docs are stripped and collected separately instead
    of failing the answer: a hallucinated index should not destroy an
    otherwise useful answer. Parsing is total.
    """
    if num_docs < 1:
        raise ValueError("num_docs must be >= 1")
    sentences: list[AnswerSentence] = []
    out_of_range: set[int] = set()
    for sentence in split_sentences(raw):
        citations: set[int] = set()
        for match in _MARKER.finditer(sentence):
            number = int(match.group(1))
            if 1 <= number <= num_docs:
                citations.add(number)
            else:
                out_of_range.add(number)
        text = collapse_ws(_MARKER.sub("", sentence))
        text = re.sub(r"\s+([.!?,;:])", r"\1", text)
        sentences.append(AnswerSentence(text=text, citations=frozenset(citations)))
    return sentences, out_of_range


def find_uncited_docs(sentences: Sequence[AnswerSentence], num_docs: int) -> set[int]:
    """Documents passed to the model but never cited; surfaced at render time."""
    cited: set[int] = set()
    for sentence in sentences:
        cited |= sentence.citations
    return set(range(1, num_docs + 1)) - cited


def generate_answer(
    question: LateralQuestion,
    context: Sequence[DocumentContext],
    sources: Sequence[tuple[int, str, str]],
    chat: ChatProvider,
    *,
    temperature: float = 0.2,
    word_limit: int = DEFAULT_ANSWER_WORD_LIMIT,
    max_output_tokens: int = 512,
) -> AttributedAnswer:
    """Build the answer prompt, call the chat provider, and validate the result.

    ``sources`` lists (doc_number, url, title) for exactly the documents the
    prompt rendered, contiguously numbered from 1. Provider errors propagate;
    soft-contract violations become flags.
    """
    numbers = [number for number, _, _ in sources]
    if numbers != list(range(1, len(numbers) + 1)):
        raise ValueError(f"sources must be contiguously numbered from 1, got {numbers}")
    request = build_answer_prompt(
        question, context, temperature=temperature, max_output_tokens=max_output_tokens
    )
    response = chat.chat_complete(request)
    raw = response.content
    num_docs = len(sources)
    sentences, out_of_range = parse_citations(raw, num_docs)
    uncited = find_uncited_docs(sentences, num_docs)
    word_count = count_words(raw)
    return AttributedAnswer(
        question_index=question.index,
        raw_text=raw,
        sentences=tuple(sentences),
        sources=tuple(
            SourceRef(number, url, title, cited=number not in uncited)
            for number, url, title in sources
        ),
        word_count=word_count,
        unattributed_sentence_count=sum(1 for s in sentences if not s.citations),
        out_of_range_citations=frozenset(out_of_range),
        overlength=word_count > word_limit,
    )
