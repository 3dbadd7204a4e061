"""Input validation, question-prompt construction, and parsing of the five
generated lateral-reading questions.

The prompt templates below are immutable product constants; their digests are
pinned in tests so any edit is an explicit, reviewed change.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyInputError, InputTooLongError, MalformedLlmOutputError
from .providers.base import ChatMessage, ChatProvider, ChatRequest, ROLE_SYSTEM, ROLE_USER
from .textutil import count_words

logger = logging.getLogger(__name__)

QUESTION_COUNT = 5

QUESTION_SYSTEM_PROMPT = (
    "You are a factual and helpful assistant to aid users in the lateral reading task. "
    "You will receive a segment of text (Text:), and you need to raise five important, "
    "insightful, diverse, simple, factoid questions that may arise to a user when reading "
    "the text but are not answered by the text (Question1:, Question2:, Question3:, "
    "Question4:, Question5:). The questions should be suitable as meaningful queries to a "
    "search engine like Bing. Your questions will motivate users to search for relevant "
    "documents to better determine whether the given text contains misinformation."
)

QUESTION_USER_TEMPLATE = (
    "Text: {user_input}\n"
    "Carefully choose insightful and atomic lateral reading questions not answered by the "
    "above text, ensuring that the queries are self-sufficient (Do not have pronouns or "
    "attributes relying on the text, they should be fully resolved and make complete sense "
    "independently)."
)


@dataclass(frozen=True)
class ProbeInput:
    """A validated user text plus its derived word count."""

    text: str
    word_count: int

    def __post_init__(self):
        if self.word_count != count_words(self.text):
            raise ValueError("word_count does not match the whitespace-run rule")
        if self.word_count < 1:
            raise ValueError("input must contain at least one word")


_LABEL_PREFIX = re.compile(r"question\s*\d+\s*:", re.IGNORECASE)


@dataclass(frozen=True)
class LateralQuestion:
    """One generated, self-sufficient search question."""

    index: int
    text: str

    def __post_init__(self):
        if not 1 <= self.index <= QUESTION_COUNT:
            raise ValueError(f"question index {self.index} outside 1..{QUESTION_COUNT}")
        if not self.text:
            raise ValueError("question text must be non-empty")
        if self.text != self.text.strip():
            raise ValueError("question text must be trimmed")
        if _LABEL_PREFIX.match(self.text):
            raise ValueError("question text must not retain its label prefix")


def validate_input(raw: str, max_input_words: int = 2000) -> ProbeInput:
    """Apply the word-count bounds to a raw user text.

    Raises EmptyInputError for zero words and InputTooLongError (carrying the
    actual count) when the limit is exceeded.
    """
    word_count = count_words(raw)
    if word_count == 0:
        raise EmptyInputError("input contains no words")
    if word_count > max_input_words:
        raise InputTooLongError(word_count, max_input_words)
    return ProbeInput(text=raw, word_count=word_count)


def build_question_prompt(
    probe_input: ProbeInput,
    *,
    temperature: float = 0.2,
    max_output_tokens: int = 1024,
) -> ChatRequest:
    """Wrap the user text in the question-generation prompt.

    Substitution is literal, so user text containing braces or template-like
    markup passes through verbatim.
    """
    user = QUESTION_USER_TEMPLATE.replace("{user_input}", probe_input.text)
    return ChatRequest(
        messages=(
            ChatMessage(ROLE_SYSTEM, QUESTION_SYSTEM_PROMPT),
            ChatMessage(ROLE_USER, user),
        ),
        temperature=temperature,
        max_output_tokens=max_output_tokens,
    )


# A label is "QuestionN:" preceded by optional markdown decoration and an
# optional list marker ("3." / "3)"). Chat models decorate freely; the
# canonical undecorated form stays the contract.
_LABEL = re.compile(
    r"(?:\d{1,2}[.)][ \t]*)?[*_#>]*[ \t]*question\s*(\d+)\s*:\s*[*_]*",
    re.IGNORECASE,
)

# A list marker left dangling at the end of a span belongs to the next label
# ("...?\n2. **Question2:**"), not to this question's text.
_TRAILING_LIST_MARKER = re.compile(r"\n\s*\d{1,2}[.)]\s*$")


def _clean_span(span: str) -> str:
    text = _TRAILING_LIST_MARKER.sub("", span.strip())
    return text.strip().strip("*_").strip()


def parse_questions(raw: str) -> list[LateralQuestion]:
    """Extract the five labeled questions from a model response.

    Scans for labels Question1:..Question5: (case-insensitive, tolerant of
    markdown decoration); each question's text is the span between its label
    and the next label or end-of-text, trimmed. Raises MalformedLlmOutputError
    when labels are missing or duplicated or any extracted text is empty.
    """
    matches = list(_LABEL.finditer(raw))
    found: dict[int, str] = {}
    for pos, match in enumerate(matches):
        index = int(match.group(1))
        end = matches[pos + 1].start() if pos + 1 < len(matches) else len(raw)
        if not 1 <= index <= QUESTION_COUNT:
            logger.debug("ignoring out-of-range label Question%d", index)
            continue
        if index in found:
            raise MalformedLlmOutputError(f"duplicate label Question{index}")
        found[index] = _clean_span(raw[match.end() : end])

    if set(found) != set(range(1, QUESTION_COUNT + 1)):
        raise MalformedLlmOutputError(
            f"expected labels Question1..Question{QUESTION_COUNT}, found {sorted(found) or 'none'}"
        )
    empty = [i for i, text in found.items() if not text]
    if empty:
        raise MalformedLlmOutputError(f"empty question text for labels {empty}")
    return [LateralQuestion(index=i, text=found[i]) for i in range(1, QUESTION_COUNT + 1)]


def serialize_questions(questions: Sequence[LateralQuestion]) -> str:
    """Render questions in the canonical label format (inverse of parse_questions)."""
    return "\n".join(f"Question{q.index}: {q.text}" for q in questions)


def generate_questions(
    probe_input: ProbeInput,
    chat: ChatProvider,
    *,
    temperature: float = 0.2,
    max_output_tokens: int = 1024,
) -> list[LateralQuestion]:
    """Build the prompt, call the chat provider, and parse exactly five questions.

    A malformed response is retried once with the same prompt; provider errors
    propagate unchanged.
    """
    request = build_question_prompt(
        probe_input, temperature=temperature, max_output_tokens=max_output_tokens
    )
    try:
        return parse_questions(chat.chat_complete(request).content)
    except MalformedLlmOutputError as exc:
        logger.warning("malformed question response (%s); retrying once", exc)
        return parse_questions(chat.chat_complete(request).content)
