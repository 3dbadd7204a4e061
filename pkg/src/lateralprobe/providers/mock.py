"""Deterministic scripted providers, driven by a single fixture file.

Fixture layout (YAML, versioned with a top-level schema tag):

    schema: 1
    embedding:
      seed: 7
      dimension: 64
    chat:
      question_gen:        # ordered response scripts, one prompt class each
        - "Question1: ...\\n...Question5: ..."
      answer_gen:
        - "First answer [1][2]."
    search:                # exact query string -> result list
      "Some question?":
        - {url: "https://a.example/page", title: "...", snippet: "..."}
    pages_dir: pages       # optional, resolved relative to the fixture file

Chat scripts are consumed in call order per prompt class and cycle when
exhausted, so a long-lived mock-mode service keeps serving. All three mocks
record their invocations (``requests`` / ``calls``) for tests. Cursor and
log access is lock-serialized; mocks are drop-in replacements for the live
clients and the whole pipeline runs on them with no network access.
"""

from __future__ import annotations

import hashlib
import math
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import yaml

from ..answers import ANSWER_SYSTEM_PROMPT
from ..errors import FixtureError
from ..questions import QUESTION_SYSTEM_PROMPT
from ..textutil import collapse_ws
from .base import (
    ChatRequest,
    ChatResponse,
    EmbeddingVector,
    FINISH_COMPLETE,
    SearchResult,
    check_embed_inputs,
    dedupe_and_rank,
)

PROMPT_CLASS_QUESTION = "question_gen"
PROMPT_CLASS_ANSWER = "answer_gen"

FIXTURE_SCHEMA = 1

DEFAULT_EMBEDDING_DIMENSION = 64


@dataclass(frozen=True)
class MockFixtures:
    embedding_seed: int
    embedding_dimension: int
    question_scripts: tuple[str, ...]
    answer_scripts: tuple[str, ...]
    search_map: dict[str, tuple[dict, ...]]
    pages_dir: Path | None


def load_fixtures(path: str | Path) -> MockFixtures:
    """Parse and validate a fixture file."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except (OSError, yaml.YAMLError) as exc:
        raise FixtureError(f"cannot load fixture file {path}: {exc}")
    if not isinstance(data, dict):
        raise FixtureError(f"fixture file {path} is not a key/value document")
    if data.get("schema") != FIXTURE_SCHEMA:
        raise FixtureError(f"fixture schema {data.get('schema')!r} is not {FIXTURE_SCHEMA}")

    embedding = data.get("embedding") or {}
    chat = data.get("chat") or {}
    search = data.get("search") or {}
    if not isinstance(chat, dict) or not isinstance(search, dict):
        raise FixtureError("fixture 'chat' and 'search' sections must be mappings")

    def scripts(kind: str) -> tuple[str, ...]:
        entries = chat.get(kind) or []
        if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
            raise FixtureError(f"chat.{kind} must be a list of strings")
        return tuple(entries)

    search_map: dict[str, tuple[dict, ...]] = {}
    for query, entries in search.items():
        entries = entries or []
        for entry in entries:
            if not isinstance(entry, dict) or "url" not in entry:
                raise FixtureError(f"search entry for {query!r} must be a mapping with a url")
        search_map[str(query)] = tuple(entries)

    pages_dir = None
    if "pages_dir" in data and data["pages_dir"] is not None:
        pages_dir = (path.parent / str(data["pages_dir"])).resolve()
        if not pages_dir.is_dir():
            raise FixtureError(f"pages_dir {pages_dir} does not exist")

    return MockFixtures(
        embedding_seed=int(embedding.get("seed", 0)),
        embedding_dimension=int(embedding.get("dimension", DEFAULT_EMBEDDING_DIMENSION)),
        question_scripts=scripts(PROMPT_CLASS_QUESTION),
        answer_scripts=scripts(PROMPT_CLASS_ANSWER),
        search_map=search_map,
        pages_dir=pages_dir,
    )


def classify_prompt(request: ChatRequest) -> str:
    """Dispatch on the system preamble the request carries."""
    system = request.system_text
    if system == QUESTION_SYSTEM_PROMPT:
        return PROMPT_CLASS_QUESTION
    if system == ANSWER_SYSTEM_PROMPT:
        return PROMPT_CLASS_ANSWER
    raise FixtureError("request carries no known system preamble")


class MockChatProvider:
    """Replays scripted responses per prompt class, in call order."""

    def __init__(self, question_scripts: Sequence[str], answer_scripts: Sequence[str]):
        self._scripts = {
            PROMPT_CLASS_QUESTION: tuple(question_scripts),
            PROMPT_CLASS_ANSWER: tuple(answer_scripts),
        }
        self._cursors = {PROMPT_CLASS_QUESTION: 0, PROMPT_CLASS_ANSWER: 0}
        self._lock = threading.Lock()
        self.requests: list[ChatRequest] = []

    @classmethod
    def from_fixtures(cls, fixtures: MockFixtures) -> "MockChatProvider":
        return cls(fixtures.question_scripts, fixtures.answer_scripts)

    def chat_complete(self, request: ChatRequest) -> ChatResponse:
        kind = classify_prompt(request)
        with self._lock:
            self.requests.append(request)
            scripts = self._scripts[kind]
            if not scripts:
                raise FixtureError(f"fixture has no {kind} scripts")
            content = scripts[self._cursors[kind] % len(scripts)]
            self._cursors[kind] += 1
        return ChatResponse(content=content.strip(), finish_reason=FINISH_COMPLETE)

    def reset(self) -> None:
        with self._lock:
            self._cursors = {PROMPT_CLASS_QUESTION: 0, PROMPT_CLASS_ANSWER: 0}
            self.requests.clear()


class MockEmbeddingProvider:
    """Hash-derived unit vectors: equal texts (after whitespace collapse) get
    equal vectors, and any change to the seed or text moves the vector."""

    def __init__(self, seed: int = 0, dimension: int = DEFAULT_EMBEDDING_DIMENSION):
        if dimension < 1:
            raise ValueError("dimension must be >= 1")
        self.seed = seed
        self.dimension = dimension
        self._lock = threading.Lock()
        self.calls: list[tuple[str, ...]] = []

    @classmethod
    def from_fixtures(cls, fixtures: MockFixtures) -> "MockEmbeddingProvider":
        return cls(seed=fixtures.embedding_seed, dimension=fixtures.embedding_dimension)

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        check_embed_inputs(texts)
        with self._lock:
            self.calls.append(tuple(texts))
        return [self._vector(collapse_ws(text)) for text in texts]

    def _vector(self, normalized: str) -> EmbeddingVector:
        material = f"{self.seed}\x00{normalized}".encode("utf-8")
        raw: list[int] = []
        counter = 0
        while len(raw) < self.dimension:
            digest = hashlib.sha256(material + counter.to_bytes(4, "big")).digest()
            raw.extend(
                int.from_bytes(digest[i : i + 4], "big") for i in range(0, len(digest), 4)
            )
            counter += 1
        values = [(v / 2**31) - 1.0 for v in raw[: self.dimension]]
        norm = math.sqrt(sum(v * v for v in values))
        if norm == 0.0:  # unreachable in practice; SHA output is never all mid-range
            values[0], norm = 1.0, 1.0
        return EmbeddingVector(tuple(v / norm for v in values))

    def reset(self) -> None:
        with self._lock:
            self.calls.clear()


class MockSearchProvider:
    """Serves ranked results from the fixture map, keyed by exact query string."""

    def __init__(self, search_map: dict[str, Sequence[dict]]):
        self._map = {query: tuple(entries) for query, entries in search_map.items()}
        self._lock = threading.Lock()
        self.calls: list[tuple[str, int]] = []

    @classmethod
    def from_fixtures(cls, fixtures: MockFixtures) -> "MockSearchProvider":
        return cls(fixtures.search_map)

    def search(self, query: str, n: int) -> list[SearchResult]:
        if not query.strip():
            raise ValueError("query must be non-empty")
        if n < 1:
            raise ValueError("n must be >= 1")
        with self._lock:
            self.calls.append((query, n))
        entries = self._map.get(query, ())
        return dedupe_and_rank(
            ((e["url"], e.get("title", ""), e.get("snippet", "")) for e in entries), n
        )

    def reset(self) -> None:
        with self._lock:
            self.calls.clear()
