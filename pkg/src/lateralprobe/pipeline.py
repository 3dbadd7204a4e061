"""End-to-end probe orchestration.

validate -> generate questions -> per question: search -> fetch/extract/
segment -> select segments -> generate answer. Page fetches for all
(question, result) pairs run concurrently under a global cap; everything
else runs in question order so a scripted provider assigns responses to
questions deterministically. Per-question failures are isolated: one dead
question never aborts the others.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Sequence

from .answers import AttributedAnswer, build_answer_prompt, generate_answer
from .config import PipelineConfig
from .errors import EmptyInputError, InputTooLongError, LateralProbeError
from .ingest import WebDocument, fetch_document, finalize_documents
from .providers.base import ChatRequest, SearchResult
from .providers.factory import ProviderSet
from .questions import LateralQuestion, generate_questions, validate_input
from .retrieval import DocumentContext, select_context
from .textutil import count_words

logger = logging.getLogger(__name__)

STAGE_VALIDATION = "validation"
STAGE_QUESTION_GENERATION = "question-generation"
STAGE_SEARCH = "search"
STAGE_INGEST = "ingest"
STAGE_RETRIEVAL = "retrieval"
STAGE_ANSWER_GENERATION = "answer-generation"


class ProbeError(LateralProbeError):
    """Probe-level failure: validation or question generation went down, so
    there is no per-question result to isolate."""

    def __init__(self, stage: str, code: str, message: str):
        super().__init__(message)
        self.stage = stage
        self.code = code


@dataclass(frozen=True)
class StageFailure:
    stage: str
    code: str
    message: str


@dataclass(frozen=True)
class ProbeItem:
    """Outcome for one question: exactly one of answer / failure is set."""

    question: LateralQuestion
    answer: AttributedAnswer | None
    failure: StageFailure | None

    def __post_init__(self):
        if (self.answer is None) == (self.failure is None):
            raise ValueError("item must carry exactly one of answer or failure")

    def to_dict(self) -> dict[str, Any]:
        body: dict[str, Any] = {
            "question": {"index": self.question.index, "text": self.question.text}
        }
        if self.answer is not None:
            answer = self.answer
            body["answer"] = {
                "sentences": [
                    {"text": s.text, "citations": sorted(s.citations)} for s in answer.sentences
                ],
                "sources": [
                    {"doc_number": s.doc_number, "url": s.url, "title": s.title, "cited": s.cited}
                    for s in answer.sources
                ],
                "flags": {
                    "overlength": answer.overlength,
                    "unattributed_sentences": answer.unattributed_sentence_count,
                    "uncited_sources": answer.uncited_sources,
                },
                "raw_text": answer.raw_text,
            }
        else:
            body["failure"] = {
                "stage": self.failure.stage,
                "code": self.failure.code,
                "message": self.failure.message,
            }
        return body


@dataclass(frozen=True)
class ProbeResult:
    input_echo_word_count: int
    items: tuple[ProbeItem, ...]
    timing: dict[str, float]
    config_snapshot: dict[str, Any]

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        body: dict[str, Any] = {
            "input_echo_word_count": self.input_echo_word_count,
            "items": [item.to_dict() for item in self.items],
            "config_snapshot": self.config_snapshot,
        }
        if include_timing:
            body["timing"] = self.timing
        return body

    def canonical_json(self) -> str:
        """Deterministic serialization for comparing runs; timing is wall-clock
        measurement metadata and is excluded."""
        return json.dumps(self.to_dict(include_timing=False), sort_keys=True, ensure_ascii=False)


def estimate_request_tokens(request: ChatRequest) -> int:
    """Conservative, dependency-free token estimate: words x 4/3."""
    total_words = sum(count_words(message.content) for message in request.messages)
    return math.ceil(total_words * 4 / 3)


def _renumber_entries(entries: Sequence[DocumentContext]) -> list[DocumentContext]:
    renumbered = []
    for number, entry in enumerate(entries, start=1):
        segments = tuple(
            dataclasses.replace(
                scored, segment=dataclasses.replace(scored.segment, parent_doc=number)
            )
            for scored in entry.segments
        )
        renumbered.append(dataclasses.replace(entry, doc_number=number, segments=segments))
    return renumbered


def apply_context_budget(
    question: LateralQuestion, context: Sequence[DocumentContext], cfg: PipelineConfig
) -> tuple[list[DocumentContext], int]:
    """Shrink the selected context until the rendered answer prompt fits the
    token budget.

    Drops the globally lowest-scoring selected segments one at a time (ties
    drop from the back of the context); a document stripped of all segments
    leaves the context and the rest renumber contiguously. At least one
    segment always survives. Returns (context, dropped segment count).
    """
    entries = list(context)
    dropped = 0
    while True:
        request = build_answer_prompt(
            question,
            entries,
            temperature=cfg.answer_temperature,
            max_output_tokens=cfg.max_output_tokens,
        )
        if estimate_request_tokens(request) <= cfg.context_token_budget:
            break
        if sum(len(entry.segments) for entry in entries) <= 1:
            logger.warning(
                "question %d: prompt still over budget with a single segment", question.index
            )
            break
        worst_entry, worst_scored = min(
            ((entry, scored) for entry in entries for scored in entry.segments),
            key=lambda pair: (pair[1].score, -pair[0].doc_number, -pair[1].segment.seq),
        )
        remaining = tuple(s for s in worst_entry.segments if s is not worst_scored)
        if remaining:
            entries = [
                dataclasses.replace(entry, segments=remaining) if entry is worst_entry else entry
                for entry in entries
            ]
        else:
            entries = _renumber_entries([entry for entry in entries if entry is not worst_entry])
        dropped += 1
    if dropped:
        logger.info("question %d: dropped %d segments to fit token budget", question.index, dropped)
    return entries, dropped


def _ms(start: float) -> float:
    return (time.perf_counter() - start) * 1000.0


def _fetch_all(
    questions: Sequence[LateralQuestion],
    searches: dict[int, "list[SearchResult] | StageFailure"],
    providers: ProviderSet,
    concurrency: int,
) -> dict[tuple[int, int], WebDocument]:
    """Fetch every (question, result) pair concurrently under the global cap.
    Results are keyed, so worker completion order never affects the outcome."""
    jobs: list[tuple[int, SearchResult]] = []
    for question in questions:
        outcome = searches[question.index]
        if isinstance(outcome, StageFailure):
            continue
        jobs.extend((question.index, result) for result in outcome)
    fetched: dict[tuple[int, int], WebDocument] = {}
    if not jobs:
        return fetched
    with ThreadPoolExecutor(max_workers=concurrency) as pool:
        futures = {
            pool.submit(fetch_document, result, providers.fetcher): (question_index, result.rank)
            for question_index, result in jobs
        }
        for future, key in futures.items():
            fetched[key] = future.result()
    return fetched


def _run_question(
    question: LateralQuestion,
    search_outcome: "list[SearchResult] | StageFailure",
    fetched: dict[tuple[int, int], WebDocument],
    cfg: PipelineConfig,
    providers: ProviderSet,
    timing: dict[str, float],
) -> ProbeItem:
    if isinstance(search_outcome, StageFailure):
        return ProbeItem(question=question, answer=None, failure=search_outcome)

    start = time.perf_counter()
    documents = [fetched[(question.index, result.rank)] for result in search_outcome]
    live_docs, dropped_docs = finalize_documents(documents, cfg.segment_width)
    if dropped_docs:
        logger.info(
            "question %d: dropped %d unfetchable pages", question.index, len(dropped_docs)
        )
    try:
        context = select_context(question, live_docs, cfg.retrieval, providers.embedder)
        context, _ = apply_context_budget(question, context, cfg)
    except LateralProbeError as exc:
        timing["retrieval"] += _ms(start)
        return ProbeItem(question, None, StageFailure(STAGE_RETRIEVAL, exc.code, str(exc)))
    timing["retrieval"] += _ms(start)

    start = time.perf_counter()
    sources = [(entry.doc_number, entry.url, entry.title) for entry in context]
    try:
        answer = generate_answer(
            question,
            context,
            sources,
            providers.chat,
            temperature=cfg.answer_temperature,
            word_limit=cfg.answer_word_limit,
            max_output_tokens=cfg.max_output_tokens,
        )
    except LateralProbeError as exc:
        timing["answer_generation"] += _ms(start)
        return ProbeItem(question, None, StageFailure(STAGE_ANSWER_GENERATION, exc.code, str(exc)))
    timing["answer_generation"] += _ms(start)
    return ProbeItem(question, answer, None)


def probe(raw_text: str, cfg: PipelineConfig, providers: ProviderSet) -> ProbeResult:
    """Run the full pipeline over one user text.

    Raises ProbeError when validation or question generation fails (before
    validation passes, no provider is ever invoked); all later failures are
    isolated per question inside the returned items.
    """
    timing: dict[str, float] = {}
    total_start = time.perf_counter()

    start = time.perf_counter()
    try:
        probe_input = validate_input(raw_text, cfg.max_input_words)
    except (EmptyInputError, InputTooLongError) as exc:
        raise ProbeError(STAGE_VALIDATION, exc.code, str(exc))
    timing["validation"] = _ms(start)

    start = time.perf_counter()
    try:
        questions = generate_questions(
            probe_input,
            providers.chat,
            temperature=cfg.question_temperature,
            max_output_tokens=cfg.max_output_tokens,
        )
    except LateralProbeError as exc:
        raise ProbeError(STAGE_QUESTION_GENERATION, exc.code, str(exc))
    timing["question_generation"] = _ms(start)

    start = time.perf_counter()
    searches: dict[int, list[SearchResult] | StageFailure] = {}
    for question in questions:
        try:
            searches[question.index] = providers.searcher.search(
                question.text, cfg.results_per_question
            )
        except LateralProbeError as exc:
            searches[question.index] = StageFailure(STAGE_SEARCH, exc.code, str(exc))
    timing["search"] = _ms(start)

    start = time.perf_counter()
    fetched = _fetch_all(questions, searches, providers, cfg.fetch_concurrency)
    timing["ingest"] = _ms(start)

    timing["retrieval"] = 0.0
    timing["answer_generation"] = 0.0
    items = tuple(
        _run_question(question, searches[question.index], fetched, cfg, providers, timing)
        for question in questions
    )

    timing["total"] = _ms(total_start)
    return ProbeResult(
        input_echo_word_count=probe_input.word_count,
        items=items,
        timing=timing,
        config_snapshot=cfg.snapshot(),
    )
