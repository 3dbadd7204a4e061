"""Effective pipeline configuration.

Values layer in order: built-in defaults, then a config file (YAML key/value
document), then ``LATERALPROBE_*`` environment variables, then explicit
overrides (CLI flags). API keys are environment-only and never appear here.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import yaml

from .fetch import FetchLimits
from .retrieval import RetrievalConfig

ENV_PREFIX = "LATERALPROBE_"

MODE_MOCK = "mock"
MODE_LIVE = "live"

QUESTION_COUNT = 5  # fixed by the question-generation contract; read-only


@dataclass(frozen=True)
class PipelineConfig:
    max_input_words: int = 2000
    results_per_question: int = 3
    segment_width: int = 256
    k_segments_per_page: int = 2
    question_temperature: float = 0.2
    answer_temperature: float = 0.2
    answer_word_limit: int = 100
    # Prompt-size guard derived from a 4096-token context window, leaving
    # headroom for the answer itself (estimate: words * 4/3).
    context_token_budget: int = 3584
    max_output_tokens: int = 1024
    fetch_timeout_seconds: float = 10.0
    fetch_max_bytes: int = 5 * 1024 * 1024
    fetch_max_redirects: int = 5
    fetch_concurrency: int = 6
    provider_mode: str = MODE_MOCK
    mock_fixture_path: str | None = None  # None -> bundled demo fixture
    feedback_path: str = "feedback.jsonl"

    def __post_init__(self):
        for name in (
            "max_input_words",
            "results_per_question",
            "segment_width",
            "k_segments_per_page",
            "answer_word_limit",
            "context_token_budget",
            "max_output_tokens",
            "fetch_max_bytes",
            "fetch_max_redirects",
            "fetch_concurrency",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("question_temperature", "answer_temperature"):
            if not 0.0 <= getattr(self, name) <= 2.0:
                raise ValueError(f"{name} must be within [0, 2]")
        if self.fetch_timeout_seconds <= 0:
            raise ValueError("fetch_timeout_seconds must be positive")
        if self.provider_mode not in (MODE_MOCK, MODE_LIVE):
            raise ValueError(f"provider_mode must be mock or live, got {self.provider_mode!r}")

    @property
    def question_count(self) -> int:
        return QUESTION_COUNT

    @property
    def retrieval(self) -> RetrievalConfig:
        return RetrievalConfig(
            k_segments_per_page=self.k_segments_per_page,
            results_per_question=self.results_per_question,
        )

    @property
    def fetch_limits(self) -> FetchLimits:
        return FetchLimits(
            timeout_seconds=self.fetch_timeout_seconds,
            max_bytes=self.fetch_max_bytes,
            max_redirects=self.fetch_max_redirects,
        )

    def snapshot(self) -> dict[str, Any]:
        """Behavioral settings echoed in every probe result (no local paths)."""
        return {
            "max_input_words": self.max_input_words,
            "question_count": self.question_count,
            "results_per_question": self.results_per_question,
            "segment_width": self.segment_width,
            "k_segments_per_page": self.k_segments_per_page,
            "question_temperature": self.question_temperature,
            "answer_temperature": self.answer_temperature,
            "answer_word_limit": self.answer_word_limit,
            "context_token_budget": self.context_token_budget,
            "provider_mode": self.provider_mode,
        }


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}


def _coerce(name: str, value: Any) -> Any:
    declared = _FIELD_TYPES[name]
    if declared == "int":
        return int(value)
    if declared == "float":
        return float(value)
    return None if value is None else str(value)


def load_config(
    path: str | Path | None = None,
    *,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> PipelineConfig:
    """Assemble the effective configuration.

    Unknown keys in the config file are an error (they are almost always
    typos of real settings).
    """
    env = os.environ if env is None else env
    values: dict[str, Any] = {}

    if path is not None:
        raw = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        if not isinstance(raw, dict):
            raise ValueError(f"config file {path} is not a key/value document")
        unknown = set(raw) - set(_FIELD_TYPES)
        if unknown:
            raise ValueError(f"unknown config keys in {path}: {sorted(unknown)}")
        values.update(raw)

    for name in _FIELD_TYPES:
        env_key = ENV_PREFIX + name.upper()
        if env_key in env:
            values[name] = env[env_key]

    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    coerced = {name: _coerce(name, value) for name, value in values.items()}
    return PipelineConfig(**coerced)
