"""Anonymized feedback persistence.

The store is a UTF-8 file of one JSON object per line. Each record carries a
schema-version marker ("v") and exactly the four event fields; the schema is
closed by construction, so no user identifier, network address, session
token, or location can ever be written.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .errors import StorageUnavailableError

SCHEMA_VERSION = 1

RECORD_KEYS = {"v", "input_text", "question_index", "question_text", "timestamp"}

_MIN_INDEX, _MAX_INDEX = 1, 5


@dataclass(frozen=True)
class FeedbackEvent:
    input_text: str
    question_index: int
    question_text: str
    timestamp: datetime

    def __post_init__(self):
        if not self.input_text.strip():
            raise ValueError("input_text must be non-empty")
        if not _MIN_INDEX <= self.question_index <= _MAX_INDEX:
            raise ValueError(f"question_index must be in {_MIN_INDEX}..{_MAX_INDEX}")
        if not self.question_text.strip():
            raise ValueError("question_text must be non-empty")
        if self.timestamp.tzinfo is None or self.timestamp.utcoffset().total_seconds() != 0:
            raise ValueError("timestamp must be an explicit UTC instant")

    @classmethod
    def create(cls, input_text: str, question_index: int, question_text: str) -> "FeedbackEvent":
        return cls(input_text, question_index, question_text, datetime.now(timezone.utc))

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "v": SCHEMA_VERSION,
                "input_text": self.input_text,
                "question_index": self.question_index,
                "question_text": self.question_text,
                "timestamp": self.timestamp.isoformat().replace("+00:00", "Z"),
            },
            ensure_ascii=False,
        )

    @classmethod
    def parse_line(cls, line: str) -> "FeedbackEvent":
        """Strict inverse of to_json_line: rejects unknown or missing keys."""
        record = json.loads(line)
        if not isinstance(record, dict):
            raise ValueError("record is not a JSON object")
        if set(record) != RECORD_KEYS:
            raise ValueError(f"record keys {sorted(record)} do not match the closed schema")
        if record["v"] != SCHEMA_VERSION:
            raise ValueError(f"unsupported record version {record['v']!r}")
        timestamp = datetime.fromisoformat(record["timestamp"].replace("Z", "+00:00"))
        return cls(record["input_text"], record["question_index"], record["question_text"], timestamp)


class FeedbackStore:
    """Append-only line store; whole-line writes are serialized so concurrent
    feedback never interleaves within a line."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def record(self, event: FeedbackEvent) -> None:
        line = event.to_json_line()
        try:
            with self._lock:
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(line + "\n")
                    handle.flush()
        except OSError as exc:
            raise StorageUnavailableError(f"cannot append to {self.path}: {exc}")

    def read_all(self) -> list[FeedbackEvent]:
        if not self.path.exists():
            return []
        try:
            lines = self.path.read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise StorageUnavailableError(f"cannot read {self.path}: {exc}")
        return [FeedbackEvent.parse_line(line) for line in lines if line]
