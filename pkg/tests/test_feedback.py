import json
import threading
from datetime import datetime, timezone

import pytest

from lateralprobe.errors import StorageUnavailableError
from lateralprobe.feedback import RECORD_KEYS, FeedbackEvent, FeedbackStore


def event(index=1, text="Why is the sky blue?"):
    return FeedbackEvent.create("the sky looked odd today", index, text)


class TestFeedbackEvent:
    def test_round_trip(self):
        original = event()
        parsed = FeedbackEvent.parse_line(original.to_json_line())
        assert parsed == original

    @pytest.mark.parametrize("index", [0, 6, -1])
    def test_index_out_of_range_rejected(self, index):
        with pytest.raises(ValueError):
            event(index=index)

    def test_blank_fields_rejected(self):
        with pytest.raises(ValueError):
            FeedbackEvent.create("", 1, "q?")
        with pytest.raises(ValueError):
            FeedbackEvent.create("text", 1, "  ")

    def test_naive_timestamp_rejected(self):
        with pytest.raises(ValueError):
            FeedbackEvent("text", 1, "q?", datetime(2024, 1, 1))

    def test_line_carries_version_and_exactly_event_fields(self):
        record = json.loads(event().to_json_line())
        assert set(record) == RECORD_KEYS
        assert record["v"] == 1
        assert record["timestamp"].endswith("Z")

    def test_extra_key_rejected_on_parse(self):
        record = json.loads(event().to_json_line())
        record["ip_address"] = "203.0.113.7"
        with pytest.raises(ValueError):
            FeedbackEvent.parse_line(json.dumps(record))

    def test_missing_key_rejected_on_parse(self):
        record = json.loads(event().to_json_line())
        del record["question_text"]
        with pytest.raises(ValueError):
            FeedbackEvent.parse_line(json.dumps(record))

    def test_unknown_version_rejected(self):
        record = json.loads(event().to_json_line())
        record["v"] = 2
        with pytest.raises(ValueError):
            FeedbackEvent.parse_line(json.dumps(record))


class TestFeedbackStore:
    def test_append_and_read_back(self, tmp_path):
        store = FeedbackStore(tmp_path / "feedback.jsonl")
        original = event()
        store.record(original)
        assert store.read_all() == [original]
        assert len((tmp_path / "feedback.jsonl").read_text().splitlines()) == 1

    def test_each_record_adds_exactly_one_line(self, tmp_path):
        store = FeedbackStore(tmp_path / "feedback.jsonl")
        for i in range(1, 6):
            store.record(event(index=i))
        lines = (tmp_path / "feedback.jsonl").read_text().splitlines()
        assert len(lines) == 5

    def test_concurrent_appends_stay_intact(self, tmp_path):
        store = FeedbackStore(tmp_path / "feedback.jsonl")
        errors = []

        def write(i):
            try:
                store.record(event(index=(i % 5) + 1, text=f"question {i}?"))
            except Exception as exc:  # pragma: no cover - failure detail
                errors.append(exc)

        threads = [threading.Thread(target=write, args=(i,)) for i in range(100)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert errors == []
        events = store.read_all()
        assert len(events) == 100
        assert {e.question_text for e in events} == {f"question {i}?" for i in range(100)}

    def test_unicode_survives(self, tmp_path):
        store = FeedbackStore(tmp_path / "feedback.jsonl")
        original = FeedbackEvent.create("café — プローブ", 2, "what about é?")
        store.record(original)
        assert store.read_all() == [original]

    def test_unwritable_path_raises_storage_error(self, tmp_path):
        store = FeedbackStore(tmp_path / "no" / "such" / "dir" / "f.jsonl")
        with pytest.raises(StorageUnavailableError):
            store.record(event())

    def test_read_missing_file_is_empty(self, tmp_path):
        assert FeedbackStore(tmp_path / "absent.jsonl").read_all() == []
