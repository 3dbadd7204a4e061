import json

import pytest
from click.testing import CliRunner

from lateralprobe.cli import main
from lateralprobe.providers.factory import bundled_demo_input


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def input_file(tmp_path):
    path = tmp_path / "input.txt"
    path.write_text(bundled_demo_input(), encoding="utf-8")
    return path


class TestProbeCommand:
    def test_human_output_lists_questions(self, runner, input_file, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(main, ["probe", "--input", str(input_file)])
        assert result.exit_code == 0, result.output
        assert "[1] Do COVID-19 vaccines contain microchips or tracking devices?" in result.output
        assert result.output.count("Sources:") == 5
        assert "not cited in this answer" in result.output

    def test_stdin_input(self, runner, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(main, ["probe", "--input", "-"], input=bundled_demo_input())
        assert result.exit_code == 0, result.output
        assert "Probed" in result.output

    def test_json_output(self, runner, input_file, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        result = runner.invoke(main, ["probe", "--input", str(input_file), "--json"])
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert len(payload["items"]) == 5
        assert payload["config_snapshot"]["provider_mode"] == "mock"

    def test_validation_error_exits_nonzero(self, runner, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        too_long = tmp_path / "long.txt"
        too_long.write_text(" ".join(["w"] * 2001), encoding="utf-8")
        result = runner.invoke(main, ["probe", "--input", str(too_long)])
        assert result.exit_code == 1
        assert "input-too-long" in result.output

    def test_json_error_payload(self, runner, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        empty = tmp_path / "empty.txt"
        empty.write_text("   ", encoding="utf-8")
        result = runner.invoke(main, ["probe", "--input", str(empty), "--json"])
        assert result.exit_code == 1
        payload = json.loads(result.output)
        assert payload["error"]["code"] == "empty-input"

    def test_config_file_respected(self, runner, input_file, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        config = tmp_path / "cfg.yaml"
        config.write_text("answer_word_limit: 10\n", encoding="utf-8")
        result = runner.invoke(
            main, ["probe", "--input", str(input_file), "--json", "--config", str(config)]
        )
        assert result.exit_code == 0, result.output
        payload = json.loads(result.output)
        assert payload["config_snapshot"]["answer_word_limit"] == 10
        # Every shipped fixture answer is longer than ten words.
        assert all(item["answer"]["flags"]["overlength"] for item in payload["items"])


class TestServeCommand:
    def test_bad_bind_rejected(self, runner):
        result = runner.invoke(main, ["serve", "--bind", "nonsense"])
        assert result.exit_code != 0

    def test_help(self, runner):
        result = runner.invoke(main, ["serve", "--help"])
        assert result.exit_code == 0
        assert "--bind" in result.output
