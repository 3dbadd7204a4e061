"""Command-line entry points: one-shot probes and the HTTP server."""

from __future__ import annotations

import json
import logging
import sys
import textwrap
from pathlib import Path

import click
import uvicorn

from .config import load_config
from .pipeline import ProbeError, ProbeItem, ProbeResult, probe
from .providers.factory import build_providers
from .service import create_app

logger = logging.getLogger(__name__)


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
def main(verbose: bool) -> None:
    """Lateral-reading assistant: probing questions with source-attributed answers."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
    )


def _render_item(item: ProbeItem) -> str:
    lines = [f"[{item.question.index}] {item.question.text}"]
    if item.failure is not None:
        lines.append(f"    FAILED at {item.failure.stage}: {item.failure.code} ({item.failure.message})")
        return "\n".join(lines)
    answer = item.answer
    lines.extend(textwrap.wrap(answer.raw_text, width=88, initial_indent="    ", subsequent_indent="    "))
    lines.append("    Sources:")
    for source in answer.sources:
        suffix = "" if source.cited else "  (not cited in this answer)"
        lines.append(f"      [{source.doc_number}] {source.title} - {source.url}{suffix}")
    flags = []
    if answer.overlength:
        flags.append(f"answer exceeds the word limit ({answer.word_count} words)")
    if answer.unattributed_sentence_count:
        flags.append(f"{answer.unattributed_sentence_count} unattributed sentence(s)")
    if answer.out_of_range_citations:
        flags.append(f"out-of-range citations {sorted(answer.out_of_range_citations)}")
    if flags:
        lines.append("    Flags: " + "; ".join(flags))
    return "\n".join(lines)


def _render_result(result: ProbeResult) -> str:
    header = (
        f"Probed {result.input_echo_word_count} words -> {len(result.items)} questions "
        f"({result.timing.get('total', 0):.0f} ms)"
    )
    return "\n\n".join([header] + [_render_item(item) for item in result.items])


@main.command(name="probe")
@click.option("--input", "input_source", required=True, help="Path to a text file, or '-' for stdin.")
@click.option("--json", "as_json", is_flag=True, help="Emit the full result as JSON.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--provider", type=click.Choice(["mock", "live"]), default=None)
def probe_command(input_source: str, as_json: bool, config_path: str | None, provider: str | None) -> None:
    """Run one probe over a text and print questions, answers, and sources."""
    cfg = load_config(config_path, overrides={"provider_mode": provider})
    if input_source == "-":
        raw_text = sys.stdin.read()
    else:
        raw_text = Path(input_source).read_text(encoding="utf-8")
    providers = build_providers(cfg)
    try:
        result = probe(raw_text, cfg, providers)
    except ProbeError as exc:
        if as_json:
            click.echo(json.dumps({"error": {"stage": exc.stage, "code": exc.code, "message": str(exc)}}))
        else:
            click.echo(f"probe failed at {exc.stage}: {exc.code} ({exc})", err=True)
        raise SystemExit(1)
    finally:
        providers.close()
    if as_json:
        click.echo(json.dumps(result.to_dict(), indent=2, ensure_ascii=False))
    else:
        click.echo(_render_result(result))


@main.command(name="serve")
@click.option("--bind", default="127.0.0.1:8000", show_default=True, help="host:port to listen on.")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--provider", type=click.Choice(["mock", "live"]), default=None)
@click.option("--ui-dir", type=click.Path(), default=None, help="Serve a built UI bundle from this directory.")
def serve_command(bind: str, config_path: str | None, provider: str | None, ui_dir: str | None) -> None:
    """Run the HTTP service (POST /probe, POST /feedback, GET /health)."""
    cfg = load_config(config_path, overrides={"provider_mode": provider})
    host, _, port = bind.rpartition(":")
    if not host or not port.isdigit():
        raise click.BadParameter(f"--bind must be host:port, got {bind!r}")
    app = create_app(cfg, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=int(port))


if __name__ == "__main__":
    main()
