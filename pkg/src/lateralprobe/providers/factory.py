"""Build the provider set for a configuration: scripted mocks or live clients."""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..config import MODE_MOCK, PipelineConfig
from ..fetch import PageFetcher, local_directory_transport
from .base import ChatProvider, EmbeddingProvider, SearchProvider
from .live import LiveChatProvider, LiveEmbeddingProvider, LiveSearchProvider
from .mock import (
    MockChatProvider,
    MockEmbeddingProvider,
    MockFixtures,
    MockSearchProvider,
    load_fixtures,
)


@dataclass
class ProviderSet:
    mode: str
    chat: ChatProvider
    embedder: EmbeddingProvider
    searcher: SearchProvider
    fetcher: PageFetcher

    def close(self) -> None:
        self.fetcher.close()


def bundled_fixture_path() -> Path:
    return Path(str(resources.files("lateralprobe").joinpath("fixtures/demo.yaml")))


def bundled_demo_input() -> str:
    return (
        resources.files("lateralprobe").joinpath("fixtures/demo_input.txt").read_text("utf-8")
    )


def providers_from_fixtures(fixtures: MockFixtures, cfg: PipelineConfig) -> ProviderSet:
    """Mock provider set over already-loaded (possibly modified) fixtures."""
    transport = local_directory_transport(fixtures.pages_dir) if fixtures.pages_dir else None
    return ProviderSet(
        mode=MODE_MOCK,
        chat=MockChatProvider.from_fixtures(fixtures),
        embedder=MockEmbeddingProvider.from_fixtures(fixtures),
        searcher=MockSearchProvider.from_fixtures(fixtures),
        fetcher=PageFetcher(cfg.fetch_limits, transport=transport),
    )


def build_providers(cfg: PipelineConfig) -> ProviderSet:
    if cfg.provider_mode == MODE_MOCK:
        fixture_path = Path(cfg.mock_fixture_path) if cfg.mock_fixture_path else bundled_fixture_path()
        return providers_from_fixtures(load_fixtures(fixture_path), cfg)
    return ProviderSet(
        mode=cfg.provider_mode,
        chat=LiveChatProvider.from_env(),
        embedder=LiveEmbeddingProvider.from_env(),
        searcher=LiveSearchProvider.from_env(),
        fetcher=PageFetcher(cfg.fetch_limits),
    )
