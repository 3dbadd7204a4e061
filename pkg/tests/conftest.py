import pytest

from lateralprobe.config import PipelineConfig
from lateralprobe.providers.factory import (
    build_providers,
    bundled_demo_input,
    bundled_fixture_path,
)
from lateralprobe.providers.mock import load_fixtures


@pytest.fixture
def cfg():
    return PipelineConfig()


@pytest.fixture
def demo_input():
    return bundled_demo_input()


@pytest.fixture
def demo_fixtures():
    return load_fixtures(bundled_fixture_path())


@pytest.fixture
def providers(cfg):
    provider_set = build_providers(cfg)
    yield provider_set
    provider_set.close()
