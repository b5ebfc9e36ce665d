import json
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=200, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = Path(__file__).resolve().parent / "fixtures"


@pytest.fixture(scope="session")
def schema():
    def load(name):
        return json.loads((ROOT / "docs" / "schema" / f"{name}.v1.json").read_text())

    return load


@pytest.fixture(scope="session")
def fixtures_dir():
    return FIXTURES
