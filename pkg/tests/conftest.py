from __future__ import annotations

import pytest

from vista.events import normalize
from vista.provenance import reconstruct
from vista.simulator import demo_corpus


@pytest.fixture(scope="session")
def seed7_records():
    return demo_corpus(seed=7)


@pytest.fixture(scope="session")
def seed7_normalized(seed7_records):
    return normalize(seed7_records)


@pytest.fixture(scope="session")
def seed7_attempts(seed7_normalized):
    result = reconstruct(seed7_normalized)
    assert not result.warnings
    return result.attempts
