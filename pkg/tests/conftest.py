from __future__ import annotations

import sys
from pathlib import Path

import pytest

from acdc_prov.graph import ProvGraph
from acdc_prov.scenarios import (
    BALLOT_STEPS,
    CorpusPolicy,
    build_encapsulate_event,
    build_encapsulate_with_foreign_inputs,
    build_voting_trace,
    corpus_by_name,
)

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture
def encapsulation() -> ProvGraph:
    return build_encapsulate_event("Bob")


@pytest.fixture
def tampered_encapsulation() -> ProvGraph:
    return build_encapsulate_with_foreign_inputs("Bob", "Mallory")


@pytest.fixture
def alice_trace() -> ProvGraph:
    return build_voting_trace("Alice", "m1", BALLOT_STEPS)


@pytest.fixture
def entries() -> dict[str, CorpusPolicy]:
    return corpus_by_name()
