"""
Shared fixtures: import path, run configs, scripted sessions, network guard.
"""
import os
import sys
from pathlib import Path

sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import pytest
import urllib3

from malea.config import RunConfig
from malea.models import SystemDescription
from malea.personas import ETHICS_APPROVAL, QUALITY_APPROVAL
from malea.providers import ScriptedProvider

FIXTURES = Path(__file__).parent / "fixtures"

DRAFT = """## User Story 1
As a shopper, I want to know that a rating was adjusted by AI, so that I understand the score.
**Acceptance Criteria:**
- The product page shows a notice within 2 seconds of loading.
- The notice states how many reviews were excluded.

## User Story 2
As a review author, I want to appeal a fake-review label, so that my honest review is restored.
**Acceptance Criteria:**
- Appeals are decided within 72 hours.
"""

FINAL_DOCUMENT = """# Ethics Requirements: Fake review detector

## US-1

As a shopper, I want to know that a rating was adjusted by AI, so that I understand the score.

**Acceptance Criteria:**

- AC-1.1: The product page shows a notice within 2 seconds of loading.
- AC-1.2: The notice states how many reviews were excluded.

## US-2

As a review author, I want to appeal a fake-review label, so that my honest review is restored.

**Acceptance Criteria:**

- AC-2.1: Appeals are decided within 72 hours.
- AC-2.2: Review data is deleted after [PLACEHOLDER: retention period].

## Placeholder Index

- US-2 / AC-2.2: retention period
"""

QA_CRITIQUE = "AC-1.2 is not estimable: state the number format. Please revise."
EA_CRITIQUE = "Data: there is no retention requirement. Add one with a placeholder."


def pytest_configure(config):
    config.addinivalue_line("markers", "live: calls a real provider; needs MALEA_LIVE=1 and an API key")


@pytest.fixture
def run_config():
    """Config for offline sessions; the endpoint is never contacted."""
    return RunConfig(provider_endpoint="http://localhost:9", model_name="test-model", seed=7)


@pytest.fixture
def description():
    return SystemDescription(title="Fake review detector",
                             body="Detects fake Arabic product reviews and recalculates ratings.")


@pytest.fixture
def scripted_session():
    """
    Factory fixture: a ScriptedProvider for a full session. `qa` and `ea` are
    the critic replies in order; RE answers every turn with DRAFT unless `drafts` is given.
    """

    def _factory(qa=(QUALITY_APPROVAL,), ea=(ETHICS_APPROVAL,), drafts=None, final=FINAL_DOCUMENT):
        return ScriptedProvider({
            "Requirements Engineer": list(drafts) if drafts is not None else [DRAFT] * (1 + len(qa) + len(ea)),
            "Quality Assurance": list(qa),
            "Ethics Advocate": list(ea),
            "Documentation Assistant": [final],
        })

    return _factory


@pytest.fixture
def no_network(monkeypatch):
    """Fail any test that reaches for the network."""

    def refuse(*args, **kwargs):
        raise AssertionError("network access attempted in an offline test")

    monkeypatch.setattr(urllib3.PoolManager, "request", refuse)
    monkeypatch.setattr(urllib3.PoolManager, "urlopen", refuse)
    monkeypatch.setattr(urllib3.connectionpool.HTTPConnectionPool, "urlopen", refuse)
