"""
Tests for the quality detectors against the seeded and clean story corpora.
"""
import json
import random

import pytest
import yaml

from malea.detectors import QualityCriterion, Violation, lint, lint_report, load_lexicon
from malea.models import AcceptanceCriterion, UserStory
from malea.stories import parse_stories
from tests.conftest import FIXTURES

SEEDED = parse_stories((FIXTURES / "lint" / "seeded.md").read_text(encoding="utf-8"))
MANIFEST = yaml.safe_load((FIXTURES / "lint" / "seeded.yaml").read_text(encoding="utf-8"))


def test_seeded_corpus_shape():
    """Twenty seeded stories, five per quality criterion"""
    assert len(SEEDED) == 20, f"Expected 20 seeded stories, got {len(SEEDED)}"
    per_criterion = {}
    for entry in MANIFEST.values():
        per_criterion[entry["criterion"]] = per_criterion.get(entry["criterion"], 0) + 1
    assert per_criterion == {"Atomic": 5, "Minimal": 5, "Unambiguous": 5, "Estimable": 5}, \
        f"Unexpected manifest {per_criterion}"


@pytest.mark.parametrize("story", SEEDED, ids=lambda s: s.id)
def test_each_seeded_defect_is_found(story):
    """Every seeded story yields exactly its one planted violation"""
    expected = MANIFEST[story.id]
    found = lint(story)

    assert len(found) == 1, f"{story.id}: expected 1 violation, got {[v.to_dict() for v in found]}"
    assert found[0].criterion.value == expected["criterion"], \
        f"{story.id}: expected {expected['criterion']}, got {found[0].criterion.value}"
    if "excerpt" in expected:
        assert found[0].excerpt == expected["excerpt"], \
            f"{story.id}: expected excerpt {expected['excerpt']!r}, got {found[0].excerpt!r}"


def test_clean_corpus_has_no_violations():
    """Well-formed stories pass every detector"""
    stories = parse_stories((FIXTURES / "lint" / "clean.md").read_text(encoding="utf-8"))
    report = lint_report(stories)

    assert len(stories) == 3, f"Expected 3 clean stories, got {len(stories)}"
    assert report.total == 0, f"Expected no violations, got {report.render()}"


def test_report_counts_by_criterion_and_story():
    """The report tallies violations per criterion and per story"""
    report = lint_report(SEEDED)

    assert report.total == 20, f"Expected 20 violations, got {report.total}"
    assert all(n == 5 for n in report.by_criterion.values()), f"Unexpected tallies {report.by_criterion}"
    assert report.by_story["US-12"][QualityCriterion.UNAMBIGUOUS] == 1, f"Unexpected US-12 {report.by_story['US-12']}"
    assert report.to_dict()["by_criterion"]["Atomic"] == 5, "Serialized tallies differ"
    assert report.render().endswith("20 violation(s): Atomic 5, Minimal 5, Unambiguous 5, Estimable 5"), \
        f"Unexpected summary line {report.render().splitlines()[-1]}"


def test_removing_a_lexicon_term_never_adds_hits():
    """Unambiguous hits are monotone in the lexicon"""
    full = load_lexicon()
    reduced = tuple(t for t in full if t != "quickly")

    def hits(lexicon):
        return lint_report(SEEDED, lexicon).by_criterion[QualityCriterion.UNAMBIGUOUS]

    assert hits(reduced) == hits(full) - 1, f"Expected one fewer hit, got {hits(reduced)} vs {hits(full)}"
    assert hits(()) <= hits(reduced), "An empty lexicon produced more hits"


def test_whole_word_matching():
    """Lexicon terms do not match inside longer words"""
    story = UserStory(id="US-1", role_clause="guest", want_clause="to book breakfast",
                      criteria=(AcceptanceCriterion(id="AC-1.1", text="Bookings are confirmed within 2 seconds."),))
    unambiguous = [v for v in lint(story, ("fast",)) if v.criterion is QualityCriterion.UNAMBIGUOUS]
    assert unambiguous == [], "'fast' matched inside 'breakfast'"


def test_custom_lexicon_file(tmp_path):
    """Comments, blanks and repeated terms are ignored when loading a lexicon"""
    path = tmp_path / "lexicon.txt"
    path.write_text("# vague words\nFast\n\nfast  # again\nuser-friendly\n", encoding="utf-8")

    assert load_lexicon(path) == ("fast", "user-friendly"), f"Unexpected lexicon {load_lexicon(path)}"


def test_violation_span_must_fit_text():
    """A violation cannot cite outside its text"""
    with pytest.raises(ValueError):
        Violation(criterion=QualityCriterion.ATOMIC, story_id="US-1", span=(0, 50), rationale="r", text="short")


def test_report_ignores_story_order():
    """Shuffling the stories leaves per-criterion, per-story and violation sets unchanged"""
    expected = lint_report(SEEDED)
    rng = random.Random(99)

    def violation_keys(report):
        return sorted(json.dumps(v.to_dict(), sort_keys=True) for v in report.violations)

    for _ in range(10):
        shuffled = list(SEEDED)
        rng.shuffle(shuffled)
        report = lint_report(shuffled)
        assert report.by_criterion == expected.by_criterion, f"Criterion counts changed: {report.by_criterion}"
        assert report.by_story == expected.by_story, "Per-story counts changed"
        assert violation_keys(report) == violation_keys(expected), "Violation set changed with story order"
