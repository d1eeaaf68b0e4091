"""
Tests for story parsing, placeholders, canonical markdown, decomposition and export.
"""
import pytest

from malea.errors import FormatError, ProviderError, ProviderErrorKind
from malea.models import AcceptanceCriterion, UserStory
from malea.providers import ScriptedProvider
from malea.stories import (
    decompose, decompose_all, emit_markdown, export_requirements, extract_placeholders, load_requirements,
    parse_document, parse_stories, placeholder_index, scan_placeholders, split_obligations,
)
from tests.conftest import DRAFT, FINAL_DOCUMENT, FIXTURES


@pytest.mark.parametrize("name,stories,criteria,residue", [
    ("headings.md", 10, 15, 0),
    ("bold_labels.md", 10, 16, 2),
    ("plain_bullets.md", 11, 12, 1),
])
def test_parser_handles_format_variants(name, stories, criteria, residue):
    """Heading, bold-label and plain-bullet layouts all parse to the same story model"""
    result = parse_document((FIXTURES / "stories" / name).read_text(encoding="utf-8"))

    assert len(result.stories) == stories, f"{name}: expected {stories} stories, got {len(result.stories)}"
    total = sum(len(s.criteria) for s in result.stories)
    assert total == criteria, f"{name}: expected {criteria} criteria, got {total}"
    assert len(result.residue) == residue, f"{name}: expected {residue} residue lines, got {result.residue}"


def test_parser_numbers_stories_and_criteria():
    """Stories are renumbered US-n and criteria AC-n.m in reading order"""
    stories = parse_stories(DRAFT)

    assert [s.id for s in stories] == ["US-1", "US-2"], f"Unexpected ids {[s.id for s in stories]}"
    assert [c.id for c in stories[0].criteria] == ["AC-1.1", "AC-1.2"], "Criteria not numbered per story"
    assert stories[1].role_clause == "review author", f"Article not stripped: {stories[1].role_clause!r}"
    assert stories[1].benefit_clause == "my honest review is restored", \
        f"Unexpected benefit {stories[1].benefit_clause!r}"


def test_parser_skips_placeholder_index():
    """The placeholder index of a final document is not read back as criteria or residue"""
    result = parse_document(FINAL_DOCUMENT)

    assert len(result.stories) == 2, f"Expected 2 stories, got {len(result.stories)}"
    assert len(result.stories[1].criteria) == 2, f"Index leaked into criteria: {result.stories[1].criteria}"
    assert result.residue == (), f"Unexpected residue {result.residue}"


def test_parser_keeps_prose_as_residue():
    """Chatter around the stories is returned with its line number"""
    text = "Here are the stories you asked for.\n\nAs a user, I want to see scores.\n"
    result = parse_document(text)

    assert len(result.stories) == 1, f"Expected 1 story, got {len(result.stories)}"
    assert result.residue[0].line_no == 1, f"Unexpected residue {result.residue}"


def test_parser_without_stories():
    """Text with no story sentence yields no stories, only residue"""
    result = parse_document("I cannot help with that.")
    assert result.stories == (), f"Unexpected stories {result.stories}"
    assert len(result.residue) == 1, f"Expected the refusal as residue, got {result.residue}"


def test_placeholder_variants():
    """Bare tags, described tags and nested brackets are each one placeholder"""
    text = "Keep for [PLACEHOLDER] days; alert at [placeholder: gap [in %] per group]."
    found = extract_placeholders(text)

    assert len(found) == 2, f"Expected 2 placeholders, got {found}"
    assert found[0].description is None, f"Bare tag has a description: {found[0]}"
    assert found[1].description == "gap [in %] per group", f"Nested brackets split: {found[1].description!r}"
    assert text[found[1].raw_span[0]:found[1].raw_span[1]].endswith("group]"), "Span does not cover the tag"


def test_unterminated_placeholder_warns():
    """An unclosed tag is reported and not counted"""
    placeholders, warnings = scan_placeholders("Retain for [PLACEHOLDER: retention period")

    assert placeholders == [], f"Unterminated tag counted: {placeholders}"
    assert len(warnings) == 1, f"Expected one warning, got {warnings}"


@pytest.mark.parametrize("name", ["headings.md", "bold_labels.md", "plain_bullets.md"])
def test_emitted_markdown_parses_back(name):
    """Canonical markdown round-trips to the same stories with no residue"""
    stories = parse_stories((FIXTURES / "stories" / name).read_text(encoding="utf-8"))
    restored = parse_document(emit_markdown(stories, {"title": "Fake review detector"}))

    assert restored.stories == tuple(stories), f"{name}: stories changed through canonical markdown"
    assert restored.residue == (), f"{name}: canonical markdown left residue {restored.residue}"


def test_emitted_markdown_keeps_spoken_article():
    """A parsed 'As a user' story is written back with 'a', not 'an'"""
    stories = parse_stories("As a user, I want to see scores, so that I trust them.\n")
    text = emit_markdown(stories)

    assert "As a user, I want to see scores, so that I trust them." in text, f"Article changed in {text!r}"


def test_emitted_markdown_lists_placeholders():
    """The placeholder index names story and criterion for each tag"""
    stories = parse_stories(FINAL_DOCUMENT)

    assert placeholder_index(stories) == ["US-2 / AC-2.2: retention period"], \
        f"Unexpected index {placeholder_index(stories)}"
    assert "No placeholders." in emit_markdown(parse_stories(DRAFT)), "Empty index not stated"


def test_final_document_needs_stories():
    """A final document with no stories is refused"""
    with pytest.raises(ValueError):
        emit_markdown([])


@pytest.mark.parametrize("text,expected", [
    ("Data shall be encrypted in transit and access is logged",
     ["Data shall be encrypted in transit.", "Access is logged."]),
    ("All video data shall be encrypted in transit and encrypted at rest",
     ["All video data shall be encrypted in transit.", "All video data shall be encrypted at rest."]),
    ("The app shall show the score and the reason",
     ["The app shall show the score and the reason."]),
    ("The notice shall list the model name, the version, and the date",
     ["The notice shall list the model name, the version, and the date."]),
    ("The system shall log every decision and notify the reviewer",
     ["The system shall log every decision.", "The system shall notify the reviewer."]),
])
def test_split_obligations(text, expected):
    """Only independent obligations joined by 'and' are split"""
    assert split_obligations(text) == expected, f"Unexpected split {split_obligations(text)}"


def _story():
    return UserStory(
        id="US-3", role_clause="shopper", want_clause="to see why a review was hidden",
        criteria=(
            AcceptanceCriterion(id="AC-3.1", text="Hidden reviews are marked and the reason is displayed"),
            AcceptanceCriterion(id="AC-3.2", text="The reason names the detection signal."),
        ),
        themes=("Transparency",),
    )


def test_rule_decomposition_traces_sources():
    """Each requirement points back to its story and criterion"""
    requirements = decompose(_story())

    assert [r.id for r in requirements] == ["R-3.1", "R-3.2", "R-3.3"], f"Unexpected ids {[r.id for r in requirements]}"
    assert [r.source_criterion_id for r in requirements] == ["AC-3.1", "AC-3.1", "AC-3.2"], \
        "Source criteria not kept"
    assert all(r.themes == ("Transparency",) for r in requirements), "Story themes not inherited"


def test_story_without_criteria_becomes_one_requirement():
    """A bare story still yields a requirement built from its sentence"""
    story = UserStory(id="US-1", role_clause="auditor", want_clause="to export decisions")
    (requirement,) = decompose(story)

    assert requirement.text == "As an auditor, I want to export decisions.", f"Unexpected text {requirement.text!r}"
    assert requirement.source_criterion_id is None, "No criterion should be referenced"


def test_llm_decomposition_uses_provider_output(run_config):
    """Well-formed LLM output replaces the rule split"""
    provider = ScriptedProvider(["AC-3.1 | Hidden reviews are marked\nAC-3.1 | The reason is shown\n"
                                 "AC-3.2 | The reason names the detection signal"])
    requirements = decompose(_story(), "llm", provider, run_config)

    assert [r.text for r in requirements] == [
        "Hidden reviews are marked.", "The reason is shown.", "The reason names the detection signal.",
    ], f"Unexpected texts {[r.text for r in requirements]}"


@pytest.mark.parametrize("entry", [
    "AC-3.1 | Hidden reviews are marked",
    ProviderError(ProviderErrorKind.TIMEOUT, "slow"),
])
def test_llm_decomposition_falls_back_to_rules(entry, run_config):
    """Uncovered criteria or a provider failure fall back to rule mode with a warning"""
    warnings = []
    requirements = decompose(_story(), "llm", ScriptedProvider([entry]), run_config, warnings)

    assert len(requirements) == 3, f"Expected the rule split, got {len(requirements)}"
    assert len(warnings) == 1 and "US-3" in warnings[0], f"Unexpected warnings {warnings}"


def test_unknown_decomposition_mode():
    """Only rule and llm modes exist"""
    with pytest.raises(ValueError):
        decompose(_story(), "magic")


def test_export_and_load_requirements(tmp_path):
    """Exported requirements load back with their ids and sources"""
    requirements = decompose_all(parse_stories(FINAL_DOCUMENT))
    path = export_requirements(requirements, tmp_path / "out" / "requirements.jsonl")

    loaded = load_requirements(path)

    assert [r.id for r in loaded] == [r.id for r in requirements], "Requirement ids changed"
    assert loaded[-1].placeholders[0].description == "retention period", "Placeholder lost in export"


def test_load_rejects_duplicates_and_missing_header(tmp_path):
    """Duplicate ids and headerless files are format errors"""
    duplicate = tmp_path / "dup.jsonl"
    duplicate.write_text(
        '{"schema": "malea.requirements", "version": 1}\n'
        '{"id": "R-1.1", "text": "A.", "story_id": "US-1"}\n'
        '{"id": "R-1.1", "text": "B.", "story_id": "US-1"}\n',
        encoding="utf-8",
    )
    headless = tmp_path / "headless.jsonl"
    headless.write_text('{"id": "R-1.1", "text": "A.", "story_id": "US-1"}\n', encoding="utf-8")

    for path in (duplicate, headless):
        with pytest.raises(FormatError):
            load_requirements(path)
