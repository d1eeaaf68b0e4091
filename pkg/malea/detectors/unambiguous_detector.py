import re
from functools import lru_cache

from malea.detectors.violation import QualityCriterion, Violation
from malea.stories.placeholders import extract_placeholders


@lru_cache(maxsize=512)
def _term_pattern(term):
    return re.compile(r"(?<![\w-])" + re.escape(term) + r"(?![\w-])", re.IGNORECASE)


def _lexicon_hits(text, lexicon):
    # every term is counted on its own, so dropping a term never adds hits
    hits = [(term, m.span()) for term in lexicon for m in _term_pattern(term).finditer(text)]
    return sorted(hits, key=lambda hit: (hit[1], hit[0]))


def detect_unambiguous(story, lexicon):
    """
    Flag vague terms from the lexicon in the story sentence and its criteria,
    and unresolved placeholders in the story sentence.

    Placeholders inside acceptance criteria are allowed; they mark values
    awaiting stakeholder input.

    Will trigger:
    - "so that the app is user-friendly"
    - "The system responds fast"
    - "As a [PLACEHOLDER: stakeholder], I want ..."

    Will NOT trigger:
    - "breakfast" for the term "fast" (whole-word match only)
    """
    violations = []
    sentence = story.sentence

    for term, span in _lexicon_hits(sentence, lexicon):
        violations.append(Violation(
            criterion=QualityCriterion.UNAMBIGUOUS,
            story_id=story.id,
            span=span,
            rationale=f"vague term '{term}' can be read in more than one way",
            text=sentence,
        ))
    for placeholder in extract_placeholders(sentence):
        violations.append(Violation(
            criterion=QualityCriterion.UNAMBIGUOUS,
            story_id=story.id,
            span=placeholder.raw_span,
            rationale="unresolved placeholder in the story sentence",
            text=sentence,
        ))

    for criterion in story.criteria:
        for term, span in _lexicon_hits(criterion.text, lexicon):
            violations.append(Violation(
                criterion=QualityCriterion.UNAMBIGUOUS,
                story_id=story.id,
                criterion_id=criterion.id,
                span=span,
                rationale=f"vague term '{term}' can be read in more than one way",
                text=criterion.text,
            ))
    return violations
