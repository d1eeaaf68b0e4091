import re

from malea.detectors.violation import QualityCriterion, Violation

PAREN_RE = re.compile(r"\([^()]*\)")
NOTE_RE = re.compile(r"[.!?;]\s+\S|\s[-–—]\s+\S|\bnote\s*:", re.IGNORECASE)
EMBEDDED_RE = re.compile(
    r"\b(?:shall|must)\b"
    r"|\bwithin\s+\d"
    r"|\b(?:given|when)\b[^,]*,\s*then\b"
    r"|\bacceptance\s+criteri(?:a|on)\b",
    re.IGNORECASE,
)


def detect_minimal(story):
    """
    Flag story sentences carrying more than role, goal and benefit.

    Will trigger:
    - parenthetical asides: "to view my history (including deleted items)"
    - trailing notes: "so that I can verify it. Note that this applies to the web app only."
    - criteria inside the sentence: "to see translations within 5 seconds",
      "a notice that it must not be used for testimony"

    Will NOT trigger:
    - placeholders in square brackets (reported by the Unambiguous check)

    Known false positives: abbreviations with a period ("e.g. this") read as
    a sentence break.
    """
    text = story.sentence
    violations = []

    for match in PAREN_RE.finditer(text):
        violations.append(Violation(
            criterion=QualityCriterion.MINIMAL,
            story_id=story.id,
            span=match.span(),
            rationale="parenthetical aside in the story sentence; move it to an acceptance criterion or drop it",
            text=text,
        ))

    # the closing period of the sentence itself is not a note
    body = text[:-1] if text.endswith(".") else text
    note = NOTE_RE.search(body)
    if note:
        violations.append(Violation(
            criterion=QualityCriterion.MINIMAL,
            story_id=story.id,
            span=(note.start(), len(body)),
            rationale="trailing note after the story; keep only role, goal and benefit",
            text=text,
        ))

    embedded = EMBEDDED_RE.search(body)
    if embedded:
        violations.append(Violation(
            criterion=QualityCriterion.MINIMAL,
            story_id=story.id,
            span=embedded.span(),
            rationale="acceptance condition embedded in the story sentence; state it as a criterion",
            text=text,
        ))
    return violations
