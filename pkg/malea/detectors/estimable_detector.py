import re

from malea.detectors.violation import QualityCriterion, Violation

UNITS = (
    r"ms|milliseconds?|s|secs?|seconds?|minutes?|mins?|hours?|hrs?|h|days?|weeks?|months?|years?"
    r"|kb|mb|gb|tb|fps|px|pt|dpi|users?|requests?|times|attempts?|clicks?|steps?|languages?"
    r"|dialects?|characters?|words?|items?|reviews?|videos?|samples?|records?|signers?"
)
QUANTITY_RE = re.compile(r"\b\d+(?:[.,]\d+)?\s*(?:" + UNITS + r")\b", re.IGNORECASE)
PERCENT_RE = re.compile(r"\d+(?:\.\d+)?\s*(?:%|percent\b)", re.IGNORECASE)
CONDITION_RE = re.compile(
    r"\b(?:at\s+least|at\s+most|no\s+more\s+than|no\s+fewer\s+than|no\s+less\s+than|up\s+to"
    r"|within|maximum\s+of|minimum\s+of|exactly|fewer\s+than|more\s+than|less\s+than)\s+\d"
    r"|[<>≤≥]=?\s*\d"
    r"|\b(?:daily|weekly|monthly|quarterly|annually|yearly|hourly)\b"
    r"|\bevery\s+(?:\d+\s+)?(?:hour|day|week|month|quarter|year|release)s?\b"
    r"|\bp(?:95|99)\b",
    re.IGNORECASE,
)
STANDARD_RE = re.compile(
    r"\b(?:ISO(?:/IEC)?\s*\d+|WCAG(?:\s*\d(?:\.\d)?)?|GDPR|HIPAA|PDPL|CCPA|SOC\s*2|NIST\b|OWASP"
    r"|AES-?\d+|TLS\s*\d(?:\.\d)?|IEEE\s*\d+|PCI[- ]DSS|FIPS\s*\d+)",
    re.IGNORECASE,
)
SIGNALS = (
    ("quantity with unit", QUANTITY_RE),
    ("percentage", PERCENT_RE),
    ("enumerable condition", CONDITION_RE),
    ("named standard", STANDARD_RE),
)


def measurable_signal(text):
    """Name of the first measurable signal found in the text, or None."""
    for name, pattern in SIGNALS:
        if pattern.search(text):
            return name
    return None


def detect_estimable(story):
    """
    Flag a story none of whose criteria is measurable: no quantity with a
    unit, percentage, enumerable condition or named standard.

    Will NOT trigger:
    - "The system shall have a precision of 95%"
    - "Data is encrypted with AES-256"
    - "Bias audits run quarterly"

    Will trigger:
    - criteria like "The user is informed that the rating was adjusted."
    - a story with no criteria at all

    Known false positives: measurable but unit-less criteria ("exactly the
    three fields shown") unless the count is written with digits and a
    comparator.
    """
    if any(measurable_signal(c.text) for c in story.criteria):
        return []
    cited = " ".join(c.text for c in story.criteria) or story.sentence
    return [Violation(
        criterion=QualityCriterion.ESTIMABLE,
        story_id=story.id,
        span=(0, len(cited)),
        rationale="no acceptance criterion is measurable; add a quantity, percentage, bound or standard",
        text=cited,
    )]
