import re

from malea.detectors.violation import QualityCriterion, Violation

ACTION_VERBS = {
    "access", "appeal", "approve", "audit", "book", "browse", "cancel", "capture", "change", "check",
    "choose", "communicate", "compare", "configure", "contact", "control", "correct", "create", "delete",
    "disable", "display", "document", "download", "edit", "enable", "export", "filter", "find", "flag",
    "get", "give", "hide", "import", "inspect", "know", "learn", "log", "login", "manage", "modify",
    "monitor", "notify", "opt", "pay", "print", "rate", "read", "receive", "record", "register",
    "reject", "remove", "report", "request", "restore", "review", "save", "search", "see", "select",
    "send", "set", "share", "show", "sign", "sort", "store", "submit", "track", "translate",
    "understand", "update", "upload", "use", "verify", "view", "withdraw",
}

LEAD_RE = re.compile(r"^(?:to\s+)?(?:be\s+able\s+to\s+|the\s+ability\s+to\s+)?", re.IGNORECASE)
COORD_RE = re.compile(r"\s*(?:,\s*)?\b(?:and/or|and|or)\b\s+|\s*&\s*", re.IGNORECASE)


def _first_word(text):
    text = LEAD_RE.sub("", text.strip())
    words = re.findall(r"[A-Za-z']+", text)
    return words[0].lower() if words else ""


def detect_atomic(story):
    """
    Flag a want clause that coordinates two or more verb phrases.

    Will trigger:
    - "to upload videos and manage my account"
    - "to view my history or export it"

    Will NOT trigger:
    - "instant translation and captions" (no leading verb)
    - "to know how and why the rating changed" (second conjunct is not a verb)

    Known false positives: nouns that double as verbs ("to see reports and
    record counts") read as two actions.
    """
    want = story.want_clause
    if _first_word(want) not in ACTION_VERBS:
        return []

    verbs = []
    for match in COORD_RE.finditer(want):
        following = want[match.end():]
        following = re.sub(r"^to\s+", "", following, flags=re.IGNORECASE)
        word = _first_word(following)
        if word in ACTION_VERBS:
            verbs.append((match, word))
    if not verbs:
        return []

    first_match, _ = verbs[0]
    span = (first_match.start(), len(want))
    names = ", ".join([_first_word(want)] + [w for _, w in verbs])
    return [Violation(
        criterion=QualityCriterion.ATOMIC,
        story_id=story.id,
        span=span,
        rationale=f"want clause combines several actions ({names}); split into one story per action",
        text=want,
    )]
