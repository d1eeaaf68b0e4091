"""
Turn acceptance criteria into discrete requirement statements.

Rule mode keeps one requirement per criterion, except where the criterion's
top level is a conjunction of independent obligations:

    "Data shall be encrypted in transit and access is logged"      -> 2
    "All video data shall be encrypted in transit and encrypted at rest" -> 2
    "The app shall show the score and the reason"                  -> 1

Known false positives: relative clauses carrying their own "is/are"
("... and data that is stored") split even though they are one obligation.
"""
import logging
import re
from typing import List, Optional, Sequence, Tuple

from malea.errors import ProviderError
from malea.models import DiscreteRequirement, UserStory, indefinite_article
from malea.personas import build_decompose_request

logger = logging.getLogger(__name__)

MODAL_RE = re.compile(r"\b(?:shall|must|should|will|can|may)\b|\b(?:is|are)\s+\w+(?:ed|en)\b", re.IGNORECASE)
CHAIN_RE = re.compile(
    r"^(?P<head>.*?\b(?:shall|must|should|will|can|may)(?:\s+not)?(?P<be>\s+be)?)\s+\S",
    re.IGNORECASE,
)
AND_RE = re.compile(r",?\s+and\s+", re.IGNORECASE)

IRREGULAR_PARTICIPLES = {
    "kept", "sent", "held", "made", "shown", "built", "run", "done", "given", "written", "known",
    "shared", "stored", "hidden", "taken", "read", "set", "put", "sold", "told", "found",
}
BASE_VERBS = {
    "provide", "display", "show", "log", "record", "store", "delete", "encrypt", "notify", "inform",
    "allow", "support", "explain", "document", "report", "track", "flag", "offer", "include",
    "enable", "require", "send", "receive", "retain", "remove", "restrict", "verify", "validate",
    "update", "maintain", "alert", "warn", "present", "indicate", "label", "publish", "audit",
    "monitor", "measure", "evaluate", "review", "respond", "reject", "accept", "collect", "anonymize",
    "process", "translate", "detect", "classify", "filter", "generate", "escalate", "acknowledge",
    "limit", "prevent", "protect", "disclose", "describe", "list", "mark", "link", "undergo",
}


def _split_and(text: str) -> List[Tuple[str, str]]:
    """(separator, part) pairs for " and " splits outside brackets; the first separator is ""."""
    pieces = []
    depth = 0
    start = 0
    separator = ""
    i = 0
    while i < len(text):
        ch = text[i]
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth = max(0, depth - 1)
        elif depth == 0:
            match = AND_RE.match(text, i)
            if match:
                pieces.append((separator, text[start:i]))
                separator = match.group(0)
                start = match.end()
                i = match.end()
                continue
        i += 1
    pieces.append((separator, text[start:]))
    return [(sep, part.strip()) for sep, part in pieces if part.strip()]


def _is_participle(word: str) -> bool:
    word = word.lower()
    return word.endswith("ed") or word.endswith("en") or word in IRREGULAR_PARTICIPLES


def _sentence(text: str) -> str:
    text = text.strip().rstrip(".;")
    return text[:1].upper() + text[1:] + "."


def split_obligations(text: str) -> List[str]:
    pieces = _split_and(text)
    if len(pieces) <= 1:
        return [_sentence(text)]

    chain = CHAIN_RE.match(pieces[0][1])
    clauses = [pieces[0][1]]
    for separator, part in pieces[1:]:
        first_word = part.split()[0].strip(",") if part.split() else ""
        if MODAL_RE.search(part):
            clauses.append(part)
        elif chain and chain.group("be") and _is_participle(first_word):
            clauses.append(f"{chain.group('head')} {part}")
        elif chain and not chain.group("be") and first_word.lower() in BASE_VERBS:
            clauses.append(f"{chain.group('head')} {part}")
        else:
            clauses[-1] = f"{clauses[-1]}{separator}{part}"
    return [_sentence(c) for c in clauses]


def _requirement_prefix(story: UserStory) -> str:
    return f"R-{story.number}"


def decompose_rule(story: UserStory) -> List[DiscreteRequirement]:
    prefix = _requirement_prefix(story)
    requirements = []
    if not story.criteria:
        text = _sentence(f"As {indefinite_article(story.role_clause)} {story.role_clause}, I want {story.want_clause}")
        return [DiscreteRequirement(id=f"{prefix}.1", text=text, source_story_id=story.id, themes=story.themes)]
    for criterion in story.criteria:
        for clause in split_obligations(criterion.text):
            requirements.append(DiscreteRequirement(
                id=f"{prefix}.{len(requirements) + 1}",
                text=clause,
                source_story_id=story.id,
                source_criterion_id=criterion.id,
                themes=story.themes,
            ))
    return requirements


LLM_LINE_RE = re.compile(r"^\s*[-*]?\s*(?P<cid>AC-\d+\.\d+)\s*\|\s*(?P<text>.+?)\s*$", re.IGNORECASE)


def parse_llm_output(story: UserStory, text: str) -> List[DiscreteRequirement]:
    known = {c.id.upper(): c.id for c in story.criteria}
    prefix = _requirement_prefix(story)
    requirements = []
    for line in text.splitlines():
        match = LLM_LINE_RE.match(line)
        if not match:
            continue
        criterion_id = known.get(match.group("cid").upper())
        if criterion_id is None:
            continue
        requirements.append(DiscreteRequirement(
            id=f"{prefix}.{len(requirements) + 1}",
            text=_sentence(match.group("text")),
            source_story_id=story.id,
            source_criterion_id=criterion_id,
            themes=story.themes,
        ))
    return requirements


def decompose_llm(story: UserStory, provider, config, warnings: Optional[list] = None) -> List[DiscreteRequirement]:
    if not story.criteria:
        return decompose_rule(story)
    try:
        response = provider.complete(build_decompose_request(story, config))
        requirements = parse_llm_output(story, response.content)
    except ProviderError as e:
        requirements = []
        reason = f"provider failed ({e.kind.value})"
    else:
        covered = {r.source_criterion_id for r in requirements}
        missing = [c.id for c in story.criteria if c.id not in covered]
        reason = f"criteria not covered: {', '.join(missing)}" if missing else None
    if reason is None:
        return requirements

    message = f"{story.id}: LLM decomposition rejected ({reason}); using rule mode"
    logger.warning(message)
    if warnings is not None:
        warnings.append(message)
    return decompose_rule(story)


def decompose(story: UserStory, mode: str = "rule", provider=None, config=None,
              warnings: Optional[list] = None) -> List[DiscreteRequirement]:
    if mode == "rule":
        return decompose_rule(story)
    if mode == "llm":
        if provider is None or config is None:
            raise ValueError("llm decomposition needs a provider and a run config")
        return decompose_llm(story, provider, config, warnings)
    raise ValueError(f"unknown decomposition mode '{mode}'")


def decompose_all(stories: Sequence[UserStory], mode: str = "rule", provider=None, config=None,
                  warnings: Optional[list] = None) -> List[DiscreteRequirement]:
    requirements = []
    for story in stories:
        requirements.extend(decompose(story, mode, provider, config, warnings))
    return requirements
