"""
Shared domain vocabulary: descriptions, agents, phases, messages, stories and
requirements. Every type here is an immutable value.
"""
import re
import uuid
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple


class AgentRole(str, Enum):
    REQUIREMENTS_ENGINEER = "RequirementsEngineer"
    QUALITY_ASSURANCE = "QualityAssurance"
    ETHICS_ADVOCATE = "EthicsAdvocate"
    DOCUMENTARIAN = "Documentarian"
    CONTROLLER = "Controller"

    @property
    def is_llm_agent(self) -> bool:
        return self is not AgentRole.CONTROLLER


class Phase(str, Enum):
    DRAFTING = "Drafting"
    QUALITY_REVIEW = "QualityReview"
    ETHICS_REVIEW = "EthicsReview"
    DOCUMENTATION = "Documentation"
    DONE = "Done"

    @property
    def rank(self) -> int:
        return _PHASE_ORDER.index(self)


_PHASE_ORDER = [
    Phase.DRAFTING,
    Phase.QUALITY_REVIEW,
    Phase.ETHICS_REVIEW,
    Phase.DOCUMENTATION,
    Phase.DONE,
]


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


@dataclass(frozen=True)
class SystemDescription:
    title: str
    body: str

    def __post_init__(self):
        if not self.body or not self.body.strip():
            raise ValueError("system description body must not be empty")

    @classmethod
    def from_file(cls, path) -> "SystemDescription":
        """The first `# ` heading is the title; everything else is the body."""
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        title = None
        body_lines = []
        for line in text.splitlines():
            if title is None and line.startswith("# "):
                title = line[2:].strip()
                continue
            body_lines.append(line)
        return cls(title=title or path.stem.replace("_", " "), body="\n".join(body_lines).strip())


@dataclass(frozen=True)
class Message:
    seq: int
    role: AgentRole
    phase: Phase
    content: str
    tokens_in: int = 0
    tokens_out: int = 0
    timestamp: str = ""
    metadata: Dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.seq < 0:
            raise ValueError("message seq must be non-negative")
        if not self.content or not self.content.strip():
            raise ValueError(f"message {self.seq} has empty content")
        if self.tokens_in < 0 or self.tokens_out < 0:
            raise ValueError("token counts must be non-negative")

    def to_record(self) -> dict:
        record = {
            "seq": self.seq,
            "role": self.role.value,
            "phase": self.phase.value,
            "content": self.content,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "timestamp": self.timestamp,
        }
        if self.metadata:
            record["metadata"] = self.metadata
        return record

    @classmethod
    def from_record(cls, record: dict) -> "Message":
        return cls(
            seq=int(record["seq"]),
            role=AgentRole(record["role"]),
            phase=Phase(record["phase"]),
            content=record["content"],
            tokens_in=int(record.get("tokens_in", 0)),
            tokens_out=int(record.get("tokens_out", 0)),
            timestamp=record.get("timestamp", ""),
            metadata=record.get("metadata") or {},
        )


@dataclass(frozen=True)
class Transcript:
    session_id: str
    config_snapshot: Any = None
    messages: Tuple[Message, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "messages", tuple(self.messages))
        if self.messages and self.messages[0].role is not AgentRole.CONTROLLER:
            raise ValueError("transcript must open with the Controller initiator")
        last_rank = 0
        for expected_seq, message in enumerate(self.messages):
            if message.seq != expected_seq:
                raise ValueError(f"transcript seq gap: expected {expected_seq}, got {message.seq}")
            if message.phase.rank < last_rank:
                raise ValueError(f"phase {message.phase.value} revisited at seq {message.seq}")
            last_rank = message.phase.rank

    @classmethod
    def new(cls, config_snapshot=None) -> "Transcript":
        return cls(session_id=uuid.uuid4().hex, config_snapshot=config_snapshot)

    @property
    def next_seq(self) -> int:
        return len(self.messages)

    def append(self, role: AgentRole, phase: Phase, content: str, tokens_in: int = 0,
               tokens_out: int = 0, timestamp: Optional[str] = None, metadata=None) -> "Transcript":
        message = Message(
            seq=self.next_seq,
            role=role,
            phase=phase,
            content=content,
            tokens_in=tokens_in,
            tokens_out=tokens_out,
            timestamp=timestamp if timestamp is not None else utc_now(),
            metadata=dict(metadata or {}),
        )
        return self.with_message(message)

    def with_message(self, message: Message) -> "Transcript":
        return replace(self, messages=self.messages + (message,))

    def contents(self) -> Tuple[Tuple[str, str, str], ...]:
        """(role, phase, content) triples, the part of a transcript replay must reproduce."""
        return tuple((m.role.value, m.phase.value, m.content) for m in self.messages)


@dataclass(frozen=True)
class Placeholder:
    raw_span: Tuple[int, int]
    description: Optional[str] = None

    def __post_init__(self):
        start, end = self.raw_span
        if start < 0 or end <= start:
            raise ValueError(f"invalid placeholder span {self.raw_span}")


@dataclass(frozen=True)
class AcceptanceCriterion:
    id: str
    text: str

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError(f"acceptance criterion {self.id} is empty")

    @property
    def placeholders(self) -> Tuple[Placeholder, ...]:
        from malea.stories.placeholders import extract_placeholders
        return tuple(extract_placeholders(self.text))


# Vowel letters sounded as "you"/"w" take "a" (a user, a unique id, a one-time code);
# a silent h takes "an" (an hourly worker).
CONSONANT_SOUND_RE = re.compile(r"^(?:u[bcfhjklmpqrstvz][aeiou]|uni(?![mn])|eu|ewe|one\b|once\b)", re.IGNORECASE)
SILENT_H_RE = re.compile(r"^(?:hour|honest|honou?r|heir)", re.IGNORECASE)


def indefinite_article(word: str) -> str:
    head = word.split(maxsplit=1)[0] if word.strip() else word
    if len(head) > 1 and head.isupper():
        return "an" if head[0] in "AEFHILMNORSX" else "a"
    if CONSONANT_SOUND_RE.match(word):
        return "a"
    if SILENT_H_RE.match(word):
        return "an"
    return "an" if word[:1].lower() in "aeiou" else "a"


@dataclass(frozen=True)
class UserStory:
    id: str
    role_clause: str
    want_clause: str
    benefit_clause: Optional[str] = None
    criteria: Tuple[AcceptanceCriterion, ...] = ()
    themes: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.role_clause or not self.role_clause.strip():
            raise ValueError(f"story {self.id} has no role clause")
        if not self.want_clause or not self.want_clause.strip():
            raise ValueError(f"story {self.id} has no want clause")
        object.__setattr__(self, "criteria", tuple(self.criteria))
        object.__setattr__(self, "themes", tuple(dict.fromkeys(t.strip() for t in self.themes if t.strip())))

    @property
    def sentence(self) -> str:
        text = f"As {indefinite_article(self.role_clause)} {self.role_clause}, I want {self.want_clause}"
        if self.benefit_clause:
            text += f", so that {self.benefit_clause}"
        return text + "."

    @property
    def number(self) -> str:
        match = re.search(r"(\d+)$", self.id)
        return match.group(1) if match else self.id

    def structure(self) -> tuple:
        """Id-independent shape used for round-trip comparisons."""
        return (
            self.role_clause,
            self.want_clause,
            self.benefit_clause,
            tuple(c.text for c in self.criteria),
            self.themes,
        )


@dataclass(frozen=True)
class DiscreteRequirement:
    id: str
    text: str
    source_story_id: str
    source_criterion_id: Optional[str] = None
    themes: Tuple[str, ...] = ()

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError(f"requirement {self.id} is empty")
        object.__setattr__(self, "themes", tuple(self.themes))

    @property
    def placeholders(self) -> Tuple[Placeholder, ...]:
        from malea.stories.placeholders import extract_placeholders
        return tuple(extract_placeholders(self.text))
