"""
Agent system prompts, the chat initiator, and the approval-phrase contract.

Prompts are Jinja2 templates under malea/data/personas; manifest.yaml lists
the fragments every rendered prompt must contain verbatim.
"""
import logging
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple

import jinja2
import yaml

from malea.errors import PersonaError
from malea.models import AgentRole, Message, Phase, SystemDescription, Transcript, UserStory, utc_now
from malea.providers.base import ChatRequest

logger = logging.getLogger(__name__)

PERSONA_DIR = Path(__file__).resolve().parent.parent / "data" / "personas"

NUMBER_WORDS = (
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
    "eleven", "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen",
    "nineteen", "twenty",
)

QUALITY_APPROVAL = "The requirements are approved from a quality point of view."
ETHICS_APPROVAL = "The requirements are approved from an ethics point of view."

_APPROVAL_PATTERNS = {
    AgentRole.QUALITY_ASSURANCE: re.compile(
        r"the\s+requirements\s+are\s+approved\s+from\s+a\s+quality\s+point\s+of\s+view", re.IGNORECASE),
    AgentRole.ETHICS_ADVOCATE: re.compile(
        r"the\s+requirements\s+are\s+approved\s+from\s+an?\s+ethics\s+point\s+of\s+view", re.IGNORECASE),
}

LABELS = {
    AgentRole.REQUIREMENTS_ENGINEER: "Requirements Engineer",
    AgentRole.QUALITY_ASSURANCE: "Quality Assurance",
    AgentRole.ETHICS_ADVOCATE: "Ethics Advocate",
    AgentRole.DOCUMENTARIAN: "Documentation Assistant",
    AgentRole.CONTROLLER: "User",
}


@dataclass(frozen=True)
class PersonaPrompt:
    role: AgentRole
    text: str
    verbatim_fragments: Tuple[str, ...]

    def __post_init__(self):
        missing = [f for f in self.verbatim_fragments if f not in self.text]
        if missing:
            raise PersonaError(f"{self.role.value} prompt is missing fragment(s): {missing}")


def number_word(n: int) -> str:
    return NUMBER_WORDS[n] if 0 <= n < len(NUMBER_WORDS) else str(n)


def join_names(names: Sequence[str]) -> str:
    names = list(names)
    if len(names) <= 1:
        return "".join(names)
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


class PersonaLibrary:
    """Loaded templates plus their fragment manifest."""

    def __init__(self, directory=PERSONA_DIR):
        self.directory = Path(directory)
        try:
            self.manifest = yaml.safe_load((self.directory / "manifest.yaml").read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as e:
            raise PersonaError(f"cannot read persona manifest in {self.directory}: {e}")
        self.env = jinja2.Environment(
            loader=jinja2.FileSystemLoader(str(self.directory)),
            undefined=jinja2.StrictUndefined,
            autoescape=False,
        )
        self.roles: Dict[AgentRole, dict] = {}
        for name, entry in (self.manifest.get("roles") or {}).items():
            try:
                role = AgentRole(name)
            except ValueError:
                raise PersonaError(f"manifest names unknown role '{name}'")
            self.roles[role] = {"template": entry["template"], "fragments": tuple(entry.get("fragments") or ())}

    def render(self, template_name: str, **context) -> str:
        try:
            return self.env.get_template(template_name).render(**context).strip()
        except jinja2.TemplateError as e:
            raise PersonaError(f"template {template_name}: {e}")

    def template_for(self, key: str) -> str:
        name = self.manifest.get(key)
        if not name:
            raise PersonaError(f"manifest has no '{key}' template")
        return name

    def persona(self, role: AgentRole, themes, config, title: str = "") -> PersonaPrompt:
        role = AgentRole(role)
        if role not in self.roles:
            raise PersonaError(f"no persona for role {role.value}")
        entry = self.roles[role]
        text = self.render(entry["template"], **_context(themes, config, title))
        fragments = entry["fragments"]
        if role is AgentRole.ETHICS_ADVOCATE:
            fragments += tuple(label for theme in themes for label in theme.topic_labels)
        return PersonaPrompt(role=role, text=text, verbatim_fragments=fragments)

    def validate(self, config) -> None:
        for role in self.roles:
            self.persona(role, config.themes, config)


def _context(themes, config, title: str = "") -> dict:
    return {
        "themes": list(themes),
        "theme_list": join_names([t.name for t in themes]),
        "min_stories": config.min_stories,
        "min_stories_word": number_word(config.min_stories),
        "title": title or "System",
    }


def load_personas(directory=PERSONA_DIR, config=None) -> PersonaLibrary:
    library = PersonaLibrary(directory)
    if config is not None:
        library.validate(config)
    return library


@lru_cache(maxsize=4)
def _default_library() -> PersonaLibrary:
    return PersonaLibrary(PERSONA_DIR)


def build_persona(role: AgentRole, themes=None, config=None, title: str = "") -> PersonaPrompt:
    if AgentRole(role) is AgentRole.CONTROLLER:
        raise PersonaError("the Controller has no persona; it never produces LLM text")
    config = config or _default_config()
    themes = tuple(themes) if themes is not None else config.themes
    return _default_library().persona(role, themes, config, title)


def initiator_text(description: SystemDescription, config) -> str:
    context = _context(config.themes, config, description.title)
    return _default_library().render(_default_library().template_for("initiator"), description=description, **context)


def build_initiator(description: SystemDescription, config, timestamp: Optional[str] = None) -> Message:
    return Message(
        seq=0,
        role=AgentRole.CONTROLLER,
        phase=Phase.DRAFTING,
        content=initiator_text(description, config),
        timestamp=timestamp if timestamp is not None else utc_now(),
    )


def build_baseline_prompt(description: SystemDescription, config) -> str:
    context = _context(config.themes, config, description.title)
    return _default_library().render(_default_library().template_for("baseline"), description=description, **context)


def reformat_request_text() -> str:
    return _default_library().render(_default_library().template_for("reformat"))


def approval_matcher(role: AgentRole) -> Callable[[str], bool]:
    pattern = _APPROVAL_PATTERNS.get(AgentRole(role))
    if pattern is None:
        raise PersonaError(f"{AgentRole(role).value} is not a critic; only QA and the Ethics Advocate approve")

    def matches(text: str) -> bool:
        return bool(pattern.search(" ".join((text or "").split())))

    return matches


def build_agent_request(role: AgentRole, persona: PersonaPrompt, transcript: Transcript, config) -> ChatRequest:
    """Group-chat turn: the persona prompt plus the full shared transcript."""
    return ChatRequest(
        system_prompt=persona.text,
        history=tuple((LABELS[m.role], m.content) for m in transcript.messages),
        temperature=config.temperature,
        model_name=config.model_name,
        seed=config.seed,
        speaker=LABELS[role],
    )


def build_decompose_request(story: UserStory, config) -> ChatRequest:
    lines = [story.sentence, ""]
    lines += [f"{c.id}: {c.text}" for c in story.criteria]
    return ChatRequest(
        system_prompt=_default_library().render(_default_library().template_for("decompose")),
        history=(("User", "\n".join(lines)),),
        temperature=0.0,
        model_name=config.model_name,
        seed=config.seed,
        speaker="Decomposer",
    )


def build_mapping_request(requirements, gold, config) -> ChatRequest:
    listing = "\n".join(f"{r.id}: {r.text}" for r in requirements)
    return ChatRequest(
        system_prompt=_default_library().render(_default_library().template_for("mapping"), gold=list(gold)),
        history=(("User", listing),),
        temperature=0.0,
        model_name=config.model_name,
        seed=config.seed,
        speaker="Mapper",
    )


def _default_config():
    from malea.config import RunConfig
    return RunConfig(provider_endpoint="http://localhost", model_name="unset")
