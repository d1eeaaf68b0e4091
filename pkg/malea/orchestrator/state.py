"""
Pure session state machine.

    Drafting          RE draft                      -> QualityReview
    QualityReview     QA approval                   -> EthicsReview
                      QA critique -> RE revision    (repeat up to max cycles)
    EthicsReview      same, with the Ethics Advocate -> Documentation
    Documentation     Documentarian                 -> Done

A critique cycle is one critic message plus the RE revision that answers it;
after the last permitted critique the revision still happens, then the phase
ends with CycleLimit.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, FrozenSet, Optional

from malea.errors import ProtocolViolation
from malea.models import AgentRole, Message, Phase, Transcript
from malea.personas import approval_matcher
from malea.stories.parser import parse_document

logger = logging.getLogger(__name__)


class Termination(str, Enum):
    APPROVED = "Approved"
    CYCLE_LIMIT = "CycleLimit"
    SKIPPED = "Skipped"


REVIEW_PHASES = {
    Phase.QUALITY_REVIEW: AgentRole.QUALITY_ASSURANCE,
    Phase.ETHICS_REVIEW: AgentRole.ETHICS_ADVOCATE,
}
NEXT_PHASE = {
    Phase.QUALITY_REVIEW: Phase.ETHICS_REVIEW,
    Phase.ETHICS_REVIEW: Phase.DOCUMENTATION,
}


@dataclass(frozen=True)
class SessionState:
    phase: Phase
    transcript: Transcript
    max_critique_cycles: int
    awaiting: Optional[AgentRole] = AgentRole.REQUIREMENTS_ENGINEER
    current_draft: str = ""
    qa_critiques_used: int = 0
    ea_critiques_used: int = 0
    final_document: Optional[str] = None
    termination: Dict[Phase, Termination] = field(default_factory=dict)
    provider_calls: int = 0
    reformats_used: FrozenSet[Phase] = frozenset()
    pending_reformat: bool = False

    def __post_init__(self):
        if self.qa_critiques_used > self.max_critique_cycles or self.ea_critiques_used > self.max_critique_cycles:
            raise ValueError("critique counter exceeds the configured maximum")

    @property
    def call_budget(self) -> int:
        return 2 + 4 * self.max_critique_cycles

    def critiques_used(self, phase: Phase) -> int:
        if phase is Phase.QUALITY_REVIEW:
            return self.qa_critiques_used
        if phase is Phase.ETHICS_REVIEW:
            return self.ea_critiques_used
        return 0


def start_state(transcript: Transcript, max_critique_cycles: int) -> SessionState:
    if not transcript.messages or transcript.messages[0].role is not AgentRole.CONTROLLER:
        raise ValueError("a session starts from a transcript holding the initiator")
    return SessionState(phase=Phase.DRAFTING, transcript=transcript, max_critique_cycles=max_critique_cycles)


def worst_case_remaining(state: SessionState) -> int:
    """Upper bound on provider calls still needed from this state, the awaited call included."""
    m = state.max_critique_cycles
    if state.phase is Phase.DONE:
        return 0
    if state.phase is Phase.DOCUMENTATION:
        return 1
    if state.phase is Phase.DRAFTING:
        return 1 + 4 * m + 1
    used = state.critiques_used(state.phase)
    later_reviews = 2 * m if state.phase is Phase.QUALITY_REVIEW else 0
    pending_revision = 1 if state.awaiting is AgentRole.REQUIREMENTS_ENGINEER else 0
    return pending_revision + 2 * (m - used) + later_reviews + 1


def _reformat_allowed(state: SessionState) -> bool:
    if state.phase in state.reformats_used:
        return False
    return state.provider_calls + 1 + worst_case_remaining(state) <= state.call_budget


def step(state: SessionState, incoming: Message) -> SessionState:
    if state.phase is Phase.DONE or incoming.role is not state.awaiting:
        raise ProtocolViolation(expected=state.awaiting, got=incoming.role, phase=state.phase)
    if incoming.phase is not state.phase:
        raise ProtocolViolation(expected=state.awaiting, got=incoming.role, phase=state.phase)

    transcript = state.transcript.with_message(incoming)
    role = incoming.role

    if role is AgentRole.REQUIREMENTS_ENGINEER:
        if not parse_document(incoming.content).stories and _reformat_allowed(state):
            logger.info("RE output in %s has no readable stories; requesting a reformat", state.phase.value)
            return replace(state, transcript=transcript, provider_calls=state.provider_calls + 1,
                           reformats_used=state.reformats_used | {state.phase}, pending_reformat=True)

    base = replace(state, transcript=transcript, provider_calls=state.provider_calls + 1, pending_reformat=False)

    if role is AgentRole.REQUIREMENTS_ENGINEER:
        base = replace(base, current_draft=incoming.content)
        if state.phase is Phase.DRAFTING:
            return _enter(base, Phase.QUALITY_REVIEW)
        if state.critiques_used(state.phase) >= state.max_critique_cycles:
            logger.info("%s ended by cycle limit after %d critiques", state.phase.value, state.max_critique_cycles)
            return _finish_review(base, Termination.CYCLE_LIMIT)
        return replace(base, awaiting=REVIEW_PHASES[state.phase])

    if role in (AgentRole.QUALITY_ASSURANCE, AgentRole.ETHICS_ADVOCATE):
        if approval_matcher(role)(incoming.content):
            logger.info("%s approved after %d critique(s)", state.phase.value, state.critiques_used(state.phase))
            return _finish_review(base, Termination.APPROVED)
        if state.phase is Phase.QUALITY_REVIEW:
            base = replace(base, qa_critiques_used=state.qa_critiques_used + 1)
        else:
            base = replace(base, ea_critiques_used=state.ea_critiques_used + 1)
        return replace(base, awaiting=AgentRole.REQUIREMENTS_ENGINEER)

    # Documentarian
    logger.info("Documentation complete")
    return replace(base, phase=Phase.DONE, awaiting=None, final_document=incoming.content)


def _enter(state: SessionState, phase: Phase) -> SessionState:
    awaiting = REVIEW_PHASES.get(phase, AgentRole.DOCUMENTARIAN)
    logger.info("Entering %s", phase.value)
    return replace(state, phase=phase, awaiting=awaiting)


def _finish_review(state: SessionState, outcome: Termination) -> SessionState:
    termination = dict(state.termination)
    termination[state.phase] = outcome
    return _enter(replace(state, termination=termination), NEXT_PHASE[state.phase])


def add_reformat_request(state: SessionState, content: str, timestamp: Optional[str] = None) -> SessionState:
    """Controller asks the RE to resend its stories; not a critique cycle."""
    if not state.pending_reformat:
        raise ValueError("no reformat is pending")
    transcript = state.transcript.append(AgentRole.CONTROLLER, state.phase, content, timestamp=timestamp)
    return replace(state, transcript=transcript, pending_reformat=False)
