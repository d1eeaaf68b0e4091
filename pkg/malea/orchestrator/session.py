import logging
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Tuple

from malea.detectors.run_all import lint_report, load_lexicon
from malea.errors import ProviderError, ProviderErrorKind, SessionAborted
from malea.models import AgentRole, Phase, SystemDescription, Transcript, UserStory, utc_now
from malea.orchestrator.state import (
    Termination, add_reformat_request, start_state, step,
)
from malea.personas import (
    LABELS, build_agent_request, build_baseline_prompt, build_initiator, build_persona, reformat_request_text,
)
from malea.providers.base import ChatRequest
from malea.stories.parser import ResidueLine, parse_document

logger = logging.getLogger(__name__)


class SessionStatus(str, Enum):
    APPROVED = "Approved"
    CYCLE_LIMIT = "CycleLimit"
    COMPLETED = "Completed"
    PARSE_FAILURE = "ParseFailure"


@dataclass(frozen=True)
class SessionResult:
    final_document: str
    stories: Tuple[UserStory, ...]
    transcript: Transcript
    termination: Dict[Phase, Termination]
    status: SessionStatus
    provider_calls: int
    mode: str = "malea"
    title: str = ""
    qa_critiques_used: int = 0
    ea_critiques_used: int = 0
    residue: Tuple[ResidueLine, ...] = ()
    lint_annotations: Tuple[dict, ...] = ()
    started_at: str = ""
    finished_at: str = ""

    def termination_summary(self) -> Dict[str, str]:
        return {phase.value: outcome.value for phase, outcome in self.termination.items()}

    @property
    def placeholder_count(self) -> int:
        count = 0
        for story in self.stories:
            count += sum(len(c.placeholders) for c in story.criteria)
        return count


def _status(stories, termination: Dict[Phase, Termination], baseline: bool) -> SessionStatus:
    if not stories:
        return SessionStatus.PARSE_FAILURE
    if baseline:
        return SessionStatus.COMPLETED
    if any(t is Termination.CYCLE_LIMIT for t in termination.values()):
        return SessionStatus.CYCLE_LIMIT
    return SessionStatus.APPROVED


def _call(provider, request: ChatRequest, transcript: Transcript):
    try:
        response = provider.complete(request)
    except ProviderError as e:
        logger.error("Session aborted: %s", e)
        raise SessionAborted(e, transcript)
    if not (response.content or "").strip():
        cause = ProviderError(ProviderErrorKind.MALFORMED, f"empty reply for {request.speaker}")
        raise SessionAborted(cause, transcript)
    return response


def _lint_metadata(content: str, lexicon) -> dict:
    stories = parse_document(content).stories
    report = lint_report(stories, lexicon)
    return {"lint": {criterion.value: count for criterion, count in report.by_criterion.items()}}


def run_session(config, description: SystemDescription, provider,
                clock: Callable[[], str] = utc_now, lexicon=None) -> SessionResult:
    started_at = clock()
    transcript = Transcript.new(config.to_dict()).with_message(build_initiator(description, config, clock()))
    state = start_state(transcript, config.max_critique_cycles)
    personas = {
        role: build_persona(role, config.themes, config, description.title)
        for role in (AgentRole.REQUIREMENTS_ENGINEER, AgentRole.QUALITY_ASSURANCE,
                     AgentRole.ETHICS_ADVOCATE, AgentRole.DOCUMENTARIAN)
    }
    if config.lint_gate and lexicon is None:
        lexicon = load_lexicon()
    annotations: List[dict] = []

    logger.info("Session %s started for '%s' (max %d critique cycles)",
                transcript.session_id, description.title, config.max_critique_cycles)
    while state.phase is not Phase.DONE:
        if state.pending_reformat:
            state = add_reformat_request(state, reformat_request_text(), clock())
        role = state.awaiting
        request = build_agent_request(role, personas[role], state.transcript, config)
        response = _call(provider, request, state.transcript)

        metadata = {}
        if config.lint_gate and role is AgentRole.REQUIREMENTS_ENGINEER:
            metadata = _lint_metadata(response.content, lexicon)
            annotations.append({"seq": state.transcript.next_seq, "phase": state.phase.value, **metadata["lint"]})
            logger.info("Lint gate on RE output (seq %d): %s", state.transcript.next_seq, metadata["lint"])

        message = state.transcript.append(
            role, state.phase, response.content, response.tokens_in, response.tokens_out, clock(), metadata,
        ).messages[-1]
        state = step(state, message)

    parsed = parse_document(state.final_document or "")
    status = _status(parsed.stories, state.termination, baseline=False)
    if status is SessionStatus.PARSE_FAILURE:
        logger.error("Final document yielded no stories; raw text kept for review")
    logger.info("Session %s finished: %s in %d provider calls", transcript.session_id, status.value,
                state.provider_calls)
    return SessionResult(
        final_document=state.final_document or "",
        stories=parsed.stories,
        transcript=state.transcript,
        termination=dict(state.termination),
        status=status,
        provider_calls=state.provider_calls,
        title=description.title,
        qa_critiques_used=state.qa_critiques_used,
        ea_critiques_used=state.ea_critiques_used,
        residue=parsed.residue,
        lint_annotations=tuple(annotations),
        started_at=started_at,
        finished_at=clock(),
    )


def run_baseline(config, description: SystemDescription, provider,
                 clock: Callable[[], str] = utc_now) -> SessionResult:
    """Single-LLM comparison: the initiator text alone, vendor-default temperature, no critics."""
    started_at = clock()
    prompt = build_baseline_prompt(description, config)
    transcript = Transcript.new(config.to_dict()).append(AgentRole.CONTROLLER, Phase.DRAFTING, prompt,
                                                         timestamp=clock())
    request = ChatRequest(
        system_prompt="",
        history=((LABELS[AgentRole.CONTROLLER], prompt),),
        temperature=None,
        model_name=config.model_name,
        seed=config.seed,
        speaker=LABELS[AgentRole.REQUIREMENTS_ENGINEER],
    )
    response = _call(provider, request, transcript)
    transcript = transcript.append(AgentRole.REQUIREMENTS_ENGINEER, Phase.DRAFTING, response.content,
                                   response.tokens_in, response.tokens_out, clock())
    parsed = parse_document(response.content)
    termination = {Phase.QUALITY_REVIEW: Termination.SKIPPED, Phase.ETHICS_REVIEW: Termination.SKIPPED}
    status = _status(parsed.stories, termination, baseline=True)
    logger.info("Baseline finished: %d stories, status %s", len(parsed.stories), status.value)
    return SessionResult(
        final_document=response.content,
        stories=parsed.stories,
        transcript=transcript,
        termination=termination,
        status=status,
        provider_calls=1,
        mode="baseline",
        title=description.title,
        residue=parsed.residue,
        started_at=started_at,
        finished_at=clock(),
    )
