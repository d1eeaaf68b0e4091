from malea.orchestrator.session import SessionResult, SessionStatus, run_baseline, run_session
from malea.orchestrator.state import (
    SessionState, Termination, add_reformat_request, start_state, step, worst_case_remaining,
)

__all__ = [
    "run_session", "run_baseline", "SessionResult", "SessionStatus",
    "SessionState", "Termination", "step", "start_state", "add_reformat_request", "worst_case_remaining",
]
