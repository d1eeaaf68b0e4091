"""
Deterministic provider for tests and offline demos.

Responses come from one shared queue or from per-speaker queues. An entry may
be a string, a ChatResponse, a ProviderError (raised when reached) or a
callable taking the ChatRequest.
"""
import logging
import threading
from collections import deque
from pathlib import Path
from typing import Dict, Iterable, List, Union

import yaml

from malea.errors import FormatError, ProviderError, ProviderErrorKind
from malea.providers.base import ChatRequest, ChatResponse

logger = logging.getLogger(__name__)


class ScriptedProvider:
    def __init__(self, script: Union[Iterable, Dict[str, Iterable]]):
        self._lock = threading.Lock()
        if isinstance(script, dict):
            self._queues = {str(role): deque(entries) for role, entries in script.items()}
            self._shared = None
        else:
            self._queues = {}
            self._shared = deque(script)
        self.calls: List[ChatRequest] = []

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            self.calls.append(request)
            queue = self._shared if self._shared is not None else self._queues.get(request.speaker)
            if not queue:
                raise ProviderError(ProviderErrorKind.REPLAY_MISS,
                                    f"script exhausted for speaker {request.speaker}")
            entry = queue.popleft()
        if isinstance(entry, ProviderError):
            raise entry
        if callable(entry):
            entry = entry(request)
        if isinstance(entry, ChatResponse):
            return entry
        return ChatResponse(content=str(entry))

    @property
    def call_count(self) -> int:
        return len(self.calls)


def load_script(path) -> ScriptedProvider:
    """
    Read a scripted session file: either a `responses` list or a `by_role`
    mapping of speaker label to response list.
    """
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise FormatError(path, None, f"invalid YAML: {e}")
    if isinstance(data, dict) and isinstance(data.get("by_role"), dict):
        return ScriptedProvider({role: list(items) for role, items in data["by_role"].items()})
    if isinstance(data, dict) and isinstance(data.get("responses"), list):
        return ScriptedProvider(list(data["responses"]))
    raise FormatError(path, None, "expected a 'responses' list or a 'by_role' mapping")
