import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Protocol, Tuple, runtime_checkable


class FinishReason(str, Enum):
    STOP = "stop"
    LENGTH = "length"
    CONTENT_FILTER = "content_filter"
    OTHER = "other"


@dataclass(frozen=True)
class ChatRequest:
    """
    One agent turn. `history` is the shared transcript as (speaker label,
    content) pairs; `speaker` is the label taking the turn, so adapters can
    map its own earlier messages to the assistant role.
    """
    system_prompt: str
    history: Tuple[Tuple[str, str], ...]
    temperature: Optional[float]
    model_name: str
    seed: Optional[int] = None
    speaker: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "history", tuple((str(label), str(content)) for label, content in self.history))
        if not self.history:
            raise ValueError("chat request history must not be empty")
        if self.temperature is not None and not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside provider bounds [0, 2]")

    def canonical(self) -> str:
        payload = {
            "history": [list(item) for item in self.history],
            "model_name": self.model_name,
            "seed": self.seed,
            "speaker": self.speaker,
            "system_prompt": self.system_prompt,
            "temperature": self.temperature,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    def hash(self) -> str:
        return request_hash(self)


def request_hash(request: ChatRequest) -> str:
    return hashlib.sha256(request.canonical().encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ChatResponse:
    content: str
    tokens_in: int = 0
    tokens_out: int = 0
    finish_reason: FinishReason = FinishReason.STOP

    def __post_init__(self):
        object.__setattr__(self, "finish_reason", FinishReason(self.finish_reason))
        if self.finish_reason is FinishReason.STOP and not (self.content or "").strip():
            raise ValueError("a completed response must have content")

    def to_record(self) -> dict:
        return {
            "content": self.content,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "finish_reason": self.finish_reason.value,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ChatResponse":
        return cls(
            content=record.get("content", ""),
            tokens_in=int(record.get("tokens_in", 0)),
            tokens_out=int(record.get("tokens_out", 0)),
            finish_reason=FinishReason(record.get("finish_reason", "stop")),
        )


@runtime_checkable
class Provider(Protocol):
    def complete(self, request: ChatRequest) -> ChatResponse:
        ...
