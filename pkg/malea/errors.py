"""
Exception hierarchy shared by every MALEA module.
"""
from enum import Enum
from typing import List, Optional


class MaleaError(Exception):
    """Base class for all MALEA failures."""


class ConfigError(MaleaError):
    def __init__(self, key: str, detail: str):
        self.key = key
        self.detail = detail
        super().__init__(f"config key '{key}': {detail}")


class ProviderErrorKind(str, Enum):
    AUTH = "Auth"
    RATE_LIMIT = "RateLimit"
    TIMEOUT = "Timeout"
    TRANSPORT = "Transport"
    CONTENT_FILTER = "ContentFilter"
    REPLAY_MISS = "ReplayMiss"
    MALFORMED = "Malformed"


RETRYABLE_KINDS = frozenset({
    ProviderErrorKind.RATE_LIMIT,
    ProviderErrorKind.TIMEOUT,
    ProviderErrorKind.TRANSPORT,
})


class ProviderError(MaleaError):
    """A failed chat completion. `retryable` follows from the kind."""

    def __init__(self, kind: ProviderErrorKind, detail: str):
        self.kind = ProviderErrorKind(kind)
        self.detail = detail
        super().__init__(f"{self.kind.value}: {detail}")

    @property
    def retryable(self) -> bool:
        return self.kind in RETRYABLE_KINDS


class PersonaError(MaleaError):
    pass


class ProtocolViolation(MaleaError):
    """An agent spoke out of turn (the persona-bleed guard)."""

    def __init__(self, expected, got, phase):
        self.expected = expected
        self.got = got
        self.phase = phase
        expected_label = expected.value if expected is not None else "nobody"
        super().__init__(
            f"protocol violation in phase {phase.value}: expected {expected_label}, got {got.value}"
        )


class SessionAborted(MaleaError):
    """Provider failure mid-session. Carries the partial transcript."""

    def __init__(self, cause: ProviderError, transcript):
        self.cause = cause
        self.transcript = transcript
        super().__init__(f"session aborted after {len(transcript.messages)} messages: {cause}")


class FormatError(MaleaError):
    def __init__(self, path, line: Optional[int], detail: str):
        self.path = str(path)
        self.line = line
        self.detail = detail
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {detail}")


class ValidationFailed(MaleaError):
    def __init__(self, findings: List):
        self.findings = list(findings)
        super().__init__(f"{len(self.findings)} mapping validation finding(s)")
