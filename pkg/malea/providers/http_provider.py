"""
Live chat-completion access over HTTP with a thin adapter per vendor dialect.

Retryable failures (rate limits, timeouts, transport errors) are retried with
exponential backoff before surfacing as a ProviderError.
"""
import json
import logging
import threading
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import certifi
import urllib3

from malea.errors import ProviderError, ProviderErrorKind
from malea.providers.base import ChatRequest, ChatResponse, FinishReason

logger = logging.getLogger(__name__)


@dataclass
class RetryPolicy:
    base: float = 1.0
    factor: float = 2.0
    max_attempts: int = 5
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    def delay(self, attempt: int) -> float:
        """Delay after the given failed attempt (1-based)."""
        return self.base * self.factor ** (attempt - 1)

    def schedule(self) -> List[float]:
        return [self.delay(a) for a in range(1, self.max_attempts)]


class RateLimiter:
    """Spaces calls at least `min_interval_s` apart; safe under concurrent use."""

    def __init__(self, min_interval_s: float = 0.0, clock=time.monotonic, sleep=time.sleep):
        self.min_interval_s = min_interval_s
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._next_allowed = 0.0

    def wait(self):
        if self.min_interval_s <= 0:
            return
        with self._lock:
            now = self._clock()
            if now < self._next_allowed:
                self._sleep(self._next_allowed - now)
                now = self._next_allowed
            self._next_allowed = now + self.min_interval_s


def _history_turns(request: ChatRequest) -> List[Tuple[bool, str]]:
    """(is_own_turn, text) per history entry; other speakers are labelled inline."""
    turns = []
    for label, content in request.history:
        if request.speaker is not None and label == request.speaker:
            turns.append((True, content))
        else:
            turns.append((False, f"{label}: {content}"))
    return turns


class OpenAIDialect:
    name = "openai"

    def build(self, endpoint: str, request: ChatRequest, api_key: Optional[str]):
        url = f"{endpoint.rstrip('/')}/chat/completions"
        messages = []
        if request.system_prompt:
            messages.append({"role": "system", "content": request.system_prompt})
        for own, text in _history_turns(request):
            messages.append({"role": "assistant" if own else "user", "content": text})
        body = {"model": request.model_name, "messages": messages}
        if request.temperature is not None:
            body["temperature"] = request.temperature
        if request.seed is not None:
            body["seed"] = request.seed
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        return url, headers, body

    def parse(self, payload: dict) -> ChatResponse:
        try:
            choice = payload["choices"][0]
            content = choice["message"].get("content") or ""
            raw_reason = choice.get("finish_reason") or "other"
        except (KeyError, IndexError, TypeError, AttributeError):
            raise ProviderError(ProviderErrorKind.MALFORMED, "response has no choices[0].message")
        reason = {
            "stop": FinishReason.STOP,
            "length": FinishReason.LENGTH,
            "content_filter": FinishReason.CONTENT_FILTER,
        }.get(raw_reason, FinishReason.OTHER)
        usage = payload.get("usage") or {}
        return _response(content, reason, usage.get("prompt_tokens", 0), usage.get("completion_tokens", 0))


class GeminiDialect:
    name = "gemini"

    def build(self, endpoint: str, request: ChatRequest, api_key: Optional[str]):
        url = f"{endpoint.rstrip('/')}/models/{request.model_name}:generateContent"
        contents: List[Dict] = []
        for own, text in _history_turns(request):
            role = "model" if own else "user"
            if contents and contents[-1]["role"] == role:
                contents[-1]["parts"].append({"text": text})
            else:
                contents.append({"role": role, "parts": [{"text": text}]})
        body = {"contents": contents}
        if request.system_prompt:
            body["systemInstruction"] = {"parts": [{"text": request.system_prompt}]}
        generation_config = {}
        if request.temperature is not None:
            generation_config["temperature"] = request.temperature
        if request.seed is not None:
            generation_config["seed"] = request.seed
        if generation_config:
            body["generationConfig"] = generation_config
        headers = {"Content-Type": "application/json"}
        if api_key:
            headers["x-goog-api-key"] = api_key
        return url, headers, body

    def parse(self, payload: dict) -> ChatResponse:
        block = (payload.get("promptFeedback") or {}).get("blockReason")
        if block:
            raise ProviderError(ProviderErrorKind.CONTENT_FILTER, f"prompt blocked: {block}")
        try:
            candidate = payload["candidates"][0]
        except (KeyError, IndexError, TypeError):
            raise ProviderError(ProviderErrorKind.MALFORMED, "response has no candidates")
        parts = (candidate.get("content") or {}).get("parts") or []
        content = "".join(p.get("text", "") for p in parts)
        raw_reason = candidate.get("finishReason", "OTHER")
        if raw_reason == "STOP":
            reason = FinishReason.STOP
        elif raw_reason == "MAX_TOKENS":
            reason = FinishReason.LENGTH
        elif raw_reason in ("SAFETY", "BLOCKLIST", "PROHIBITED_CONTENT", "RECITATION", "SPII"):
            reason = FinishReason.CONTENT_FILTER
        else:
            reason = FinishReason.OTHER
        usage = payload.get("usageMetadata") or {}
        return _response(content, reason, usage.get("promptTokenCount", 0), usage.get("candidatesTokenCount", 0))


def _response(content: str, reason: FinishReason, tokens_in, tokens_out) -> ChatResponse:
    if reason is FinishReason.CONTENT_FILTER and not content.strip():
        raise ProviderError(ProviderErrorKind.CONTENT_FILTER, "response withheld by the content filter")
    if not content.strip():
        raise ProviderError(ProviderErrorKind.MALFORMED, f"empty response (finish reason {reason.value})")
    return ChatResponse(content=content, tokens_in=int(tokens_in or 0), tokens_out=int(tokens_out or 0),
                        finish_reason=reason)


DIALECTS = {"openai": OpenAIDialect, "gemini": GeminiDialect}


def classify_status(status: int, body: str) -> Optional[ProviderError]:
    if 200 <= status < 300:
        return None
    snippet = body[:200]
    if status in (401, 403):
        return ProviderError(ProviderErrorKind.AUTH, f"HTTP {status}: {snippet}")
    if status == 429:
        return ProviderError(ProviderErrorKind.RATE_LIMIT, f"HTTP 429: {snippet}")
    if status in (408, 504):
        return ProviderError(ProviderErrorKind.TIMEOUT, f"HTTP {status}: {snippet}")
    if status >= 500:
        return ProviderError(ProviderErrorKind.TRANSPORT, f"HTTP {status}: {snippet}")
    return ProviderError(ProviderErrorKind.MALFORMED, f"HTTP {status}: {snippet}")


class HttpProvider:
    def __init__(self, endpoint: str, dialect="openai", api_key: Optional[str] = None,
                 timeout_s: float = 120.0, retry: Optional[RetryPolicy] = None,
                 rate_limiter: Optional[RateLimiter] = None, pool=None):
        self.endpoint = endpoint
        self.dialect = DIALECTS[dialect]() if isinstance(dialect, str) else dialect
        self.api_key = api_key
        self.timeout_s = timeout_s
        self.retry = retry or RetryPolicy()
        self.rate_limiter = rate_limiter or RateLimiter()
        self.pool = pool or urllib3.PoolManager(cert_reqs="CERT_REQUIRED", ca_certs=certifi.where())

    def complete(self, request: ChatRequest) -> ChatResponse:
        attempt = 1
        while True:
            started = time.monotonic()
            try:
                response = self._send(request)
            except ProviderError as e:
                if not e.retryable or attempt >= self.retry.max_attempts:
                    logger.error("Provider call for %s failed after %d attempt(s): %s", request.speaker, attempt, e)
                    raise
                delay = self.retry.delay(attempt)
                logger.warning("Attempt %d for %s failed (%s); retrying in %.1fs", attempt, request.speaker, e, delay)
                self.retry.sleep(delay)
                attempt += 1
                continue
            logger.info("Provider call for %s: attempt %d, %.2fs, tokens %d/%d", request.speaker, attempt,
                        time.monotonic() - started, response.tokens_in, response.tokens_out)
            return response

    def _send(self, request: ChatRequest) -> ChatResponse:
        url, headers, body = self.dialect.build(self.endpoint, request, self.api_key)
        self.rate_limiter.wait()
        try:
            raw = self.pool.request(
                "POST", url,
                body=json.dumps(body).encode("utf-8"),
                headers=headers,
                timeout=urllib3.Timeout(total=self.timeout_s),
                retries=False,
            )
        except urllib3.exceptions.NewConnectionError as e:
            raise ProviderError(ProviderErrorKind.TRANSPORT, f"cannot connect: {e}")
        except urllib3.exceptions.TimeoutError as e:
            raise ProviderError(ProviderErrorKind.TIMEOUT, f"no response within {self.timeout_s}s: {e}")
        except urllib3.exceptions.HTTPError as e:
            raise ProviderError(ProviderErrorKind.TRANSPORT, str(e))

        text = raw.data.decode("utf-8", errors="replace") if raw.data else ""
        error = classify_status(raw.status, text)
        if error is not None:
            raise error
        try:
            payload = json.loads(text)
        except ValueError:
            raise ProviderError(ProviderErrorKind.MALFORMED, f"response is not JSON: {text[:120]!r}")
        return self.dialect.parse(payload)
