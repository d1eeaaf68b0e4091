import logging

from malea.errors import ConfigError
from malea.providers.base import ChatRequest, ChatResponse, FinishReason, Provider, request_hash
from malea.providers.cassette import RecordingProvider, ReplayProvider, read_cassette, record_cassette
from malea.providers.http_provider import HttpProvider, RateLimiter, RetryPolicy
from malea.providers.scripted import ScriptedProvider, load_script

logger = logging.getLogger(__name__)


def build_provider(config, replay=None, record=None, script=None):
    """
    Provider for a run: a replay cassette or a scripted session when given,
    otherwise the live HTTP provider. `record` wraps the result in a recorder.
    """
    if replay is not None:
        provider = ReplayProvider.from_file(replay)
        logger.info("Replaying provider traffic from %s", replay)
    elif script is not None:
        provider = load_script(script)
        logger.info("Using scripted responses from %s", script)
    else:
        api_key = config.api_key()
        if not api_key:
            raise ConfigError(config.api_key_env, "environment variable with the provider API key is not set")
        provider = HttpProvider(
            endpoint=config.provider_endpoint,
            dialect=config.provider_dialect,
            api_key=api_key,
            timeout_s=config.timeout_s,
            rate_limiter=RateLimiter(config.min_request_interval_s),
        )
    if record is not None:
        provider = RecordingProvider(provider)
    return provider


__all__ = [
    "ChatRequest", "ChatResponse", "FinishReason", "Provider", "request_hash",
    "HttpProvider", "RetryPolicy", "RateLimiter",
    "ScriptedProvider", "load_script",
    "RecordingProvider", "ReplayProvider", "read_cassette", "record_cassette",
    "build_provider",
]
