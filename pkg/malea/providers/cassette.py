"""
Record/replay of provider traffic.

A cassette is line-delimited JSON: a header record, then one record per call
{request_hash, request_canonical, response} in request order. Replay looks
responses up by canonical request hash and needs no network.
"""
import json
import logging
import threading
from collections import defaultdict, deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Union

from malea.errors import FormatError, ProviderError, ProviderErrorKind
from malea.providers.base import ChatRequest, ChatResponse

logger = logging.getLogger(__name__)

CASSETTE_HEADER = {"schema": "malea.cassette", "version": 1}


@dataclass(frozen=True)
class CassetteEntry:
    request_hash: str
    request_canonical: str
    response: ChatResponse

    def to_record(self) -> dict:
        return {
            "request_hash": self.request_hash,
            "request_canonical": self.request_canonical,
            "response": self.response.to_record(),
        }


class RecordingProvider:
    """Wraps any provider and keeps every successful exchange."""

    def __init__(self, inner):
        self.inner = inner
        self.entries: List[CassetteEntry] = []
        self._lock = threading.Lock()

    def complete(self, request: ChatRequest) -> ChatResponse:
        response = self.inner.complete(request)
        with self._lock:
            self.entries.append(CassetteEntry(request.hash(), request.canonical(), response))
        return response

    def save(self, path) -> Path:
        return record_cassette(self.entries, path)


def record_cassette(session: Union[RecordingProvider, Iterable[CassetteEntry]], path) -> Path:
    entries = session.entries if isinstance(session, RecordingProvider) else list(session)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        f.write(json.dumps(CASSETTE_HEADER) + "\n")
        for entry in entries:
            f.write(json.dumps(entry.to_record(), ensure_ascii=False, sort_keys=True) + "\n")
    logger.info("Recorded %d exchange(s) to %s", len(entries), path)
    return path


def read_cassette(path) -> List[CassetteEntry]:
    path = Path(path)
    entries = []
    with path.open(encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as e:
                raise FormatError(path, line_no, f"invalid JSON: {e}")
            if line_no == 1:
                if record.get("schema") != CASSETTE_HEADER["schema"]:
                    raise FormatError(path, 1, "missing cassette header")
                if record.get("version") != CASSETTE_HEADER["version"]:
                    raise FormatError(path, 1, f"unsupported cassette version {record.get('version')}")
                continue
            try:
                entries.append(CassetteEntry(
                    request_hash=record["request_hash"],
                    request_canonical=record["request_canonical"],
                    response=ChatResponse.from_record(record["response"]),
                ))
            except (KeyError, TypeError, ValueError) as e:
                raise FormatError(path, line_no, f"malformed cassette record: {e}")
    if not path.stat().st_size:
        raise FormatError(path, None, "empty file, no cassette header")
    return entries


class ReplayProvider:
    """
    Serves recorded responses by request hash. Identical requests recorded
    more than once are answered in recorded order; the last answer repeats.
    """

    def __init__(self, entries: Iterable[CassetteEntry]):
        self._responses = defaultdict(deque)
        for entry in entries:
            self._responses[entry.request_hash].append(entry.response)
        self._lock = threading.Lock()
        self.calls: List[ChatRequest] = []

    @classmethod
    def from_file(cls, path) -> "ReplayProvider":
        return cls(read_cassette(path))

    def complete(self, request: ChatRequest) -> ChatResponse:
        key = request.hash()
        with self._lock:
            self.calls.append(request)
            queue = self._responses.get(key)
            if not queue:
                raise ProviderError(ProviderErrorKind.REPLAY_MISS,
                                    f"no recorded response for request {key[:12]} ({request.speaker})")
            return queue.popleft() if len(queue) > 1 else queue[0]
