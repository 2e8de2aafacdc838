"""Uniform completion interface over interchangeable backends.

Three backends share one duck-typed surface, ``complete(bundle) ->
CompletionResult``:

* ``LiveProvider`` posts to an HTTP endpoint with retry, exponential
  backoff and a process-wide rate-limiter gate. Clock, sleep and transport
  are injected so the behaviour is unit-testable without real delays.
* ``ReplayProvider`` serves pre-recorded responses keyed by the SHA-256
  fingerprint of the prompt text, for bit-deterministic offline runs.
* ``RecordingProvider`` wraps a live provider and writes every response
  into the replay fixture layout.

Responses are returned untouched; all cleaning happens downstream.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Protocol

from .errors import (
    BudgetRejected,
    ExhaustedRetries,
    FixtureMissing,
    MalformedProviderResponse,
    MissingCredential,
    NonRetryableHttpError,
)
from .prompting import OUTPUT_TOKENS_PER_ROW, RESERVED_OVERHEAD_TOKENS, PromptBundle

DEFAULT_API_KEY_ENV = "TABLESMITH_API_KEY"
DEFAULT_REQUEST_TIMEOUT_MS = 120_000

# Transport callable: (url, headers, json_body, timeout_seconds) ->
# (http_status, body_text). Timeouts are signalled by raising TimeoutError.
Transport = Callable[[str, Mapping[str, str], Mapping[str, Any], float],
                     tuple[int, str]]


@dataclass(frozen=True)
class ProviderProfile:
    name: str
    input_token_budget: int
    output_token_budget: int
    max_retries: int = 3
    base_backoff_ms: int = 2000
    min_request_interval_ms: int = 0

    def __post_init__(self) -> None:
        if self.input_token_budget <= 0 or self.output_token_budget <= 0:
            raise ValueError("token budgets must be positive")
        if self.max_retries < 0 or self.base_backoff_ms <= 0:
            raise ValueError("retry settings out of range")
        if self.min_request_interval_ms < 0:
            raise ValueError("min_request_interval_ms must be >= 0")


# Context windows the project was run against: GPT-4 era 128k/4k, then
# Claude 3 Opus at 200k in / 4k out.
GPT4_PROFILE = ProviderProfile("gpt-4", 128_000, 4_096)
CLAUDE3_OPUS_PROFILE = ProviderProfile("claude-3-opus", 200_000, 4_096)


@dataclass(frozen=True)
class CompletionResult:
    text: str
    provider_name: str
    attempt_count: int
    from_replay: bool


class CompletionBackend(Protocol):
    def complete(self, bundle: PromptBundle) -> CompletionResult: ...


def prompt_fingerprint(prompt_text: str) -> str:
    """Lowercase hex SHA-256 of the UTF-8 bytes of the prompt text."""
    return hashlib.sha256(prompt_text.encode("utf-8")).hexdigest()


def fixture_path(fixture_dir: Path | str, fingerprint: str) -> Path:
    return Path(fixture_dir) / f"{fingerprint}.resp.txt"


class RateLimiter:
    """Serializes callers so consecutive requests are >= the interval apart."""

    def __init__(self, min_interval_ms: int,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep):
        self._interval = min_interval_ms / 1000.0
        self._clock = clock
        self._sleep = sleep
        self._lock = threading.Lock()
        self._last: float | None = None

    def wait_turn(self) -> None:
        with self._lock:
            if self._interval > 0 and self._last is not None:
                wait = self._last + self._interval - self._clock()
                if wait > 0:
                    self._sleep(wait)
            self._last = self._clock()


def _requests_transport(url: str, headers: Mapping[str, str],
                        body: Mapping[str, Any], timeout_s: float
                        ) -> tuple[int, str]:
    import requests

    try:
        resp = requests.post(url, headers=dict(headers), json=dict(body),
                             timeout=timeout_s)
    except requests.Timeout as exc:
        raise TimeoutError(str(exc)) from exc
    return resp.status_code, resp.text


def _is_retryable(status: int | None) -> bool:
    return status is None or status == 429 or status >= 500


class LiveProvider:
    """HTTP completion backend.

    Request body is ``{"model": ..., "prompt": ..., "max_tokens": ...}``
    plus any opaque sampling parameters; the endpoint must answer HTTP 200
    with a JSON object carrying the completion under ``"text"``. Vendor
    specifics stay confined to the endpoint behind ``endpoint_url``.
    """

    def __init__(self, profile: ProviderProfile, endpoint_url: str,
                 model_name: str = "default",
                 api_key_env: str = DEFAULT_API_KEY_ENV,
                 sampling_params: Mapping[str, Any] | None = None,
                 request_timeout_ms: int = DEFAULT_REQUEST_TIMEOUT_MS,
                 transport: Transport | None = None,
                 clock: Callable[[], float] = time.monotonic,
                 sleep: Callable[[float], None] = time.sleep,
                 env: Mapping[str, str] = os.environ):
        self.profile = profile
        self._endpoint_url = endpoint_url
        self._model_name = model_name
        self._api_key_env = api_key_env
        self._sampling_params = dict(sampling_params or {})
        self._timeout_s = request_timeout_ms / 1000.0
        self._transport = transport or _requests_transport
        self._sleep = sleep
        self._env = env
        self._limiter = RateLimiter(profile.min_request_interval_ms, clock, sleep)

    def _check_budget(self, bundle: PromptBundle) -> None:
        input_limit = self.profile.input_token_budget - RESERVED_OVERHEAD_TOKENS
        if bundle.estimated_input_tokens > input_limit:
            raise BudgetRejected(
                f"{bundle.file_stem} {bundle.page_label}: estimated "
                f"{bundle.estimated_input_tokens} input tokens exceeds "
                f"{input_limit}")
        estimated_output = bundle.page_line_count * OUTPUT_TOKENS_PER_ROW
        if estimated_output > self.profile.output_token_budget:
            raise BudgetRejected(
                f"{bundle.file_stem} {bundle.page_label}: estimated "
                f"{estimated_output} output tokens exceeds "
                f"{self.profile.output_token_budget}")

    def complete(self, bundle: PromptBundle) -> CompletionResult:
        self._check_budget(bundle)
        key = self._env.get(self._api_key_env, "")
        if not key:
            raise MissingCredential(
                f"environment variable {self._api_key_env} is not set")
        headers = {
            "Authorization": f"Bearer {key}",
            "Content-Type": "application/json",
        }
        body: dict[str, Any] = {
            "model": self._model_name,
            "prompt": bundle.prompt_text,
            "max_tokens": self.profile.output_token_budget,
        }
        body.update(self._sampling_params)

        attempt = 0
        last_status: int | None = None
        while True:
            attempt += 1
            self._limiter.wait_turn()
            status: int | None
            try:
                status, text = self._transport(
                    self._endpoint_url, headers, body, self._timeout_s)
            except TimeoutError:
                status, text = None, ""
            if status == 200:
                return CompletionResult(
                    text=_completion_text(text),
                    provider_name=self.profile.name,
                    attempt_count=attempt,
                    from_replay=False,
                )
            if status is not None and not _is_retryable(status):
                raise NonRetryableHttpError(
                    f"HTTP {status} from {self._endpoint_url}", status=status)
            last_status = status
            if attempt > self.profile.max_retries:
                raise ExhaustedRetries(
                    f"gave up after {attempt} attempts, last status "
                    f"{last_status}", last_status=last_status)
            backoff_ms = self.profile.base_backoff_ms * (2 ** (attempt - 1))
            self._sleep(backoff_ms / 1000.0)


def _completion_text(body_text: str) -> str:
    try:
        doc = json.loads(body_text)
    except ValueError as exc:
        raise MalformedProviderResponse(
            f"response body is not JSON: {body_text[:80]!r}") from exc
    if not isinstance(doc, dict) or not isinstance(doc.get("text"), str):
        raise MalformedProviderResponse(
            'response JSON must carry the completion under "text"')
    return doc["text"]


class ReplayProvider:
    """Serves ``<fixture_dir>/<fingerprint>.resp.txt``; read-only, concurrent."""

    def __init__(self, fixture_dir: Path | str, name: str = "replay"):
        self._fixture_dir = Path(fixture_dir)
        self._name = name

    def complete(self, bundle: PromptBundle) -> CompletionResult:
        fingerprint = prompt_fingerprint(bundle.prompt_text)
        path = fixture_path(self._fixture_dir, fingerprint)
        try:
            text = path.read_bytes().decode("utf-8")
        except FileNotFoundError:
            raise FixtureMissing(fingerprint, bundle.file_stem,
                                 bundle.page_index, bundle.part_index) from None
        return CompletionResult(
            text=text,
            provider_name=self._name,
            attempt_count=1,
            from_replay=True,
        )


class RecordingProvider:
    """Live completion that also writes the replay fixture for the prompt."""

    def __init__(self, live: LiveProvider, fixture_dir: Path | str):
        self._live = live
        self._fixture_dir = Path(fixture_dir)

    def complete(self, bundle: PromptBundle) -> CompletionResult:
        result = self._live.complete(bundle)
        self._fixture_dir.mkdir(parents=True, exist_ok=True)
        path = fixture_path(self._fixture_dir,
                            prompt_fingerprint(bundle.prompt_text))
        path.write_bytes(result.text.encode("utf-8"))
        return result
