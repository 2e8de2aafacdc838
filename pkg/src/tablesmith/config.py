"""Run configuration: flat ``key = value`` files, strict key checking.

Unknown keys are errors so a typo can never silently no-op. Relative paths
resolve against the config file's directory, which keeps generated corpus
trees relocatable. The digest of the canonicalized, key-sorted effective
configuration is stamped into every run report.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from .errors import ConfigError, MissingKey, UnknownKey, UnreadableFile
from .provider import DEFAULT_API_KEY_ENV, DEFAULT_REQUEST_TIMEOUT_MS
from .refinery import DEFAULT_ASSOC_SUFFIXES, DEFAULT_NOISE_STOPWORDS

MODES = ("live", "replay", "record")

_PATH_KEYS = ("input_dir", "output_dir", "prompt_template", "fixture_dir")
_INT_KEYS = ("request_timeout_ms", "max_retries", "base_backoff_ms",
             "min_request_interval_ms", "input_token_budget",
             "output_token_budget", "max_parallel_files")
_LIST_KEYS = ("noise_stopwords", "assoc_suffixes")
_STR_KEYS = ("mode", "endpoint_url", "model_name", "api_key_env")

KNOWN_KEYS = frozenset(_PATH_KEYS + _INT_KEYS + _LIST_KEYS + _STR_KEYS
                       + ("manual_error_ratio", "sampling_params"))


@dataclass(frozen=True)
class RunConfig:
    input_dir: Path
    output_dir: Path
    mode: str
    prompt_template: Path | None = None
    endpoint_url: str | None = None
    model_name: str = "default"
    api_key_env: str = DEFAULT_API_KEY_ENV
    fixture_dir: Path | None = None
    request_timeout_ms: int = DEFAULT_REQUEST_TIMEOUT_MS
    max_retries: int = 3
    base_backoff_ms: int = 2000
    min_request_interval_ms: int = 0
    input_token_budget: int = 200_000
    output_token_budget: int = 4_096
    manual_error_ratio: float = 0.10
    max_parallel_files: int = 4
    noise_stopwords: tuple[str, ...] = DEFAULT_NOISE_STOPWORDS
    assoc_suffixes: tuple[str, ...] = DEFAULT_ASSOC_SUFFIXES
    sampling_params: dict[str, Any] = field(default_factory=dict)
    config_digest: str = ""


def parse_flat_config(text: str, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; full-line ``#`` comments; duplicates error."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _canonical_text(effective: dict[str, str]) -> str:
    return "\n".join(f"{k} = {effective[k]}" for k in sorted(effective)) + "\n"


def config_digest_of(effective: dict[str, str]) -> str:
    return hashlib.sha256(_canonical_text(effective).encode("utf-8")).hexdigest()


def load_config(path: Path | str,
                overrides: dict[str, str] | None = None) -> RunConfig:
    """Load, apply CLI overrides, validate per mode, and stamp the digest."""
    p = Path(path)
    try:
        text = p.read_bytes().decode("utf-8")
    except OSError as exc:
        raise UnreadableFile(f"cannot read config {p}: {exc}") from exc
    values = parse_flat_config(text, source=str(p))
    for key, value in (overrides or {}).items():
        values[key] = value

    unknown = sorted(set(values) - KNOWN_KEYS)
    if unknown:
        raise UnknownKey(f"{p}: unknown config keys {unknown}")
    for key in ("input_dir", "output_dir", "mode"):
        if key not in values:
            raise MissingKey(f"{p}: required key {key!r} is missing")

    mode = values["mode"]
    if mode not in MODES:
        raise ConfigError(f"{p}: mode must be one of {MODES}, got {mode!r}")
    if mode in ("replay", "record") and "fixture_dir" not in values:
        raise MissingKey(f"{p}: mode {mode!r} requires fixture_dir")
    if mode in ("live", "record") and "endpoint_url" not in values:
        raise MissingKey(f"{p}: mode {mode!r} requires endpoint_url")

    base = p.parent

    def as_path(key: str) -> Path | None:
        if key not in values:
            return None
        raw = Path(values[key])
        return raw if raw.is_absolute() else (base / raw)

    def as_int(key: str, default: int) -> int:
        if key not in values:
            return default
        try:
            return int(values[key])
        except ValueError as exc:
            raise ConfigError(f"{p}: {key} must be an integer") from exc

    def as_list(key: str, default: tuple[str, ...]) -> tuple[str, ...]:
        if key not in values:
            return default
        items = tuple(s.strip() for s in values[key].split(",") if s.strip())
        return items or default

    sampling: dict[str, Any] = {}
    if values.get("sampling_params"):
        try:
            sampling = json.loads(values["sampling_params"])
        except ValueError as exc:
            raise ConfigError(f"{p}: sampling_params must be JSON") from exc
        if not isinstance(sampling, dict):
            raise ConfigError(f"{p}: sampling_params must be a JSON object")

    try:
        ratio = float(values.get("manual_error_ratio", "0.10"))
    except ValueError as exc:
        raise ConfigError(f"{p}: manual_error_ratio must be a number") from exc

    cfg = RunConfig(
        input_dir=as_path("input_dir"),
        output_dir=as_path("output_dir"),
        mode=mode,
        prompt_template=as_path("prompt_template"),
        endpoint_url=values.get("endpoint_url"),
        model_name=values.get("model_name", "default"),
        api_key_env=values.get("api_key_env", DEFAULT_API_KEY_ENV),
        fixture_dir=as_path("fixture_dir"),
        request_timeout_ms=as_int("request_timeout_ms", DEFAULT_REQUEST_TIMEOUT_MS),
        max_retries=as_int("max_retries", 3),
        base_backoff_ms=as_int("base_backoff_ms", 2000),
        min_request_interval_ms=as_int("min_request_interval_ms", 0),
        input_token_budget=as_int("input_token_budget", 200_000),
        output_token_budget=as_int("output_token_budget", 4_096),
        manual_error_ratio=ratio,
        max_parallel_files=max(1, as_int("max_parallel_files", 4)),
        noise_stopwords=as_list("noise_stopwords", DEFAULT_NOISE_STOPWORDS),
        assoc_suffixes=as_list("assoc_suffixes", DEFAULT_ASSOC_SUFFIXES),
        sampling_params=sampling,
    )
    return replace(cfg, config_digest=config_digest_of(_effective_map(cfg)))


def _effective_map(cfg: RunConfig) -> dict[str, str]:
    return {
        "input_dir": cfg.input_dir.as_posix(),
        "output_dir": cfg.output_dir.as_posix(),
        "mode": cfg.mode,
        "prompt_template": cfg.prompt_template.as_posix() if cfg.prompt_template else "",
        "endpoint_url": cfg.endpoint_url or "",
        "model_name": cfg.model_name,
        "api_key_env": cfg.api_key_env,
        "fixture_dir": cfg.fixture_dir.as_posix() if cfg.fixture_dir else "",
        "request_timeout_ms": str(cfg.request_timeout_ms),
        "max_retries": str(cfg.max_retries),
        "base_backoff_ms": str(cfg.base_backoff_ms),
        "min_request_interval_ms": str(cfg.min_request_interval_ms),
        "input_token_budget": str(cfg.input_token_budget),
        "output_token_budget": str(cfg.output_token_budget),
        "manual_error_ratio": repr(cfg.manual_error_ratio),
        "max_parallel_files": str(cfg.max_parallel_files),
        "noise_stopwords": ",".join(cfg.noise_stopwords),
        "assoc_suffixes": ",".join(cfg.assoc_suffixes),
        "sampling_params": json.dumps(cfg.sampling_params, sort_keys=True),
    }
