"""
Run configuration. The YAML file keys mirror RunConfig fields one to one;
credentials never live here, only the name of the environment variable.
"""
import logging
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Optional, Tuple

import yaml

from malea.errors import ConfigError
from malea.taxonomy import EthicsTheme, default_taxonomy, load_taxonomy, select_themes

logger = logging.getLogger(__name__)

DIALECTS = ("gemini", "openai")
FORBIDDEN_KEYS = ("api_key", "apikey", "key", "token", "secret")


@dataclass(frozen=True)
class RunConfig:
    provider_endpoint: str
    model_name: str
    provider_dialect: str = "openai"
    temperature: float = 0.2
    seed: Optional[int] = None
    max_critique_cycles: int = 2
    themes: Tuple[EthicsTheme, ...] = field(default_factory=default_taxonomy)
    min_stories: int = 5
    timeout_s: float = 120.0
    min_request_interval_s: float = 0.0
    api_key_env: str = "MALEA_API_KEY"
    lint_gate: bool = True
    taxonomy_path: Optional[str] = None

    def __post_init__(self):
        if not self.provider_endpoint:
            raise ConfigError("provider_endpoint", "is required")
        if not self.model_name:
            raise ConfigError("model_name", "is required")
        if self.provider_dialect not in DIALECTS:
            raise ConfigError("provider_dialect", f"must be one of {', '.join(DIALECTS)}")
        if isinstance(self.temperature, bool) or not isinstance(self.temperature, (int, float)):
            raise ConfigError("temperature", "must be a number")
        if not 0.0 <= self.temperature <= 2.0:
            raise ConfigError("temperature", f"{self.temperature} is outside [0, 2]")
        if self.seed is not None and (isinstance(self.seed, bool) or not isinstance(self.seed, int)):
            raise ConfigError("seed", "must be an integer")
        if isinstance(self.max_critique_cycles, bool) or not isinstance(self.max_critique_cycles, int) \
                or self.max_critique_cycles < 1:
            raise ConfigError("max_critique_cycles", "must be a positive integer")
        if isinstance(self.min_stories, bool) or not isinstance(self.min_stories, int) or self.min_stories < 1:
            raise ConfigError("min_stories", "must be a positive integer")
        if not self.timeout_s or self.timeout_s <= 0:
            raise ConfigError("timeout_s", "must be positive")
        if isinstance(self.min_request_interval_s, bool) or not isinstance(self.min_request_interval_s, (int, float)) \
                or self.min_request_interval_s < 0:
            raise ConfigError("min_request_interval_s", "must be a non-negative number of seconds")
        if not self.themes:
            raise ConfigError("themes", "at least one theme is required")
        object.__setattr__(self, "temperature", float(self.temperature))
        object.__setattr__(self, "timeout_s", float(self.timeout_s))
        object.__setattr__(self, "min_request_interval_s", float(self.min_request_interval_s))
        object.__setattr__(self, "themes", tuple(self.themes))

    @property
    def max_provider_calls(self) -> int:
        return 2 + 4 * self.max_critique_cycles

    def api_key(self) -> Optional[str]:
        return os.environ.get(self.api_key_env)

    def with_overrides(self, **overrides) -> "RunConfig":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean) if clean else self

    def to_dict(self) -> dict:
        return {
            "provider_endpoint": self.provider_endpoint,
            "provider_dialect": self.provider_dialect,
            "model_name": self.model_name,
            "temperature": self.temperature,
            "seed": self.seed,
            "max_critique_cycles": self.max_critique_cycles,
            "themes": [t.name for t in self.themes],
            "min_stories": self.min_stories,
            "timeout_s": self.timeout_s,
            "min_request_interval_s": self.min_request_interval_s,
            "api_key_env": self.api_key_env,
            "lint_gate": self.lint_gate,
            "taxonomy_path": self.taxonomy_path,
        }


KNOWN_KEYS = tuple(f.name for f in fields(RunConfig))


def config_from_dict(data) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("<root>", "config must be a mapping")
    for key in data:
        if str(key).lower() in FORBIDDEN_KEYS:
            raise ConfigError(key, "credentials are read from the environment; set the variable named by api_key_env")
        if key not in KNOWN_KEYS:
            raise ConfigError(key, "unknown configuration key")
    for required in ("provider_endpoint", "model_name"):
        if not data.get(required):
            raise ConfigError(required, "is required and has no default")

    values = dict(data)
    taxonomy = load_taxonomy(values["taxonomy_path"]) if values.get("taxonomy_path") else default_taxonomy()
    if "themes" in values:
        values["themes"] = select_themes(values["themes"] or [], taxonomy)
    else:
        values["themes"] = tuple(taxonomy)
    return RunConfig(**values)


def parse_config(text: str) -> RunConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError("<file>", f"invalid YAML: {e}")
    return config_from_dict(data)


def emit_config(config: RunConfig) -> str:
    return yaml.safe_dump(config.to_dict(), sort_keys=False, allow_unicode=True)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("<file>", f"cannot read {path}: {e}")
    config = parse_config(text)
    logger.info("Loaded config from %s (model %s, max cycles %d)", path, config.model_name, config.max_critique_cycles)
    return config
