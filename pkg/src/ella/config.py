"""Retrieval parameters and the TOML-like key/value config file."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import ConfigError

ENV_CONFIG_VAR = "ELLA_CONFIG"

ARTICLE_BACKENDS = ("bm25", "vector", "hybrid")


@dataclass(frozen=True)
class RetrievalConfig:
    """Depths and thresholds of the retrieval/grounding/highlight pipeline.

    Defaults: 10 articles shown, top 3 used as default context, 50 cases
    retrieved and 15 returned after re-ranking, grounding threshold 0.85,
    highlight threshold 0.65.
    """

    k1_articles: int = 10
    default_context_size: int = 3
    k2_cases: int = 50
    k3_cases: int = 15
    thr1_grounding: float = 0.85
    thr2_highlight: float = 0.65
    article_backend: str = "hybrid"

    def __post_init__(self):
        if self.k1_articles < 1 or self.k2_cases < 1 or self.k3_cases < 1:
            raise ConfigError("retrieval depths must be positive")
        if self.default_context_size < 1:
            raise ConfigError("default_context_size must be positive")
        if self.default_context_size > self.k1_articles:
            raise ConfigError("default_context_size must not exceed k1_articles")
        if self.k3_cases > self.k2_cases:
            raise ConfigError("k3_cases must not exceed k2_cases")
        for name in ("thr1_grounding", "thr2_highlight"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1]")
        if self.article_backend not in ARTICLE_BACKENDS:
            raise ConfigError(f"article_backend must be one of {ARTICLE_BACKENDS}")


@dataclass(frozen=True)
class AppConfig:
    """Everything the service and CLI need: corpus paths, providers, knobs."""

    articles_path: Path
    interpretations_path: Path
    cases_path: Path
    data_dir: Path = Path("var/conversations")
    listen_host: str = "127.0.0.1"
    listen_port: int = 8000
    llm_endpoint: str = "mock"
    llm_timeout: float = 60.0
    max_context_articles: int = 16
    grounder_endpoint: str = "mock"
    case_retriever_endpoint: str = "mock"
    embedding_dimension: int = 256
    bm25_k1: float = 1.5
    bm25_b: float = 0.75
    static_dir: Path | None = None
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)


def _parse_scalar(raw: str):
    """Coerce a bare config value: quoted string, bool, int, float, or string."""
    raw = raw.strip()
    if len(raw) >= 2 and raw[0] == raw[-1] and raw[0] in ("'", '"'):
        return raw[1:-1]
    # strip a trailing comment from unquoted values
    if "#" in raw:
        raw = raw.split("#", 1)[0].strip()
    if raw.lower() in ("true", "false"):
        return raw.lower() == "true"
    for cast in (int, float):
        try:
            return cast(raw)
        except ValueError:
            continue
    return raw


def parse_config_text(text: str) -> dict:
    """Parse flat `key = value` lines; `#` starts a comment."""
    values: dict = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {line_no}: expected key = value")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"config line {line_no}: empty key")
        values[key] = _parse_scalar(raw)
    return values


def load_config(path: str | Path) -> AppConfig:
    """Read a config file and build a validated AppConfig."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values = parse_config_text(text)

    retrieval_keys = {f.name for f in fields(RetrievalConfig)}
    retrieval_kwargs = {k: values.pop(k) for k in list(values) if k in retrieval_keys}

    kwargs: dict = {}
    for name in ("articles_path", "interpretations_path", "cases_path", "data_dir", "static_dir"):
        if name in values:
            kwargs[name] = Path(str(values.pop(name)))
    if "listen" in values:
        listen = str(values.pop("listen"))
        host, _, port = listen.rpartition(":")
        if not host or not port.isdigit():
            raise ConfigError(f"listen must look like host:port, got {listen!r}")
        kwargs["listen_host"] = host
        kwargs["listen_port"] = int(port)

    known = {f.name for f in fields(AppConfig)}
    for key, value in values.items():
        if key not in known:
            raise ConfigError(f"unknown config key: {key}")
        kwargs[key] = value

    for required in ("articles_path", "interpretations_path", "cases_path"):
        if required not in kwargs:
            raise ConfigError(f"missing required config key: {required}")

    try:
        return AppConfig(retrieval=RetrievalConfig(**retrieval_kwargs), **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def resolve_config_path(flag_value: str | None) -> Path:
    """Pick the config path: the ELLA_CONFIG env var wins over the flag."""
    env_value = os.environ.get(ENV_CONFIG_VAR)
    if env_value:
        return Path(env_value)
    if flag_value:
        return Path(flag_value)
    raise ConfigError(f"no config file given (use --config or {ENV_CONFIG_VAR})")
