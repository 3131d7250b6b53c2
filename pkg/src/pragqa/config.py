"""Config file loading, overrides, and engine assembly for the CLI and service.

The config is plain JSON with a fixed key schema; unknown keys are rejected
so typos fail loudly. Backend stages default to the offline stubs, which
keeps every command runnable without network access.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

from .backends import BackendConfig, HttpCompletion, HttpEmbedding, HttpRerank
from .corpus import load_store
from .errors import IoError
from .evalkit import HttpScorer
from .inference import load_exemplars
from .pipeline import Backends, PipelineConfig, QAEngine
from .retrieval import load_index
from .stubs import StubCompletion, StubEmbedding, StubRerank


class ConfigError(ValueError):
    """Invalid configuration file or override."""


@dataclass
class CliConfig:
    config_path: str | None = None
    overrides: list[str] = field(default_factory=list)


DEFAULT_CONFIG: dict = {
    "backends": {
        "embed": {"kind": "stub", "dim": 64},
        "rerank": {"kind": "stub"},
        "read": {"kind": "stub"},
        "generate": {"kind": "stub"},
    },
    "pipeline": {"n_retrieve": 100, "n_question_passages": 5, "max_context_tokens": None},
    "paths": {"passages": None, "index": None},
    "inference": {"exemplar_seed": 0, "exemplars_path": None},
    "service": {"host": "127.0.0.1", "port": 8000, "timeout_s": 120.0},
    "scorers": {},
}

_STAGE_KEYS = {
    "stub": {"kind", "dim", "canned", "default", "model_id"},
    "http": {"kind", "endpoint", "model_id", "timeout_ms", "max_retries",
             "credential_env", "rate_limit"},
}

_TOP_KEYS = set(DEFAULT_CONFIG)
_SIMPLE_SECTION_KEYS = {
    "pipeline": {"n_retrieve", "n_question_passages", "max_context_tokens"},
    "paths": {"passages", "index"},
    "inference": {"exemplar_seed", "exemplars_path"},
    "service": {"host", "port", "timeout_s"},
}
_SCORER_KEYS = {"endpoint", "timeout_s"}


def _validate(config: dict) -> None:
    unknown = set(config) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for section, allowed in _SIMPLE_SECTION_KEYS.items():
        extra = set(config.get(section, {})) - allowed
        if extra:
            raise ConfigError(f"unknown keys in '{section}': {sorted(extra)}")
    backends = config.get("backends", {})
    extra_stages = set(backends) - {"embed", "rerank", "read", "generate"}
    if extra_stages:
        raise ConfigError(f"unknown backend stages: {sorted(extra_stages)}")
    for stage, spec in backends.items():
        kind = spec.get("kind")
        if kind not in _STAGE_KEYS:
            raise ConfigError(f"backend '{stage}': unknown kind {kind!r}")
        extra = set(spec) - _STAGE_KEYS[kind]
        if extra:
            raise ConfigError(f"backend '{stage}': unknown keys {sorted(extra)}")
    for name, spec in config.get("scorers", {}).items():
        extra = set(spec) - _SCORER_KEYS
        if extra:
            raise ConfigError(f"scorer '{name}': unknown keys {sorted(extra)}")
        if "endpoint" not in spec:
            raise ConfigError(f"scorer '{name}': missing 'endpoint'")


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict) and key != "scorers":
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(path: str | None = None, overrides: list[str] | None = None) -> dict:
    """Defaults, deep-merged with the file at ``path``, then key=value overrides."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                file_config = json.load(fh)
        except OSError as exc:
            raise IoError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
        if not isinstance(file_config, dict):
            raise ConfigError("config root must be an object")
        # backend stage specs replace rather than merge, so a file can switch kinds
        for stage, spec in file_config.get("backends", {}).items():
            config["backends"][stage] = copy.deepcopy(spec)
        rest = {k: v for k, v in file_config.items() if k != "backends"}
        config = _merge(config, rest)
    for override in overrides or []:
        config = _apply_override(config, override)
    _validate(config)
    return config


def _apply_override(config: dict, override: str) -> dict:
    if "=" not in override:
        raise ConfigError(f"override {override!r} is not key=value")
    dotted, raw_value = override.split("=", 1)
    keys = dotted.split(".")
    try:
        value = json.loads(raw_value)
    except json.JSONDecodeError:
        value = raw_value
    node = config
    for key in keys[:-1]:
        if key not in node or not isinstance(node[key], dict):
            raise ConfigError(f"unknown config key {dotted!r}")
        node = node[key]
    node[keys[-1]] = value
    return config


def build_backend(stage: str, spec: dict):
    kind = spec.get("kind", "stub")
    if kind == "stub":
        if stage == "embed":
            return StubEmbedding(dim=spec.get("dim", 64))
        if stage == "rerank":
            return StubRerank()
        return StubCompletion(
            canned=spec.get("canned"),
            default=spec.get("default", StubCompletion().default),
            model_id=spec.get("model_id", f"stub-{stage}"),
        )
    if kind == "http":
        backend_config = BackendConfig(
            endpoint=spec["endpoint"],
            model_id=spec.get("model_id", stage),
            timeout_ms=spec.get("timeout_ms", 30_000),
            max_retries=spec.get("max_retries", 2),
            credential_env=spec.get("credential_env", ""),
            rate_limit=spec.get("rate_limit", 8),
        )
        cls = {"embed": HttpEmbedding, "rerank": HttpRerank}.get(stage, HttpCompletion)
        return cls(backend_config)
    raise ConfigError(f"backend '{stage}': unknown kind {kind!r}")


def build_backends(config: dict) -> Backends:
    specs = config["backends"]
    return Backends(
        embed=build_backend("embed", specs["embed"]),
        rerank=build_backend("rerank", specs["rerank"]),
        read=build_backend("read", specs["read"]),
        generate=build_backend("generate", specs["generate"]) if "generate" in specs else None,
    )


def build_engine(config: dict) -> QAEngine:
    """Load the passage store and index named in the config and wire an engine."""
    paths = config["paths"]
    if not paths.get("passages") or not paths.get("index"):
        raise ConfigError("config needs paths.passages and paths.index to build an engine")
    passages = load_store(paths["passages"])
    index = load_index(paths["index"])
    exemplars_path = config["inference"].get("exemplars_path")
    exemplars = load_exemplars(exemplars_path) if exemplars_path else None
    return QAEngine(
        passages=passages,
        index=index,
        backends=build_backends(config),
        config=PipelineConfig(
            n_retrieve=config["pipeline"]["n_retrieve"],
            n_question_passages=config["pipeline"]["n_question_passages"],
            max_context_tokens=config["pipeline"].get("max_context_tokens"),
        ),
        exemplars=exemplars,
        exemplar_seed=config["inference"].get("exemplar_seed", 0),
    )


def build_scorer(name: str, config: dict) -> HttpScorer:
    scorers = config.get("scorers", {})
    if name not in scorers:
        raise ConfigError(f"scorer {name!r} is not configured")
    spec = scorers[name]
    return HttpScorer(name=name, endpoint=spec["endpoint"],
                      timeout_s=spec.get("timeout_s", 30.0))
