"""Run configurations, loadable from TOML files mirroring the fields."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

from .marking import parse_scheme_string

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib


class ConfigError(ValueError):
    pass


_CRF_SCHEMES = {"event_span", "joint"}
VARIANTS = ("vote", "token", "context", "masked", "trigger_plus_head", "full_plus_head")


@dataclass
class TaggerConfig:
    encoder: str
    corpus: str
    tags: str
    manifest: str
    scheme: str = "trigger_biose:fine_conflated"
    fold: int = 0
    epochs: int = 6
    batch_size: int = 8
    learning_rate: float = 1e-5
    optimizer: str = "adam"
    feature: str = "none"  # none | head | trigger
    feature_file: str | None = None  # predictions corpus for predicted features
    crf: bool | None = None  # None = on iff the scheme is event_span/joint
    select_best: bool = False  # reproduction default: fixed epochs
    max_length: int = 256
    seed: int = 1
    device: str = "cpu"

    def __post_init__(self):
        kind, _ = parse_scheme_string(self.scheme)
        needs_crf = kind in _CRF_SCHEMES
        if self.crf is None:
            self.crf = needs_crf
        elif self.crf != needs_crf:
            raise ConfigError(
                f"crf={self.crf} conflicts with scheme {self.scheme!r}: CRF decoding "
                f"is used exactly for event-span and joint schemes"
            )
        if self.feature not in ("none", "head", "trigger"):
            raise ConfigError(f"feature must be none|head|trigger, got {self.feature!r}")
        if self.optimizer not in ("adam", "adamw"):
            raise ConfigError(f"optimizer must be adam|adamw, got {self.optimizer!r}")


@dataclass
class ClassifierConfig:
    encoder: str
    corpus: str
    manifest: str
    variant: str = "context"
    granularity: str = "fine_conflated"  # coarse | fine_conflated
    fold: int = 0
    epochs: int = 6
    batch_size: int = 8
    learning_rate: float = 1e-5
    optimizer: str = "adam"
    select_best: bool = False
    max_length: int = 256
    seed: int = 1
    device: str = "cpu"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.granularity not in ("coarse", "fine_conflated", "fine_full"):
            raise ConfigError(f"unsupported granularity {self.granularity!r}")
        if self.optimizer not in ("adam", "adamw"):
            raise ConfigError(f"optimizer must be adam|adamw, got {self.optimizer!r}")


def _load_table(path: str | Path) -> dict:
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except OSError as exc:
        raise ConfigError(f"config {path}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path}: {exc}")


def _build(cls, table: dict, overrides: dict):
    import dataclasses

    merged = dict(table)
    merged.update({k: v for k, v in overrides.items() if v is not None})
    fields = cls.__dataclass_fields__
    unknown = set(merged) - set(fields)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    required = [
        name for name, f in fields.items()
        if f.default is dataclasses.MISSING and f.default_factory is dataclasses.MISSING
    ]
    missing = [name for name in required if name not in merged]
    if missing:
        raise ConfigError(f"missing required config keys: {missing}")
    return cls(**merged)


def load_tagger_config(path: str | Path | None, **overrides) -> TaggerConfig:
    table = {}
    if path:
        raw = _load_table(path)
        table = raw.get("tagger", raw)
    return _build(TaggerConfig, table, overrides)


def load_classifier_config(path: str | Path | None, **overrides) -> ClassifierConfig:
    table = {}
    if path:
        raw = _load_table(path)
        table = raw.get("classifier", raw)
    return _build(ClassifierConfig, table, overrides)


def config_as_dict(config) -> dict:
    return asdict(config)
