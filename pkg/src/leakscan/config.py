"""Run configuration: defaults, flat key-value config files, overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path

from .errors import IoError, LeakscanError
from .matchstore import DEFAULT_CAPACITY
from .semantic import DEFAULT_K, DEFAULT_W

__all__ = ["RunConfig", "ConfigError"]


class ConfigError(LeakscanError):
    pass


# dataclass field name -> config file key
_KEYS = {
    "benchmark": "benchmark.path",
    "corpus": "corpus.root",
    "corpus_mode": "corpus.mode",
    "corpus_glob": "corpus.glob",
    "capacity": "matchstore.capacity",
    "stride": "window.stride",
    "distance": "distance.variant",
    "prune": "prune.enabled",
    "semantic_k": "semantic.k",
    "semantic_w": "semantic.w",
    "workers": "run.workers",
    "out_dir": "out.dir",
}
_FIELDS = {key: name for name, key in _KEYS.items()}


@dataclass
class RunConfig:
    """Everything a scan needs; only the two input paths have no default.

    All algorithms are deterministic, so a config file plus its inputs
    reproduces a run exactly.
    """

    benchmark: str | None = None
    corpus: str | None = None
    corpus_mode: str = "directory"
    corpus_glob: str = "*.py"
    capacity: int = DEFAULT_CAPACITY
    stride: int = 1
    distance: str = "indel"
    prune: bool = True
    semantic_k: int = DEFAULT_K
    semantic_w: int = DEFAULT_W
    workers: int = 1
    out_dir: str = "leakscan-out"

    def validate(self) -> None:
        if self.corpus_mode not in ("directory", "stream"):
            raise ConfigError(f"corpus.mode must be directory or stream, "
                              f"got {self.corpus_mode!r}")
        if self.distance not in ("indel", "levenshtein"):
            raise ConfigError(f"distance.variant must be indel or levenshtein, "
                              f"got {self.distance!r}")
        for name in ("capacity", "stride", "semantic_k", "semantic_w", "workers"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{_KEYS[name]} must be >= 1")

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise IoError(str(path), str(exc)) from exc
        config = cls()
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, raw = line.partition("=")
            key = key.strip()
            raw = raw.strip()
            if key not in _FIELDS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            name = _FIELDS[key]
            current = getattr(config, name)
            if isinstance(current, bool):
                if raw not in ("true", "false"):
                    raise ConfigError(f"{path}:{lineno}: {key} must be true or false")
                value: object = raw == "true"
            elif isinstance(current, int):
                try:
                    value = int(raw)
                except ValueError:
                    raise ConfigError(f"{path}:{lineno}: {key} must be an integer")
            else:
                value = raw
            setattr(config, name, value)
        config.validate()
        return config

    def to_file(self, path: str | Path) -> None:
        lines = []
        for field in fields(self):
            value = getattr(self, field.name)
            if value is None:
                continue
            if isinstance(value, bool):
                value = "true" if value else "false"
            lines.append(f"{_KEYS[field.name]} = {value}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
