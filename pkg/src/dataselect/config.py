"""Pipeline configuration: a declarative JSON file plus command-line overrides."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .clustering import DEFAULT_CLUSTERS, DEFAULT_MIN_COUNT
from .lm import DEFAULT_PAD, EVALUATION_ORDER, SELECTION_ORDER

METHODS = ("ml-mono", "ml-bi", "ldm-mono", "ldm-bi", "cynical")
BILINGUAL = ("ml-bi", "ldm-bi")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    task: str = ""
    pool: str = ""
    out: str = "out"
    method: str = "ml-mono"
    task_tgt: str | None = None
    pool_tgt: str | None = None
    order: int = SELECTION_ORDER
    eval_order: int = EVALUATION_ORDER
    pad: int = DEFAULT_PAD
    clusters: int = DEFAULT_CLUSTERS
    min_count: int = DEFAULT_MIN_COUNT
    cluster_file: str | None = None
    bad_suffix: bool = False
    split_boring: bool = False
    budget: int | None = None
    batch: bool = False
    delta: float = 1.0
    sizes: list[int] = field(default_factory=list)
    threads: int = 1
    seed: int = 0

    def validate(self) -> "PipelineConfig":
        if self.method not in METHODS:
            raise ConfigError("unknown method %r (choose from %s)" % (self.method, ", ".join(METHODS)))
        if not self.task or not self.pool:
            raise ConfigError("both --task and --pool are required")
        if self.method in BILINGUAL and not (self.task_tgt and self.pool_tgt):
            raise ConfigError("method %s needs target-side corpora: pass --task-tgt and --pool-tgt"
                              % self.method)
        if self.method == "cynical" and (self.task_tgt or self.pool_tgt):
            raise ConfigError("cynical selection is monolingual; drop --task-tgt/--pool-tgt")
        for name in ("order", "eval_order", "clusters", "min_count", "threads"):
            if getattr(self, name) < 1:
                raise ConfigError("%s must be >= 1" % name.replace("_", "-"))
        if self.pad < 0:
            raise ConfigError("pad must be >= 0")
        if self.budget is not None and self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if self.delta <= 0:
            raise ConfigError("delta must be positive")
        if any(n < 1 for n in self.sizes) or self.sizes != sorted(set(self.sizes)):
            raise ConfigError("sizes must be positive, distinct and ascending")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError("unknown config keys: %s" % ", ".join(sorted(unknown)))
        d = dict(d)
        if "sizes" in d:
            d["sizes"] = [int(x) for x in d["sizes"]]
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        return cls.from_dict(json.loads(text))

    @classmethod
    def load(cls, path) -> "PipelineConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))

    def override(self, **kw) -> "PipelineConfig":
        d = self.to_dict()
        d.update({k: v for k, v in kw.items() if v is not None})
        return PipelineConfig.from_dict(d)
