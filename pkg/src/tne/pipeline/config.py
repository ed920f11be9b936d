"""Flat ``section.key = value`` run configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

from ..evaluation.linkpred import OPERATORS
from ..fusion import STRATEGIES as FUSION_STRATEGIES
from ..topics.base import BACKENDS
from ..walks import STRATEGIES as WALK_STRATEGIES


TASKS = ("classification", "linkpred")


class ConfigError(ValueError):
    pass


def _bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(x) for x in s.split(",") if x.strip())


def _names(s: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in s.split(",") if x.strip())


def _auto_float(s: str):
    return "auto" if s.strip() == "auto" else float(s)


def _opt_path(s: str):
    return s.strip() or None


# key -> (parser, default)
SCHEMA: dict[str, tuple[Callable[[str], Any], Any]] = {
    "dataset.name": (str, None),
    "dataset.edges": (str, None),
    "dataset.labels": (_opt_path, None),
    "dataset.directed": (_bool, False),
    "walk.n": (int, 80),
    "walk.length": (int, 10),
    "walk.strategy": (str, "uniform"),
    "walk.p": (float, 4.0),
    "walk.q": (float, 1.0),
    "walk.alias": (_bool, False),
    "topics.backend": (str, "lda"),
    "topics.K": (int, 80),
    "topics.alpha": (_auto_float, "auto"),
    "topics.beta": (float, 0.01),
    "topics.p0": (float, 1.0),
    "topics.a0": (float, 1.0),
    "topics.b0": (float, 1.0),
    "topics.iterations": (int, 1000),
    "topics.burn_in": (int, 200),
    "topics.hmm_iterations": (int, 1000),
    "topics.hmm_burn_in": (int, 200),
    "topics.bigclam_iterations": (int, 500),
    "topics.bigclam_step": (float, 0.1),
    "topics.louvain_resolution": (float, 1.0),
    "embed.d": (int, 128),
    "embed.window": (int, 10),
    "embed.negatives": (int, 5),
    "embed.lr0": (float, 0.025),
    "embed.epochs": (int, 1),
    "embed.noise_power": (float, 0.75),
    "fuse.strategy": (str, "max"),
    "eval.task": (_names, ("classification",)),
    "eval.ratios": (_floats, (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)),
    "eval.trials": (int, 50),
    "eval.operators": (_names, OPERATORS),
    "eval.l2": (_auto_float, "auto"),
    "eval.split_ratio": (float, 0.5),
    "bench.backends": (_names, BACKENDS),
    "bench.strategies": (_names, ("max",)),
    "run.seed": (int, 42),
    "run.out": (str, "runs"),
    "run.threads": (int, 1),
}


@dataclass
class RunConfig:
    values: dict = field(default_factory=dict)
    base_dir: Path = Path(".")

    def __getitem__(self, key: str):
        return self.values[key]

    def path(self, key: str) -> Path | None:
        raw = self.values[key]
        if raw is None:
            return None
        p = Path(raw)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def out(self) -> Path:
        return self.path("run.out")

    @property
    def seed(self) -> int:
        return self.values["run.seed"]

    @property
    def threads(self) -> int:
        return self.values["run.threads"]

    @property
    def dataset(self) -> str:
        return self.values["dataset.name"]

    def section(self, prefix: str) -> dict:
        return {k: v for k, v in self.values.items() if k.startswith(prefix + ".")}

    def with_overrides(self, **raw: str) -> "RunConfig":
        """Copy with already-parsed values replaced (keys use ``__`` for ``.``)."""
        vals = dict(self.values)
        for k, v in raw.items():
            key = k.replace("__", ".")
            if key not in SCHEMA:
                raise ConfigError(f"unknown config key {key!r}")
            vals[key] = v
        cfg = RunConfig(vals, self.base_dir)
        validate(cfg)
        return cfg


def parse_config(text: str, base_dir: Path | str = ".", overrides: dict | None = None) -> RunConfig:
    """Parse and validate config text. ``overrides`` maps keys to raw string values."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        raw[key] = value
    for key, value in (overrides or {}).items():
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        raw[key] = value
    values = {}
    for key, (parser, default) in SCHEMA.items():
        if key in raw:
            try:
                values[key] = parser(raw[key])
            except ValueError as exc:
                raise ConfigError(f"{key}: {exc}") from None
        else:
            values[key] = default
    if values["dataset.name"] is None and values["dataset.edges"]:
        values["dataset.name"] = Path(values["dataset.edges"]).stem
    cfg = RunConfig(values, Path(base_dir))
    validate(cfg)
    return cfg


def load_config(path: Path | str, overrides: dict | None = None) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path.parent, overrides)


def validate(cfg: RunConfig) -> None:
    v = cfg.values
    problems = []

    def need(cond, msg):
        if not cond:
            problems.append(msg)

    need(v["dataset.edges"], "dataset.edges is required")
    need(v["walk.n"] >= 1, "walk.n must be >= 1")
    need(v["walk.length"] >= 1, "walk.length must be >= 1")
    need(v["walk.strategy"] in WALK_STRATEGIES, f"walk.strategy must be one of {WALK_STRATEGIES}")
    need(v["walk.p"] > 0 and v["walk.q"] > 0, "walk.p and walk.q must be positive")
    need(v["topics.backend"] in BACKENDS, f"topics.backend must be one of {BACKENDS}")
    need(v["topics.K"] >= 1, "topics.K must be >= 1")
    need(v["topics.iterations"] > v["topics.burn_in"] >= 0, "need topics.iterations > topics.burn_in >= 0")
    need(v["topics.hmm_iterations"] > v["topics.hmm_burn_in"] >= 0,
         "need topics.hmm_iterations > topics.hmm_burn_in >= 0")
    need(v["topics.alpha"] == "auto" or v["topics.alpha"] > 0, "topics.alpha must be positive")
    need(v["topics.beta"] > 0, "topics.beta must be positive")
    need(min(v["topics.p0"], v["topics.a0"], v["topics.b0"]) > 0, "HMM priors must be positive")
    need(v["embed.d"] >= 1, "embed.d must be >= 1")
    need(v["embed.window"] >= 1, "embed.window must be >= 1")
    need(v["embed.negatives"] >= 1, "embed.negatives must be >= 1")
    need(v["embed.lr0"] > 0, "embed.lr0 must be positive")
    need(v["embed.epochs"] >= 1, "embed.epochs must be >= 1")
    need(v["fuse.strategy"] in FUSION_STRATEGIES, f"fuse.strategy must be one of {FUSION_STRATEGIES}")
    need(v["eval.task"] and all(t in TASKS for t in v["eval.task"]), f"eval.task must be from {TASKS}")
    need(all(0 < r < 1 for r in v["eval.ratios"]) and v["eval.ratios"], "eval.ratios must lie in (0, 1)")
    need(v["eval.trials"] >= 1, "eval.trials must be >= 1")
    need(all(op in OPERATORS for op in v["eval.operators"]), f"eval.operators must be from {OPERATORS}")
    need(v["eval.l2"] == "auto" or v["eval.l2"] >= 0, "eval.l2 must be >= 0 or auto")
    need(0 < v["eval.split_ratio"] < 1, "eval.split_ratio must lie in (0, 1)")
    need(all(b in BACKENDS for b in v["bench.backends"]), f"bench.backends must be from {BACKENDS}")
    need(all(s in FUSION_STRATEGIES for s in v["bench.strategies"]),
         f"bench.strategies must be from {FUSION_STRATEGIES}")
    need(v["run.threads"] >= 1, "run.threads must be >= 1")
    if "classification" in v["eval.task"] and not v["dataset.labels"]:
        problems.append("classification needs dataset.labels")
    if problems:
        raise ConfigError("; ".join(problems))
