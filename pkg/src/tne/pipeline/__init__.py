"""Stage orchestration, run configuration and reports."""

from .artifacts import StaleArtifactError, sha256_file
from .config import ConfigError, RunConfig, load_config, parse_config
from .stages import Layout, run_bench, run_chain, run_embed, run_eval, run_fuse, run_topics, run_walk

__all__ = [
    "StaleArtifactError", "sha256_file", "ConfigError", "RunConfig", "load_config", "parse_config",
    "Layout", "run_bench", "run_chain", "run_embed", "run_eval", "run_fuse", "run_topics", "run_walk",
]
