"""``tne`` command line: one subcommand per pipeline stage."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .graph import GraphFormatError
from .pipeline import stages
from .pipeline.artifacts import StaleArtifactError
from .pipeline.config import ConfigError, load_config

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

logger = logging.getLogger("tne")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tne", description="Topical node embeddings pipeline.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, help_ in (("walk", "generate the walk corpus"),
                        ("topics", "infer topic assignments and P(v|k)"),
                        ("embed", "train node and topic embeddings"),
                        ("fuse", "concatenate node and topic embeddings"),
                        ("eval", "classification / link prediction reports"),
                        ("bench", "all backends x strategies with summary tables")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="key = value run configuration")
        p.add_argument("--seed", type=int, help="overrides run.seed")
        p.add_argument("--threads", type=int, help="overrides run.threads (1 = deterministic)")
        p.add_argument("--out", help="overrides run.out")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        p.add_argument("-q", "--quiet", action="store_true")
    return ap


def _overrides(args) -> dict:
    out = {}
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    if args.seed is not None:
        out["run.seed"] = str(args.seed)
    if args.threads is not None:
        out["run.threads"] = str(args.threads)
    return out


def _run(args) -> None:
    cfg = load_config(args.config, _overrides(args))
    # --out is relative to the working directory, not the config file
    if args.out is not None:
        cfg.values["run.out"] = str(Path(args.out).resolve())
    cmd = args.command
    if cmd == "walk":
        print(stages.run_walk(cfg))
    elif cmd == "topics":
        print(stages.run_topics(cfg))
    elif cmd == "embed":
        for p in stages.run_embed(cfg):
            print(p)
    elif cmd == "fuse":
        print(stages.run_fuse(cfg))
    elif cmd == "eval":
        layout = stages.Layout(cfg.out)
        for p in stages.write_task_reports(stages.run_eval(cfg, layout=layout), layout):
            print(p)
            print(p.with_suffix(".txt").read_text(), end="")
    elif cmd == "bench":
        for p in stages.run_bench(cfg):
            print(p)
            print(p.with_suffix(".txt").read_text(), end="")


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        _run(args)
    except (ConfigError, StaleArtifactError, GraphFormatError) as exc:
        print(f"tne {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        logger.debug("failure", exc_info=True)
        print(f"tne {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
