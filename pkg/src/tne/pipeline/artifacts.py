"""Metadata sidecars: every artifact records its params, seed and input checksums."""

from __future__ import annotations

import hashlib
import json
import logging
from pathlib import Path

logger = logging.getLogger(__name__)


class StaleArtifactError(RuntimeError):
    """An artifact no longer matches the inputs or contents it was recorded with."""


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def meta_path(artifact: Path) -> Path:
    return artifact.with_name(artifact.name + ".meta.json")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_meta(artifact: Path, stage: str, params: dict, seed: int,
               inputs: dict[str, str], outputs: dict[str, Path], **extra) -> dict:
    meta = {
        **extra,
        "stage": stage,
        "params": _jsonable(params),
        "seed": seed,
        "inputs": dict(inputs),
        "outputs": {name: {"path": p.name, "sha256": sha256_file(p)} for name, p in outputs.items()},
    }
    meta_path(artifact).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return meta


def read_meta(artifact: Path) -> dict:
    path = meta_path(artifact)
    if not path.exists():
        raise FileNotFoundError(f"{artifact} has no metadata sidecar; run the stage that produces it")
    return json.loads(path.read_text())


def verify_outputs(artifact: Path, meta: dict | None = None) -> dict:
    """Check that every output listed in the sidecar still has its recorded checksum."""
    meta = meta if meta is not None else read_meta(artifact)
    for name, rec in meta["outputs"].items():
        p = artifact.parent / rec["path"]
        if not p.exists():
            raise FileNotFoundError(f"{p} listed in {meta_path(artifact).name} is missing")
        if sha256_file(p) != rec["sha256"]:
            raise StaleArtifactError(
                f"{p} was modified after the {meta['stage']} stage wrote it; rerun that stage")
    return meta


def output_sum(meta: dict, name: str) -> str:
    return meta["outputs"][name]["sha256"]


def is_fresh(artifact: Path, params: dict, seed: int, inputs: dict[str, str]) -> bool:
    """True when a cached artifact was built from exactly these params, seed and inputs."""
    if not meta_path(artifact).exists():
        return False
    try:
        meta = read_meta(artifact)
        verify_outputs(artifact, meta)
    except (StaleArtifactError, FileNotFoundError, ValueError, KeyError):
        return False
    fresh = (meta["params"] == _jsonable(params) and meta["seed"] == seed
             and meta["inputs"] == inputs)
    if fresh:
        logger.info("cached: %s", artifact)
    return fresh
