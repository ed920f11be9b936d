#!/usr/bin/env python3
"""Download benchmark graphs and convert them to ``.edgelist`` / ``.labels`` files.

Usage: python scripts/fetch_datasets.py [--dest data] [names ...]

Every graph is written as whitespace-separated ``u v`` lines. Nodes without
edges (Citeseer has some) are written as ``v v`` lines so the loader still
registers them; the self-loop itself is dropped on load.
"""

from __future__ import annotations

import argparse
import gzip
import io
import sys
import tarfile
import urllib.request
from pathlib import Path

LINQS = "https://linqs-data.soe.ucsc.edu/public/lbc/{}.tgz"
SNAP = "https://snap.stanford.edu/data/{}.txt.gz"
PPI = "https://snap.stanford.edu/node2vec/Homo_sapiens.mat"


def _get(url: str) -> bytes:
    print(f"fetching {url}", file=sys.stderr)
    req = urllib.request.Request(url, headers={"User-Agent": "tne-fetch"})
    with urllib.request.urlopen(req, timeout=120) as resp:
        return resp.read()


def _write(dest: Path, name: str, nodes, edges, labels=None) -> None:
    out = dest / name
    out.mkdir(parents=True, exist_ok=True)
    touched = set()
    with open(out / f"{name}.edgelist", "w") as fh:
        for u, v in edges:
            fh.write(f"{u} {v}\n")
            touched.update((u, v))
        for v in nodes:
            if v not in touched:
                fh.write(f"{v} {v}\n")
    if labels is not None:
        with open(out / f"{name}.labels", "w") as fh:
            for v in nodes:
                if labels.get(v):
                    fh.write(f"{v} {' '.join(sorted(labels[v]))}\n")
    print(f"{name}: {len(nodes)} nodes, {len(edges)} edge lines -> {out}", file=sys.stderr)


def _undirected(pairs, keep=None):
    seen = set()
    out = []
    for u, v in pairs:
        if u == v or (keep is not None and (u not in keep or v not in keep)):
            continue
        key = (u, v) if u <= v else (v, u)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


def fetch_linqs(name: str, dest: Path) -> None:
    """Citeseer / Cora: node ids and classes from ``.content``, edges from ``.cites``."""
    blob = _get(LINQS.format(name))
    content = cites = None
    with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as tar:
        for m in tar.getmembers():
            if m.name.endswith(".content"):
                content = tar.extractfile(m).read().decode("utf-8")
            elif m.name.endswith(".cites"):
                cites = tar.extractfile(m).read().decode("utf-8")
    if content is None or cites is None:
        raise RuntimeError(f"{name} archive lacks .content or .cites")
    nodes, labels = [], {}
    for line in content.splitlines():
        parts = line.split()
        if parts:
            nodes.append(parts[0])
            labels[parts[0]] = {parts[-1]}
    keep = set(nodes)
    edges = _undirected((ln.split()[0], ln.split()[1]) for ln in cites.splitlines() if ln.strip())
    edges = [e for e in edges if e[0] in keep and e[1] in keep]
    _write(dest, name, nodes, edges, labels)


def fetch_snap(name: str, remote: str, dest: Path) -> None:
    text = gzip.decompress(_get(SNAP.format(remote))).decode("utf-8")
    pairs = []
    for line in text.splitlines():
        if line.startswith("#") or not line.strip():
            continue
        u, v = line.split()[:2]
        pairs.append((u, v))
    edges = _undirected(pairs)
    nodes = list(dict.fromkeys(x for e in edges for x in e))
    _write(dest, name, nodes, edges)


def fetch_ppi(dest: Path) -> None:
    from scipy.io import loadmat
    from scipy.sparse import triu

    mat = loadmat(io.BytesIO(_get(PPI)))
    adj = triu(mat["network"].tocsr(), k=1).tocoo()
    groups = mat["group"].tocsr()
    nodes = [str(i) for i in range(adj.shape[0])]
    edges = [(str(u), str(v)) for u, v in zip(adj.row.tolist(), adj.col.tolist())]
    labels = {str(i): {str(j) for j in groups[i].indices.tolist()} for i in range(groups.shape[0])}
    _write(dest, "ppi", nodes, edges, labels)


FETCHERS = {
    "citeseer": lambda d: fetch_linqs("citeseer", d),
    "cora": lambda d: fetch_linqs("cora", d),
    "ppi": fetch_ppi,
    "facebook": lambda d: fetch_snap("facebook", "facebook_combined", d),
    "gnutella": lambda d: fetch_snap("gnutella", "p2p-Gnutella08", d),
    "grqc": lambda d: fetch_snap("grqc", "ca-GrQc", d),
}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*", default=["citeseer", "facebook"],
                    help=f"any of {', '.join(FETCHERS)} (default: citeseer facebook)")
    ap.add_argument("--dest", default="data")
    args = ap.parse_args(argv)
    dest = Path(args.dest)
    failed = []
    for name in args.names:
        if name not in FETCHERS:
            ap.error(f"unknown dataset {name!r}")
        try:
            FETCHERS[name](dest)
        except Exception as exc:  # noqa: BLE001
            print(f"{name}: {exc}", file=sys.stderr)
            failed.append(name)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
