"""Pipeline stages. Each one caches its artifact next to a metadata sidecar."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..embedding import read_embedding, train_node_embedding, train_topic_embedding, write_embedding
from ..evaluation import classify_eval, edge_split, linkpred_eval
from ..fusion import fuse
from ..graph import Graph, load_edge_list, load_labels, write_edge_list
from ..topics import (
    WALK_BACKENDS,
    TopicAssignment,
    bigclam_fit,
    hmm_fit,
    lda_fit,
    louvain_fit,
    read_assignment,
    read_posterior,
    write_assignment,
    write_posterior,
)
from ..walks import WalkCorpus, generate_walks, read_corpus, write_corpus
from . import report
from .artifacts import (
    StaleArtifactError,
    is_fresh,
    output_sum,
    read_meta,
    sha256_file,
    verify_outputs,
    write_meta,
)
from .config import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class Layout:
    """Where each stage puts its files under one output directory."""

    root: Path

    @property
    def corpus(self) -> Path:
        return self.root / "walks" / "walks.txt"

    def topics_dir(self, backend: str) -> Path:
        return self.root / "topics" / backend

    def posterior(self, backend: str) -> Path:
        return self.topics_dir(backend) / "posterior.txt"

    def assignment(self, backend: str) -> Path:
        name = "assignment.txt" if backend in WALK_BACKENDS else "communities.txt"
        return self.topics_dir(backend) / name

    @property
    def node_emb(self) -> Path:
        return self.root / "embed" / "node.emb"

    def topic_emb(self, backend: str) -> Path:
        return self.root / "embed" / backend / "topic.emb"

    def fused(self, backend: str, strategy: str) -> Path:
        return self.root / "fused" / f"{backend}-{strategy}.emb"

    @property
    def reports(self) -> Path:
        return self.root / "reports"

    @property
    def linkpred(self) -> Path:
        return self.root / "linkpred"


def _mkparent(path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def load_graph(cfg: RunConfig) -> tuple[Graph, str]:
    path = cfg.path("dataset.edges")
    with open(path, encoding="utf-8") as fh:
        graph = load_edge_list(fh, directed_input=cfg["dataset.directed"])
    return graph, sha256_file(path)


def _walk_params(cfg: RunConfig) -> dict:
    p = cfg.section("walk")
    if p["walk.strategy"] == "uniform":
        p.pop("walk.p"), p.pop("walk.q"), p.pop("walk.alias")
    return p


def _topic_params(cfg: RunConfig, backend: str) -> dict:
    keys = {
        "lda": ("topics.K", "topics.alpha", "topics.beta", "topics.iterations", "topics.burn_in"),
        "hmm": ("topics.K", "topics.p0", "topics.a0", "topics.b0", "topics.hmm_iterations",
                "topics.hmm_burn_in"),
        "louvain": ("topics.louvain_resolution",),
        "bigclam": ("topics.K", "topics.bigclam_iterations", "topics.bigclam_step"),
    }[backend]
    return {"backend": backend, **{k: cfg[k] for k in keys}}


def _embed_params(cfg: RunConfig) -> dict:
    return {**cfg.section("embed"), "threads": cfg.threads}


# ---------------------------------------------------------------------------
# walk


def run_walk(cfg: RunConfig, layout: Layout | None = None) -> Path:
    layout = layout or Layout(cfg.out)
    graph, graph_sum = load_graph(cfg)
    out = layout.corpus
    params = _walk_params(cfg)
    if is_fresh(out, params, cfg.seed, {"graph": graph_sum}):
        return out
    t0 = time.perf_counter()
    corpus = generate_walks(graph, cfg["walk.n"], cfg["walk.length"], cfg["walk.strategy"],
                            cfg["walk.p"], cfg["walk.q"], seed=cfg.seed,
                            use_alias=cfg["walk.alias"], threads=cfg.threads)
    with open(_mkparent(out), "w", encoding="utf-8") as fh:
        write_corpus(corpus, graph, fh)
    write_meta(out, "walk", params, cfg.seed, {"graph": graph_sum}, {"corpus": out})
    logger.info("walk: %d walks in %.1fs -> %s", len(corpus), time.perf_counter() - t0, out)
    return out


def _load_corpus(cfg: RunConfig, layout: Layout, graph: Graph, graph_sum: str) -> tuple[WalkCorpus, str]:
    path = layout.corpus
    meta = verify_outputs(path)
    if meta["inputs"]["graph"] != graph_sum:
        raise StaleArtifactError(
            f"{path} was generated from a different graph file than {cfg.path('dataset.edges')}; "
            "rerun `tne walk`")
    with open(path, encoding="utf-8") as fh:
        corpus = read_corpus(fh, graph, walks_per_node=cfg["walk.n"], walk_length=cfg["walk.length"],
                             strategy=cfg["walk.strategy"], p=cfg["walk.p"], q=cfg["walk.q"],
                             seed=cfg.seed)
    return corpus, output_sum(meta, "corpus")


# ---------------------------------------------------------------------------
# topics


def run_topics(cfg: RunConfig, backend: str | None = None, layout: Layout | None = None) -> Path:
    backend = backend or cfg["topics.backend"]
    layout = layout or Layout(cfg.out)
    graph, graph_sum = load_graph(cfg)
    params = _topic_params(cfg, backend)
    post_path = layout.posterior(backend)
    assign_path = layout.assignment(backend)

    if backend in WALK_BACKENDS:
        corpus, corpus_sum = _load_corpus(cfg, layout, graph, graph_sum)
        inputs = {"corpus": corpus_sum}
    else:
        inputs = {"graph": graph_sum}
    if is_fresh(post_path, params, cfg.seed, inputs):
        return post_path

    t0 = time.perf_counter()
    K = cfg["topics.K"]
    if backend == "lda":
        alpha = None if cfg["topics.alpha"] == "auto" else cfg["topics.alpha"]
        assignment, posterior = lda_fit(corpus, K, alpha, cfg["topics.beta"],
                                        cfg["topics.iterations"], cfg["topics.burn_in"], cfg.seed)
    elif backend == "hmm":
        assignment, _, posterior = hmm_fit(corpus, K, cfg["topics.p0"], cfg["topics.a0"],
                                           cfg["topics.b0"], cfg["topics.hmm_iterations"],
                                           cfg["topics.hmm_burn_in"], cfg.seed)
    elif backend == "louvain":
        assignment, posterior = louvain_fit(graph, cfg.seed, cfg["topics.louvain_resolution"])
    elif backend == "bigclam":
        assignment, posterior = bigclam_fit(graph, K, cfg["topics.bigclam_iterations"],
                                            cfg["topics.bigclam_step"], cfg.seed)
    else:
        raise ValueError(f"unknown topic backend {backend!r}")

    _mkparent(post_path)
    with open(post_path, "w", encoding="utf-8") as fh:
        write_posterior(posterior, fh)
    with open(assign_path, "w", encoding="utf-8") as fh:
        if backend in WALK_BACKENDS:
            write_assignment(assignment, fh)
        else:
            for tok, k in zip(graph.tokens, assignment.per_node.tolist()):
                fh.write(f"{tok} {k}\n")
    write_meta(post_path, "topics", params, cfg.seed, inputs,
               {"posterior": post_path, "assignment": assign_path}, K_fitted=posterior.K)
    logger.info("topics[%s]: K=%d in %.1fs -> %s", backend, posterior.K,
                time.perf_counter() - t0, post_path.parent)
    return post_path


def _load_assignment(layout: Layout, backend: str, graph: Graph, corpus: WalkCorpus,
                     corpus_sum: str, graph_sum: str) -> tuple[TopicAssignment, int, str]:
    post_path = layout.posterior(backend)
    meta = verify_outputs(post_path)
    if backend in WALK_BACKENDS:
        if meta["inputs"].get("corpus") != corpus_sum:
            raise StaleArtifactError(
                f"topic assignment in {post_path.parent} was inferred from a different walk corpus "
                f"than {layout.corpus} (corpus changed after assignment); rerun `tne topics`")
    elif meta["inputs"].get("graph") != graph_sum:
        raise StaleArtifactError(
            f"communities in {post_path.parent} were detected on a different graph; rerun `tne topics`")
    K = int(meta["K_fitted"])
    path = layout.assignment(backend)
    with open(path, encoding="utf-8") as fh:
        if backend in WALK_BACKENDS:
            assignment = read_assignment(fh, K, backend)
        else:
            labels = np.empty(graph.node_count, dtype=np.int64)
            for line in fh:
                tok, k = line.split()
                labels[graph.index_of(tok)] = int(k)
            assignment = TopicAssignment(K, backend, per_node=labels).with_corpus(corpus)
    assignment.check_covers(corpus)
    if len(assignment.offsets) - 1 != len(corpus):
        raise StaleArtifactError(f"{path} has {len(assignment.offsets) - 1} walks, corpus has {len(corpus)}")
    return assignment, K, output_sum(meta, "posterior")


# ---------------------------------------------------------------------------
# embed


def run_embed(cfg: RunConfig, backend: str | None = None, layout: Layout | None = None) -> tuple[Path, Path]:
    backend = backend or cfg["topics.backend"]
    layout = layout or Layout(cfg.out)
    graph, graph_sum = load_graph(cfg)
    corpus, corpus_sum = _load_corpus(cfg, layout, graph, graph_sum)
    assignment, K, post_sum = _load_assignment(layout, backend, graph, corpus, corpus_sum, graph_sum)
    params = _embed_params(cfg)
    kw = dict(gamma=cfg["embed.window"], d=cfg["embed.d"], negatives=cfg["embed.negatives"],
              lr0=cfg["embed.lr0"], seed=cfg.seed, epochs=cfg["embed.epochs"],
              noise_power=cfg["embed.noise_power"], threads=cfg.threads)

    node_path = layout.node_emb
    if not is_fresh(node_path, params, cfg.seed, {"corpus": corpus_sum}):
        t0 = time.perf_counter()
        node = train_node_embedding(corpus, node_tokens=graph.tokens, **kw)
        with open(_mkparent(node_path), "w", encoding="utf-8") as fh:
            write_embedding(node.input_matrix, graph.tokens, fh)
        write_meta(node_path, "embed", params, cfg.seed, {"corpus": corpus_sum}, {"node": node_path})
        logger.info("embed[node]: %d pairs in %.1fs", node.trained_pairs, time.perf_counter() - t0)

    topic_path = layout.topic_emb(backend)
    assign_sum = sha256_file(layout.assignment(backend))
    inputs = {"corpus": corpus_sum, "assignment": assign_sum}
    if not is_fresh(topic_path, params, cfg.seed, inputs):
        t0 = time.perf_counter()
        topic = train_topic_embedding(corpus, assignment, **kw)
        with open(_mkparent(topic_path), "w", encoding="utf-8") as fh:
            write_embedding(topic.input_matrix, topic.tokens, fh)
        write_meta(topic_path, "embed", params, cfg.seed, inputs, {"topic": topic_path})
        logger.info("embed[%s]: %d pairs in %.1fs", backend, topic.trained_pairs, time.perf_counter() - t0)
    return node_path, topic_path


# ---------------------------------------------------------------------------
# fuse


def _read_emb(path: Path) -> tuple[list[str], np.ndarray, str]:
    meta = verify_outputs(path)
    with open(path, encoding="utf-8") as fh:
        tokens, matrix = read_embedding(fh)
    return tokens, matrix, next(iter(meta["outputs"].values()))["sha256"]


def run_fuse(cfg: RunConfig, backend: str | None = None, strategy: str | None = None,
             layout: Layout | None = None) -> Path:
    backend = backend or cfg["topics.backend"]
    strategy = strategy or cfg["fuse.strategy"]
    layout = layout or Layout(cfg.out)
    graph, _ = load_graph(cfg)
    node_tokens, node, node_sum = _read_emb(layout.node_emb)
    _, topic, topic_sum = _read_emb(layout.topic_emb(backend))
    post_path = layout.posterior(backend)
    post_meta = verify_outputs(post_path)
    topic_meta = read_meta(layout.topic_emb(backend))
    if topic_meta["inputs"]["assignment"] != post_meta["outputs"]["assignment"]["sha256"]:
        raise StaleArtifactError(
            f"{layout.topic_emb(backend)} was trained on a different topic assignment than "
            f"{post_path.parent} holds now; rerun `tne embed`")
    if tuple(node_tokens) != graph.tokens:
        raise StaleArtifactError(f"{layout.node_emb} rows do not match the graph's nodes")
    out = layout.fused(backend, strategy)
    inputs = {"node": node_sum, "topic": topic_sum, "posterior": output_sum(post_meta, "posterior")}
    params = {"strategy": strategy, "backend": backend}
    if is_fresh(out, params, cfg.seed, inputs):
        return out
    with open(post_path, encoding="utf-8") as fh:
        posterior = read_posterior(fh, backend)
    omega = fuse(strategy, node, topic, posterior.phi, provenance=params)
    with open(_mkparent(out), "w", encoding="utf-8") as fh:
        write_embedding(omega.omega, graph.tokens, fh)
    write_meta(out, "fuse", params, cfg.seed, inputs, {"fused": out})
    logger.info("fuse[%s/%s] -> %s", backend, strategy, out)
    return out


def run_chain(cfg: RunConfig, backend: str, strategies, layout: Layout | None = None) -> None:
    layout = layout or Layout(cfg.out)
    run_walk(cfg, layout)
    run_topics(cfg, backend, layout)
    run_embed(cfg, backend, layout)
    for s in strategies:
        run_fuse(cfg, backend, s, layout)


# ---------------------------------------------------------------------------
# eval


def _matrix_for(path: Path, graph: Graph) -> np.ndarray:
    tokens, matrix, _ = _read_emb(path)
    if tuple(tokens) != graph.tokens:
        raise StaleArtifactError(f"{path} rows do not match the graph's nodes")
    return matrix


def _classification_rows(cfg: RunConfig, models, layout: Layout) -> list[dict]:
    graph, _ = load_graph(cfg)
    with open(cfg.path("dataset.labels"), encoding="utf-8") as fh:
        labels = load_labels(fh, graph)
    rows = []
    for model, strategy, path in models:
        t0 = time.perf_counter()
        rep = classify_eval(_matrix_for(path, graph), labels, cfg["eval.ratios"], cfg["eval.trials"],
                            seed=cfg.seed, l2=cfg["eval.l2"], threads=cfg.threads)
        for r in rep.rows:
            for metric in ("micro_f1", "macro_f1"):
                rows.append({"task": "classification", "dataset": cfg.dataset, "model": model,
                             "strategy": strategy, "ratio_or_operator": r["ratio"],
                             "trial": r["trial"], "metric": metric, "value": r[metric]})
        logger.info("eval[classification] %s/%s in %.1fs", model, strategy, time.perf_counter() - t0)
    return rows


def _model_list(cfg: RunConfig, layout: Layout, combos) -> list[tuple[str, str, Path]]:
    models = [(report.baseline_name(cfg["walk.strategy"]), "none", layout.node_emb)]
    for backend, strategy in combos:
        models.append((report.tne_name(backend), strategy, layout.fused(backend, strategy)))
    return models


def prepare_linkpred(cfg: RunConfig, layout: Layout | None = None):
    """Split the edges first, then point a config at the residual train graph."""
    layout = layout or Layout(cfg.out)
    graph, _ = load_graph(cfg)
    split = edge_split(graph, cfg["eval.split_ratio"], seed=cfg.seed)
    lp = layout.linkpred
    lp.mkdir(parents=True, exist_ok=True)
    train_path = lp / "train.edgelist"
    with open(train_path, "w", encoding="utf-8") as fh:
        write_edge_list(split.train_graph, fh)
    for name, pairs in (("test_pos", split.test_pos), ("test_neg", split.test_neg),
                        ("train_neg", split.train_neg)):
        with open(lp / f"{name}.txt", "w", encoding="utf-8") as fh:
            for u, v in pairs.tolist():
                fh.write(f"{graph.tokens[u]} {graph.tokens[v]}\n")
    sub = cfg.with_overrides(dataset__edges=str(train_path.resolve()), dataset__directed=False,
                             run__out=str(lp.resolve()))
    train_graph, _ = load_graph(sub)
    if train_graph.tokens != graph.tokens:
        raise RuntimeError("train graph file does not preserve node order")
    return split, sub, Layout(lp)


def _linkpred_rows(cfg: RunConfig, split, sub: RunConfig, models) -> list[dict]:
    graph, _ = load_graph(sub)
    rows = []
    for model, strategy, path in models:
        rep = linkpred_eval(split, _matrix_for(path, graph), cfg["eval.operators"], l2=cfg["eval.l2"],
                            seed=cfg.seed)
        for op in cfg["eval.operators"]:
            rows.append({"task": "linkpred", "dataset": cfg.dataset, "model": model,
                         "strategy": strategy, "ratio_or_operator": op, "trial": 0,
                         "metric": "auc", "value": rep.auc[op]})
    return rows


def run_eval(cfg: RunConfig, combos=None, layout: Layout | None = None,
             retrain: bool = True) -> dict[str, list[dict]]:
    """Evaluate the baseline and fused embeddings; returns rows per task.

    Classification reads existing artifacts. Link prediction always splits
    first and, with ``retrain``, reruns every stage on the train graph.
    """
    layout = layout or Layout(cfg.out)
    combos = combos or [(cfg["topics.backend"], cfg["fuse.strategy"])]
    out = {}
    layout.reports.mkdir(parents=True, exist_ok=True)
    for task in cfg["eval.task"]:
        if task == "classification":
            rows = _classification_rows(cfg, _model_list(cfg, layout, combos), layout)
        else:
            split, sub, sub_layout = prepare_linkpred(cfg, layout)
            if retrain:
                for backend in dict.fromkeys(b for b, _ in combos):
                    run_chain(sub, backend, [s for b, s in combos if b == backend], sub_layout)
            rows = _linkpred_rows(cfg, split, sub, _model_list(sub, sub_layout, combos))
        out[task] = rows
    return out


def write_task_reports(rows_by_task: dict, layout: Layout, prefix: str = "") -> list[Path]:
    paths = []
    for task, rows in rows_by_task.items():
        csv_path = layout.reports / f"{prefix}{task}.csv"
        report.write_report(rows, csv_path)
        summary = (report.classification_summary(rows) if task == "classification"
                   else report.linkpred_summary(rows))
        (layout.reports / f"{prefix}{task}.txt").write_text(summary)
        paths.append(csv_path)
    return paths


def run_bench(cfg: RunConfig) -> list[Path]:
    """Every backend x strategy on every configured task, with summary tables."""
    layout = Layout(cfg.out)
    combos = [(b, s) for b in cfg["bench.backends"] for s in cfg["bench.strategies"]]
    if "classification" in cfg["eval.task"]:
        for backend in cfg["bench.backends"]:
            run_chain(cfg, backend, cfg["bench.strategies"], layout)
    rows = run_eval(cfg, combos, layout)
    return write_task_reports(rows, layout, prefix="bench-")
