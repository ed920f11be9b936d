"""Acceptance criteria, each at its stated tolerance and time budget.

Criteria 5, 6 and 8 need the Citeseer and Facebook graphs. They are looked
up under ``$TNE_DATA_DIR`` (default ``<repo>/data``) as written by
``scripts/fetch_datasets.py``; when absent the criterion fails and says so.
"""

import os
import time
from pathlib import Path

import numpy as np

from tne.embedding import sgns_pair_grad, sgns_pair_loss
from tne.fusion import fuse_max, fuse_min, fuse_wmean
from tne.pipeline import parse_config
from tne.pipeline import stages
from tne.pipeline.report import read_report
from tne.topics import HmmParams, bigclam_fit, hmm_joint_logprob, lda_fit, lda_joint_logprob, node_topic_argmax
from tne.topics.louvain import louvain_levels
from tne.walks import WalkCorpus, generate_walks

from conftest import ACCEPTANCE

DATA_DIR = Path(os.environ.get("TNE_DATA_DIR", Path(__file__).resolve().parents[1] / "data"))


def report(n: int, ok: bool, detail: str, seconds: float):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s) {detail}"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def dataset(name: str, labels: bool):
    edges = DATA_DIR / name / f"{name}.edgelist"
    lab = DATA_DIR / name / f"{name}.labels"
    missing = [p for p in ([edges, lab] if labels else [edges]) if not p.exists()]
    return (edges, lab if labels else None), missing


def require(n: int, name: str, labels: bool):
    paths, missing = dataset(name, labels)
    if missing:
        report(n, False, f"{name} not found ({', '.join(map(str, missing))}); "
               "run scripts/fetch_datasets.py or set TNE_DATA_DIR", 0.0)
    return paths


def test_criterion_1_hmm_reduces_to_lda():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        K, V, L = int(rng.integers(1, 5)), int(rng.integers(1, 7)), int(rng.integers(1, 9))
        theta = rng.dirichlet(np.ones(K))
        phi = rng.dirichlet(np.ones(V), size=K)
        w, z = rng.integers(0, V, size=L), rng.integers(0, K, size=L)
        hmm = hmm_joint_logprob(w, z, HmmParams(theta, np.tile(theta, (K, 1)), phi))
        worst = max(worst, abs(hmm - lda_joint_logprob(w, z, phi, theta)))
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-12 and dt < 5, f"max |diff| = {worst:.2e} over 1000 instances", dt)


def test_criterion_2_sgns_gradient():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    h = 1e-6
    worst = 0.0
    for _ in range(100):
        d, k = int(rng.integers(1, 9)), int(rng.integers(1, 6))
        x, yp, yn = rng.normal(size=d), rng.normal(size=d), rng.normal(size=(k, d))
        analytic = np.concatenate([g.ravel() for g in sgns_pair_grad(x, yp, yn)])
        params = [x, yp, yn.reshape(-1)]
        numeric = []
        for vec in params:
            for i in range(vec.shape[0]):
                old = vec[i]
                vec[i] = old + h
                up = sgns_pair_loss(x, yp, yn)
                vec[i] = old - h
                down = sgns_pair_loss(x, yp, yn)
                vec[i] = old
                numeric.append((up - down) / (2 * h))
        numeric = np.array(numeric)
        rel = np.linalg.norm(numeric - analytic) / max(np.linalg.norm(analytic), 1e-300)
        worst = max(worst, rel)
    dt = time.perf_counter() - t0
    report(2, worst <= 1e-6 and dt < 10, f"max relative error = {worst:.2e} over 100 instances", dt)


def test_criterion_3_sampler_invariants(karate):
    g, _ = karate
    t0 = time.perf_counter()
    corpus = WalkCorpus.from_walks(list(generate_walks(g, 6, 10, seed=0))[:200], g.node_count)
    lens, occ = corpus.lengths, np.bincount(corpus.tokens, minlength=g.node_count)
    bad = []

    def check(sweep, n_dk, n_vk, n_k):
        ok = (n_dk.min() >= 0 and n_vk.min() >= 0
              and np.array_equal(n_dk.sum(axis=1), lens) and np.array_equal(n_vk.sum(axis=1), occ)
              and np.array_equal(n_vk.sum(axis=0), n_k) and np.array_equal(n_dk.sum(axis=0), n_k))
        if not ok:
            bad.append(sweep)

    lda_fit(corpus, 4, iterations=200, burn_in=50, seed=0, on_sweep=check)
    louvain_ok = True
    for seed in range(10):
        _, scores = louvain_levels(g, seed=seed)
        louvain_ok &= all(b > a for a, b in zip(scores, scores[1:]))
    bigclam_ok = True
    for seed in range(5):
        _, post = bigclam_fit(g, 3, seed=seed)
        bigclam_ok &= bool(np.all(np.diff(post.sample_counts["objective"]) >= 0))
    dt = time.perf_counter() - t0
    ok = not bad and louvain_ok and bigclam_ok and dt < 60
    report(3, ok, f"LDA bad sweeps={bad[:3]}, Louvain increasing={louvain_ok}, "
           f"BigClam non-decreasing={bigclam_ok}", dt)


def test_criterion_4_karate_factions(karate):
    g, labels = karate
    t0 = time.perf_counter()
    truth = labels.indicator()[:, labels.label_names.index("officer")]
    agreements = []
    for seed in range(10):
        corpus = generate_walks(g, 80, 10, seed=seed)
        _, post = lda_fit(corpus, 2, seed=seed)
        pred = node_topic_argmax(post.phi)
        agreements.append(max(np.mean(pred == truth), np.mean(pred != truth)))
    dt = time.perf_counter() - t0
    good = sum(a >= 0.8 for a in agreements)
    report(4, good >= 8 and dt < 120,
           f"{good}/10 seeds >= 80% agreement (min {min(agreements):.3f})", dt)


def _config(edges, labels, extra: str, out: Path):
    text = f"dataset.edges = {edges}\n"
    if labels:
        text += f"dataset.labels = {labels}\n"
    return parse_config(text + extra + f"run.out = {out}\nrun.threads = 1\n")


def test_criterion_5_citeseer_classification(tmp_path):
    edges, labels = require(5, "citeseer", labels=True)
    t0 = time.perf_counter()
    cfg = _config(edges, labels, "dataset.name = citeseer\ntopics.backend = lda\n"
                  "eval.task = classification\neval.ratios = 0.5\neval.trials = 50\n", tmp_path)
    stages.run_chain(cfg, "lda", ["max"])
    rows = stages.run_eval(cfg, [("lda", "max")])["classification"]
    dt = time.perf_counter() - t0
    macro = {m: np.mean([r["value"] for r in rows if r["model"] == m and r["metric"] == "macro_f1"])
             for m in ("deepwalk-emb", "tne-lda")}
    ok = abs(macro["deepwalk-emb"] - 0.554) <= 0.03 and macro["tne-lda"] >= macro["deepwalk-emb"] \
        and dt < 30 * 60
    report(5, ok, f"deepwalk-emb Macro-F1 {macro['deepwalk-emb']:.4f} (target 0.554 +- 0.03), "
           f"tne-lda(max) {macro['tne-lda']:.4f}", dt)


def test_criterion_6_facebook_linkpred(tmp_path):
    edges, _ = require(6, "facebook", labels=False)
    t0 = time.perf_counter()
    cfg = _config(edges, None, "dataset.name = facebook\neval.task = linkpred\n"
                  "eval.operators = hadamard\n", tmp_path)
    combos = [(b, "max") for b in ("lda", "louvain", "bigclam")]
    rows = stages.run_eval(cfg, combos)["linkpred"]
    dt = time.perf_counter() - t0
    auc = {r["model"]: r["value"] for r in rows if r["ratio_or_operator"] == "hadamard"}
    base = auc.pop("deepwalk-emb")
    best = max(auc, key=auc.get)
    ok = base >= 0.95 and auc[best] >= base and dt < 45 * 60
    report(6, ok, f"deepwalk-emb hadamard AUC {base:.4f}, best TNE {best} {auc[best]:.4f}", dt)


def test_criterion_8_pipeline_determinism(tmp_path):
    edges, labels = require(8, "citeseer", labels=True)
    t0 = time.perf_counter()
    extra = ("dataset.name = citeseer\neval.task = classification\neval.ratios = 0.5\n"
             "bench.backends = lda,louvain,bigclam\n")
    blobs = []
    for run in ("a", "b"):
        cfg = _config(edges, labels, extra, tmp_path / run)
        stages.run_walk(cfg)
        (csv,) = stages.run_bench(cfg)
        blobs.append(csv.read_bytes())
    dt = time.perf_counter() - t0
    same = blobs[0] == blobs[1]
    n_rows = len(read_report(tmp_path / "a/reports/bench-classification.csv"))
    report(8, same, f"report CSVs identical={same} ({n_rows} rows)", dt)


def test_criterion_7_fusion_contracts():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    ok = True
    for _ in range(100):
        K, V, d = int(rng.integers(1, 6)), int(rng.integers(1, 12)), int(rng.integers(1, 9))
        node, topic = rng.normal(size=(V, d)), rng.normal(size=(K, d))
        phi = rng.dirichlet(np.ones(V), size=K)
        for fn in (fuse_max, fuse_min, fuse_wmean):
            ok &= np.array_equal(fn(node, topic, phi).omega[:, :d], node)
        c = float(rng.uniform(0.01, 100))
        for fn in (fuse_max, fuse_min):
            ok &= np.array_equal(fn(node, topic, phi * c).omega, fn(node, topic, phi).omega)
        # dyadic inputs: every product and sum is exact, so linearity must be bitwise
        t1 = rng.integers(-8, 8, size=(K, d)).astype(float)
        t2 = rng.integers(-8, 8, size=(K, d)).astype(float)
        counts = rng.integers(0, 5, size=(K, V)).astype(float)
        col = counts.sum(axis=0)
        scale = 2.0 ** np.ceil(np.log2(np.maximum(col, 1.0)))
        counts[-1] += scale - col
        w = counts / scale
        lhs = fuse_wmean(node, 2.0 * t1 - 0.5 * t2, w).omega[:, d:]
        rhs = 2.0 * fuse_wmean(node, t1, w).omega[:, d:] - 0.5 * fuse_wmean(node, t2, w).omega[:, d:]
        ok &= np.array_equal(lhs, rhs)
    dt = time.perf_counter() - t0
    report(7, bool(ok) and dt < 1, "node half bitwise, WMean linearity, argmax/argmin scaling", dt)
