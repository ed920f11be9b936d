"""Multi-label node classification with repeated random splits."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .._rng import numpy_rng
from ..graph import LabelSet
from .logreg import logreg_ovr_fit


@dataclass
class ClassificationReport:
    rows: list = field(default_factory=list)  # dicts: ratio, trial, micro_f1, macro_f1

    def scores(self, ratio: float, metric: str) -> np.ndarray:
        return np.array([r[metric] for r in self.rows if r["ratio"] == ratio])

    def summary(self) -> dict:
        """``{ratio: {metric: (mean, std)}}``."""
        out = {}
        for ratio in sorted({r["ratio"] for r in self.rows}):
            out[ratio] = {m: (float(self.scores(ratio, m).mean()), float(self.scores(ratio, m).std()))
                          for m in ("micro_f1", "macro_f1")}
        return out


def top_r_predictions(scores: np.ndarray, Y_true: np.ndarray) -> np.ndarray:
    """Mark the ``r`` highest-scoring labels of each row, ``r`` = its true label count."""
    r = Y_true.sum(axis=1)
    order = np.argsort(-scores, axis=1, kind="stable")
    pred = np.zeros_like(Y_true)
    for i in range(scores.shape[0]):
        pred[i, order[i, :r[i]]] = 1
    return pred


def f1_scores(Y_true: np.ndarray, Y_pred: np.ndarray) -> tuple[float, float]:
    """Micro- and macro-F1 of 0/1 indicator matrices.

    Macro-F1 averages over labels that occur in the truth or the predictions;
    a label absent from both has no defined F1 and is left out.
    """
    Y_true = Y_true.astype(bool)
    Y_pred = Y_pred.astype(bool)
    tp = np.sum(Y_true & Y_pred, axis=0).astype(np.float64)
    fp = np.sum(~Y_true & Y_pred, axis=0).astype(np.float64)
    fn = np.sum(Y_true & ~Y_pred, axis=0).astype(np.float64)
    denom = 2 * tp.sum() + fp.sum() + fn.sum()
    micro = 2 * tp.sum() / denom if denom > 0 else 0.0
    per = 2 * tp + fp + fn
    seen = per > 0
    macro = float(np.mean(2 * tp[seen] / per[seen])) if seen.any() else 0.0
    return float(micro), macro


def _trial(X, Y, ratio, perm, l2):
    n_train = min(max(int(round(ratio * len(perm))), 1), len(perm) - 1)
    train, test = perm[:n_train], perm[n_train:]
    reg = (1.0 / n_train) if l2 == "auto" else float(l2)
    model = logreg_ovr_fit(X[train], Y[train], reg)
    pred = top_r_predictions(model.decision_function(X[test]), Y[test])
    return f1_scores(Y[test], pred)


def classify_eval(
    embedding: np.ndarray,
    labels: LabelSet,
    ratios=(0.5,),
    trials: int = 50,
    seed: int = 0,
    l2="auto",
    threads: int = 1,
) -> ClassificationReport:
    """Repeated-split evaluation of ``embedding`` rows on the labeled nodes.

    Trial ``t`` shuffles the labeled nodes with its own stream keyed on
    ``(seed, t)`` and trains on the first ``ratio`` fraction, so splits are
    nested across ratios. ``l2="auto"`` uses ``1 / n_train``, i.e. unit
    inverse-regularization on the summed loss.
    """
    for r in ratios:
        if not 0.0 < r < 1.0:
            raise ValueError(f"training ratio {r} outside (0, 1)")
    nodes = labels.nodes
    X = np.asarray(embedding, dtype=np.float64)[nodes]
    Y = labels.indicator(nodes)
    jobs = []
    for t in range(trials):
        perm = numpy_rng(seed, 20, t).permutation(len(nodes))
        for r in ratios:
            jobs.append((r, t, perm))

    def run(job):
        r, t, perm = job
        micro, macro = _trial(X, Y, r, perm, l2)
        return {"ratio": float(r), "trial": t, "micro_f1": micro, "macro_f1": macro}

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    rows.sort(key=lambda row: (row["ratio"], row["trial"]))
    return ClassificationReport(rows)
