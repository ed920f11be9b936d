"""Long-format report CSV and plain-text summary tables."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

COLUMNS = ("task", "dataset", "model", "strategy", "ratio_or_operator", "trial", "metric", "value")


def baseline_name(walk_strategy: str) -> str:
    return "deepwalk-emb" if walk_strategy == "uniform" else "node2vec-emb"


def tne_name(backend: str) -> str:
    return f"tne-{backend}"


def write_report(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([r["task"], r["dataset"], r["model"], r["strategy"],
                        _fmt(r["ratio_or_operator"]), int(r["trial"]), r["metric"],
                        repr(float(r["value"]))])


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else str(x)


def read_report(path: Path) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        rows = []
        for r in reader:
            roo = r["ratio_or_operator"]
            try:
                roo = float(roo)
            except ValueError:
                pass
            rows.append({**r, "ratio_or_operator": roo, "trial": int(r["trial"]),
                         "value": float(r["value"])})
    return rows


def gain_percent(score: float, baseline: float) -> float:
    return 100.0 * (score - baseline) / baseline


def mean_value(rows, model, strategy, key, metric) -> float:
    vals = [r["value"] for r in rows
            if r["model"] == model and r["strategy"] == strategy
            and r["ratio_or_operator"] == key and r["metric"] == metric]
    if not vals:
        raise KeyError((model, strategy, key, metric))
    return float(np.mean(vals))


def format_table(headers: list[str], body: list[list[str]]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *body)]
    line = lambda cells: "  ".join(str(c).ljust(w) for c, w in zip(cells, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out.extend(line(r) for r in body)
    return "\n".join(out) + "\n"


def _models(rows):
    seen = []
    for r in rows:
        key = (r["model"], r["strategy"])
        if key not in seen:
            seen.append(key)
    return seen


def classification_summary(rows: list[dict], ratio: float = 0.5) -> str:
    """Mean Micro/Macro-F1 per model at one training ratio, gain on Macro-F1 vs the baseline."""
    rows = [r for r in rows if r["task"] == "classification"]
    ratios = sorted({r["ratio_or_operator"] for r in rows})
    if ratio not in ratios:
        ratio = min(ratios, key=lambda x: abs(x - ratio))
    models = _models(rows)
    base_model, base_strategy = models[0]
    base = mean_value(rows, base_model, base_strategy, ratio, "macro_f1")
    body = []
    for model, strategy in models:
        macro = mean_value(rows, model, strategy, ratio, "macro_f1")
        micro = mean_value(rows, model, strategy, ratio, "micro_f1")
        body.append([model, strategy, f"{micro:.4f}", f"{macro:.4f}",
                     f"{gain_percent(macro, base):+.2f}"])
    dataset = rows[0]["dataset"]
    title = f"{dataset}: node classification at {ratio:.0%} training\n"
    return title + format_table(["model", "strategy", "Micro-F1", "Macro-F1", "Gain/Loss (%)"], body)


def linkpred_summary(rows: list[dict]) -> str:
    """AUC per model and operator, each followed by its gain vs the baseline."""
    rows = [r for r in rows if r["task"] == "linkpred"]
    ops = []
    for r in rows:
        if r["ratio_or_operator"] not in ops:
            ops.append(r["ratio_or_operator"])
    models = _models(rows)
    base_model, base_strategy = models[0]
    body = []
    for model, strategy in models:
        cells = [model, strategy]
        for op in ops:
            auc = mean_value(rows, model, strategy, op, "auc")
            base = mean_value(rows, base_model, base_strategy, op, "auc")
            cells.append(f"{auc:.4f} ({gain_percent(auc, base):+.2f}%)")
        body.append(cells)
    title = f"{rows[0]['dataset']}: link prediction AUC\n"
    return title + format_table(["model", "strategy", *ops], body)
