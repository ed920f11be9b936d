"""Downstream tasks: multi-label node classification and link prediction."""

from .classification import ClassificationReport, classify_eval, f1_scores, top_r_predictions
from .linkpred import (
    OPERATORS,
    EdgeSplit,
    LinkPredictionReport,
    auc_score,
    edge_features,
    edge_split,
    linkpred_eval,
)
from .logreg import OvrLogReg, logreg_ovr_fit

__all__ = [
    "ClassificationReport", "classify_eval", "f1_scores", "top_r_predictions", "OPERATORS",
    "EdgeSplit", "LinkPredictionReport", "auc_score", "edge_features", "edge_split",
    "linkpred_eval", "OvrLogReg", "logreg_ovr_fit",
]
