"""Topical node embeddings: random-walk corpora, topic backends, SGNS, fusion and evaluation."""

from .embedding import (
    EmbeddingSet,
    PairStream,
    generate_node_context_pairs,
    sgns_train,
    train_tne,
    update_node_context_pairs,
)
from .fusion import TopicalEmbedding, fuse, fuse_max, fuse_min, fuse_wmean
from .graph import Graph, GraphFormatError, LabelSet, load_edge_list, load_labels
from .walks import WalkCorpus, generate_walks

__version__ = "0.1.0"

__all__ = [
    "EmbeddingSet", "PairStream", "generate_node_context_pairs", "sgns_train", "train_tne",
    "update_node_context_pairs", "TopicalEmbedding", "fuse", "fuse_max", "fuse_min", "fuse_wmean",
    "Graph", "GraphFormatError", "LabelSet", "load_edge_list", "load_labels", "WalkCorpus",
    "generate_walks",
]
