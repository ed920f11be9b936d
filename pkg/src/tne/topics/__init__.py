"""Topic/community backends: LDA and HMM over walks, Louvain and BigClam over the graph."""

from .base import (
    BACKENDS,
    WALK_BACKENDS,
    HmmParams,
    TopicAssignment,
    TopicPosterior,
    node_topic_argmax,
    posterior_p_v_given_k,
    read_assignment,
    read_posterior,
    write_assignment,
    write_posterior,
)
from .bigclam import bigclam_fit
from .hmm import forward_loglik, hmm_fit, hmm_joint_logprob
from .lda import lda_fit, lda_joint_logprob
from .louvain import louvain_fit, modularity

__all__ = [
    "BACKENDS", "WALK_BACKENDS", "HmmParams", "TopicAssignment", "TopicPosterior",
    "node_topic_argmax", "posterior_p_v_given_k", "read_assignment", "read_posterior",
    "write_assignment", "write_posterior", "bigclam_fit", "forward_loglik", "hmm_fit",
    "hmm_joint_logprob", "lda_fit", "lda_joint_logprob", "louvain_fit", "modularity",
]
