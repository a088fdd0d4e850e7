"""Coordination detection from inter-event burstiness, plus a bursty-corrected
stochastic blockmodel generator for synthetic ground truth."""

from .errors import ContractError, FitError, IngestError, InsufficientDataError, ParameterError
from .events import (
    Event,
    EventLog,
    IntereventProfile,
    ProfileKey,
    build_profiles,
    ecdf_eval,
    ks_statistic,
    pairwise_ks,
)
from .simgraph import SimilarityGraph, build_similarity_graph
from .community import (
    Partition,
    WeightedGraph,
    ari,
    label_propagation,
    louvain,
    modularity,
    nmi,
)
from .bcsbm import BcsbmParams, TemporalGraphRun, intra_edge_fraction, simulate, simulate_multi_domain
from .heavytail import TailFit, LlrResult, classify_network, fit_alternative, fit_power_law, llr_test

__version__ = "0.1.0"
