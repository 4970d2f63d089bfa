"""Semantic and structural similarity metrics for causal graphs."""

from .embeddings import (
    CachedProvider,
    DeterministicProvider,
    EmbeddingProvider,
    FileProvider,
    HttpProvider,
    provider_from_spec,
    read_store,
    write_store,
)
from .errors import CgsimError
from .fixtures import reference_graph
from .graph import (
    CausalGraph,
    EdgeRecord,
    NodeRecord,
    Polarity,
    canonical_name,
    parse_cld_text,
    parse_json,
    to_json,
    validation_warnings,
)
from .kernels import (
    KERNEL_IDS,
    KernelConfig,
    KernelScores,
    gram_matrix,
    kernel_scores,
    normalize_kernel,
    pyramid_match_kernel,
    shortest_path_kernel,
    subgraph_matching_kernel,
    wl_edge_histogram,
    wl_vertex_histogram,
)
from .pipeline import (
    ALL_METRICS,
    BatchResult,
    ComparisonReport,
    DistributionSummary,
    PerturbationPlan,
    batch,
    compare,
    load_graph_file,
    perturb_corpus,
    perturb_graph,
    summarize,
)
from .semantic import (
    SEMANTIC_METRICS,
    STRATEGIES,
    PairwiseMatrix,
    SemanticScores,
    aggregate,
    pairwise_matrix,
    semantic_scores,
)
from .stats import (
    GraphStats,
    average_connectivity,
    count_cycles,
    density,
    stats,
    transitivity,
)
from .textmetrics import bleu, cosine, fuzzy_ratio, levenshtein, neg_euclidean

__version__ = "0.1.0"

__all__ = [
    "ALL_METRICS",
    "BatchResult",
    "CachedProvider",
    "CausalGraph",
    "CgsimError",
    "ComparisonReport",
    "DeterministicProvider",
    "DistributionSummary",
    "EdgeRecord",
    "EmbeddingProvider",
    "FileProvider",
    "GraphStats",
    "HttpProvider",
    "KERNEL_IDS",
    "KernelConfig",
    "KernelScores",
    "NodeRecord",
    "PairwiseMatrix",
    "PerturbationPlan",
    "Polarity",
    "SEMANTIC_METRICS",
    "STRATEGIES",
    "SemanticScores",
    "aggregate",
    "average_connectivity",
    "batch",
    "bleu",
    "canonical_name",
    "compare",
    "cosine",
    "count_cycles",
    "density",
    "fuzzy_ratio",
    "gram_matrix",
    "kernel_scores",
    "levenshtein",
    "load_graph_file",
    "neg_euclidean",
    "normalize_kernel",
    "pairwise_matrix",
    "parse_cld_text",
    "parse_json",
    "perturb_corpus",
    "perturb_graph",
    "provider_from_spec",
    "pyramid_match_kernel",
    "read_store",
    "reference_graph",
    "semantic_scores",
    "shortest_path_kernel",
    "stats",
    "subgraph_matching_kernel",
    "summarize",
    "to_json",
    "transitivity",
    "validation_warnings",
    "wl_edge_histogram",
    "wl_vertex_histogram",
    "write_store",
]
