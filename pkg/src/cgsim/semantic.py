"""Graph-level semantic scores: lifting pairwise name similarity to graphs.

Four metrics are computed between a designated reference graph and a
comparison graph:

    m1  token n-gram overlap (directional: comparison names are candidates)
    m2  normalized character edit similarity
    m3  cosine similarity of phrase embeddings
    m4  negated euclidean distance of phrase embeddings

Each metric first fills a |ref| x |cmp| pairwise matrix over variable names,
then an aggregation strategy reduces it to one number. Duplicate names are
kept as duplicate rows/columns on purpose: they signal modeling issues the
score should reflect.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from scipy.optimize import linear_sum_assignment

from .embeddings import EmbeddingProvider
from .errors import EmptyGraphError, MissingProviderError
from .graph import CausalGraph
from .textmetrics import bleu, cosine, fuzzy_ratio, neg_euclidean, tokenize

SEMANTIC_METRICS = ("m1", "m2", "m3", "m4")
STRATEGIES = ("ref_best_match", "symmetric_best_match", "optimal_assignment_penalized")
DEFAULT_STRATEGY = "ref_best_match"

_VECTOR_METRICS = {"m3", "m4"}


@dataclass(frozen=True)
class PairwiseMatrix:
    metric_id: str
    ref_names: tuple[str, ...]
    cmp_names: tuple[str, ...]
    scores: tuple[tuple[float, ...], ...]  # shape |ref| x |cmp|


@dataclass(frozen=True)
class SemanticScores:
    m1: float | None
    m2: float | None
    m3: float | None
    m4: float | None
    strategy: str

    def to_dict(self) -> dict:
        return {"m1": self.m1, "m2": self.m2, "m3": self.m3, "m4": self.m4}


def _require_non_empty(ref: CausalGraph, cmp: CausalGraph) -> None:
    if ref.is_empty or cmp.is_empty:
        raise EmptyGraphError("semantic comparison requires non-empty graphs")


def _pair_score(metric_id: str, ref_name: str, cmp_name: str) -> float:
    if metric_id == "m1":
        # comparison text is the candidate, reference text the reference
        return bleu(tokenize(cmp_name), tokenize(ref_name))
    if metric_id == "m2":
        return fuzzy_ratio(ref_name, cmp_name)
    raise ValueError(f"unknown string metric {metric_id!r}")


def _matrix_from_vectors(
    metric_id: str,
    ref_names: Sequence[str],
    cmp_names: Sequence[str],
    ref_vectors: Sequence[Sequence[float]],
    cmp_vectors: Sequence[Sequence[float]],
) -> PairwiseMatrix:
    fn = cosine if metric_id == "m3" else neg_euclidean
    rows = tuple(
        tuple(fn(u, v) for v in cmp_vectors) for u in ref_vectors
    )
    return PairwiseMatrix(metric_id, tuple(ref_names), tuple(cmp_names), rows)


def pairwise_matrix(
    metric_id: str,
    ref: CausalGraph,
    cmp: CausalGraph,
    provider: EmbeddingProvider | None = None,
) -> PairwiseMatrix:
    """Entry (i, j) scores reference name i against comparison name j."""
    if metric_id not in SEMANTIC_METRICS:
        raise ValueError(f"unknown semantic metric {metric_id!r}")
    _require_non_empty(ref, cmp)
    if metric_id in _VECTOR_METRICS:
        if provider is None:
            raise MissingProviderError(f"{metric_id} requires an embedding provider")
        ref_vectors = provider.embed(ref.names)
        cmp_vectors = provider.embed(cmp.names)
        return _matrix_from_vectors(metric_id, ref.names, cmp.names,
                                    ref_vectors, cmp_vectors)
    if provider is not None:
        raise ValueError(f"{metric_id} does not take an embedding provider")
    rows = tuple(
        tuple(_pair_score(metric_id, rn, cn) for cn in cmp.names)
        for rn in ref.names
    )
    return PairwiseMatrix(metric_id, ref.names, cmp.names, rows)


def _best_match(rows: Sequence[Sequence[float]]) -> float:
    return sum(max(row) for row in rows) / len(rows)


def _transposed(rows: tuple[tuple[float, ...], ...]) -> tuple[tuple[float, ...], ...]:
    return tuple(zip(*rows))


def aggregate(matrix: PairwiseMatrix, strategy: str = DEFAULT_STRATEGY) -> float:
    """Reduce a pairwise matrix to one graph-level score.

    ref_best_match: mean over reference rows of the row maximum.
    symmetric_best_match: mean of the two directional best-match scores.
    optimal_assignment_penalized: maximum-weight one-to-one assignment total
    divided by max(|ref|, |cmp|); entities left unmatched by the size
    difference contribute the metric floor (0 for m1-m3, the matrix minimum
    for m4).
    """
    if not matrix.scores or not matrix.scores[0]:
        raise EmptyGraphError("cannot aggregate an empty matrix")
    if strategy == "ref_best_match":
        return _best_match(matrix.scores)
    if strategy == "symmetric_best_match":
        return 0.5 * (_best_match(matrix.scores) + _best_match(_transposed(matrix.scores)))
    if strategy == "optimal_assignment_penalized":
        n_ref, n_cmp = len(matrix.ref_names), len(matrix.cmp_names)
        rows, cols = linear_sum_assignment(matrix.scores, maximize=True)
        total = sum(matrix.scores[i][j] for i, j in zip(rows, cols))
        unmatched = max(n_ref, n_cmp) - min(n_ref, n_cmp)
        if unmatched:
            if matrix.metric_id == "m4":
                floor = min(min(row) for row in matrix.scores)
            else:
                floor = 0.0
            total += unmatched * floor
        return total / max(n_ref, n_cmp)
    raise ValueError(f"unknown aggregation strategy {strategy!r}")


def semantic_scores(
    ref: CausalGraph,
    cmp: CausalGraph,
    provider: EmbeddingProvider | None = None,
    strategy: str = DEFAULT_STRATEGY,
    metrics: Sequence[str] = SEMANTIC_METRICS,
) -> SemanticScores:
    """All requested semantic metrics, with one provider call per graph."""
    metrics = tuple(metrics)
    for metric_id in metrics:
        if metric_id not in SEMANTIC_METRICS:
            raise ValueError(f"unknown semantic metric {metric_id!r}")
    _require_non_empty(ref, cmp)
    values: dict[str, float | None] = {m: None for m in SEMANTIC_METRICS}

    if _VECTOR_METRICS & set(metrics):
        if provider is None:
            wanted = sorted(_VECTOR_METRICS & set(metrics))
            raise MissingProviderError(
                f"{', '.join(wanted)} require an embedding provider"
            )
        ref_vectors = provider.embed(ref.names)
        cmp_vectors = provider.embed(cmp.names)
        for metric_id in _VECTOR_METRICS & set(metrics):
            matrix = _matrix_from_vectors(metric_id, ref.names, cmp.names,
                                          ref_vectors, cmp_vectors)
            values[metric_id] = aggregate(matrix, strategy)
    for metric_id in ("m1", "m2"):
        if metric_id in metrics:
            values[metric_id] = aggregate(pairwise_matrix(metric_id, ref, cmp), strategy)
    return SemanticScores(values["m1"], values["m2"], values["m3"], values["m4"],
                          strategy=strategy)
