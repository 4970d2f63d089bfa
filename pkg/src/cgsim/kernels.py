"""Structural similarity kernels over causal graphs.

Five kernels, each normalized into [0, 1] via k(x,y)/sqrt(k(x,x)*k(y,y)):

    g1  pyramid match over eigenvector embeddings of the vertices
    g2  shortest-path pairs with matching endpoint names and distances
    g3  weighted clique count in the name-matched product graph
    g4  iterative vertex relabeling histograms (names, no edge labels)
    g5  iterative edge-triple histograms (polarities, no names)

All kernels treat graphs as directed. Any kernel involving an empty graph is
0 by convention; g2 and g5 are also 0 for edgeless graphs, whose shortest-path
and edge feature sets are empty.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InternalKernelError, ResourceLimitError
from .graph import CausalGraph

KERNEL_IDS = ("g1", "g2", "g3", "g4", "g5")

_INF = float("inf")
_SIGN_EPS = 1e-12


@dataclass(frozen=True)
class KernelConfig:
    """Hyperparameters shared by the kernels.

    Defaults are fixed, reasonable desk-scale choices; every comparison
    report echoes them so runs stay comparable.
    """

    wl_iterations: int = 3
    pyramid_dims: int = 6
    pyramid_levels: int = 4
    subgraph_max_size: int = 3
    subgraph_weights: tuple[float, ...] | None = None  # weight per clique size
    use_polarity_in_g2_g3: bool = False
    product_size_cap: int = 10_000

    def __post_init__(self):
        if self.wl_iterations < 0:
            raise ValueError("wl_iterations must be >= 0")
        if self.pyramid_dims < 1 or self.pyramid_levels < 1:
            raise ValueError("pyramid_dims and pyramid_levels must be >= 1")
        if self.subgraph_max_size < 1:
            raise ValueError("subgraph_max_size must be >= 1")
        if self.product_size_cap < 1:
            raise ValueError("product_size_cap must be >= 1")
        if self.subgraph_weights is not None:
            object.__setattr__(self, "subgraph_weights", tuple(self.subgraph_weights))
            if len(self.subgraph_weights) < self.subgraph_max_size:
                raise ValueError("need one subgraph weight per size 1..k")

    def clique_weight(self, size: int) -> float:
        if self.subgraph_weights is None:
            return 1.0
        return self.subgraph_weights[size - 1]

    def to_dict(self) -> dict:
        return {
            "wl_iterations": self.wl_iterations,
            "pyramid_dims": self.pyramid_dims,
            "pyramid_levels": self.pyramid_levels,
            "subgraph_max_size": self.subgraph_max_size,
            "subgraph_weights": (
                None if self.subgraph_weights is None else list(self.subgraph_weights)
            ),
            "use_polarity_in_g2_g3": self.use_polarity_in_g2_g3,
            "product_size_cap": self.product_size_cap,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "KernelConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown kernel config keys: {sorted(unknown)}")
        if doc.get("subgraph_weights") is not None:
            doc = dict(doc, subgraph_weights=tuple(doc["subgraph_weights"]))
        return cls(**doc)


@dataclass(frozen=True)
class KernelScores:
    g1: float | None
    g2: float | None
    g3: float | None
    g4: float | None
    g5: float | None

    def to_dict(self) -> dict:
        return {"g1": self.g1, "g2": self.g2, "g3": self.g3, "g4": self.g4,
                "g5": self.g5}


def normalize_kernel(kxy: float, kxx: float, kyy: float) -> float:
    """Map a raw kernel value into [0, 1]; 0 whenever a self-kernel is 0."""
    if kxx < 0 or kyy < 0:
        raise InternalKernelError(
            f"negative self-kernel ({kxx}, {kyy}): kernel implementation bug"
        )
    if kxx == 0 or kyy == 0:
        return 0.0
    return min(1.0, max(0.0, kxy / math.sqrt(kxx * kyy)))


def _hist_dot(a: Counter, b: Counter) -> float:
    if len(b) < len(a):
        a, b = b, a
    return float(sum(count * b[key] for key, count in a.items()))


# --- g4 / g5: iterative relabeling ---------------------------------------------

def _wl_label_rounds(
    graphs: Sequence[CausalGraph], iterations: int, use_names: bool
) -> list[list[dict[str, object]]]:
    """Per graph, the node label assignment at each iteration 0..h.

    New labels compress (own label, sorted multiset of (direction, neighbor
    label)) injectively through a table shared by all graphs in `graphs`, so
    their histograms live in one label space.
    """
    current: list[dict[str, object]] = []
    for g in graphs:
        if use_names:
            current.append({node.id: node.name for node in g.nodes})
        else:
            current.append({node.id: "" for node in g.nodes})
    rounds = [current]
    for _ in range(iterations):
        table: dict[object, int] = {}
        step: list[dict[str, object]] = []
        for g, labels in zip(graphs, current):
            relabeled: dict[str, object] = {}
            for node in g.nodes:
                signature = (
                    labels[node.id],
                    tuple(sorted(
                        [("o", labels[w]) for w in g.successors[node.id]]
                        + [("i", labels[w]) for w in g.predecessors[node.id]]
                    )),
                )
                if signature not in table:
                    table[signature] = len(table)
                relabeled[node.id] = table[signature]
            step.append(relabeled)
        current = step
        rounds.append(current)
    return [[iteration[gi] for iteration in rounds] for gi in range(len(graphs))]


def wl_vertex_histogram(g1: CausalGraph, g2: CausalGraph,
                        cfg: KernelConfig | None = None) -> float:
    """Relabeling kernel over vertex labels; edge polarities are invisible."""
    cfg = cfg or KernelConfig()
    if g1.is_empty or g2.is_empty:
        return 0.0
    rounds1, rounds2 = _wl_label_rounds([g1, g2], cfg.wl_iterations, use_names=True)
    hists1 = [Counter(labels.values()) for labels in rounds1]
    hists2 = [Counter(labels.values()) for labels in rounds2]
    kxy = sum(_hist_dot(a, b) for a, b in zip(hists1, hists2))
    kxx = sum(_hist_dot(a, a) for a in hists1)
    kyy = sum(_hist_dot(b, b) for b in hists2)
    return normalize_kernel(kxy, kxx, kyy)


def _edge_triples(graph: CausalGraph, labels: dict[str, object]) -> Counter:
    return Counter(
        (labels[e.src], labels[e.dst], e.polarity.value) for e in graph.edges
    )


def wl_edge_histogram(g1: CausalGraph, g2: CausalGraph,
                      cfg: KernelConfig | None = None) -> float:
    """Relabeling kernel over (src label, dst label, polarity) edge triples.

    Initial vertex labels are one shared constant, so variable names never
    enter: only structure and polarities are compared.
    """
    cfg = cfg or KernelConfig()
    if g1.is_empty or g2.is_empty:
        return 0.0
    rounds1, rounds2 = _wl_label_rounds([g1, g2], cfg.wl_iterations, use_names=False)
    hists1 = [_edge_triples(g1, labels) for labels in rounds1]
    hists2 = [_edge_triples(g2, labels) for labels in rounds2]
    kxy = sum(_hist_dot(a, b) for a, b in zip(hists1, hists2))
    kxx = sum(_hist_dot(a, a) for a in hists1)
    kyy = sum(_hist_dot(b, b) for b in hists2)
    return normalize_kernel(kxy, kxx, kyy)


# --- g2: shortest paths ---------------------------------------------------------

def _floyd_warshall(graph: CausalGraph) -> dict[str, dict[str, float]]:
    ids = [node.id for node in graph.nodes]
    dist = {u: {v: (0.0 if u == v else _INF) for v in ids} for u in ids}
    for e in graph.edges:
        dist[e.src][e.dst] = 1.0
    for k in ids:
        row_k = dist[k]
        for i in ids:
            d_ik = dist[i][k]
            if d_ik == _INF:
                continue
            row_i = dist[i]
            for j in ids:
                alt = d_ik + row_k[j]
                if alt < row_i[j]:
                    row_i[j] = alt
    return dist


def _first_edge_polarity(graph: CausalGraph, dist, u: str, v: str) -> str:
    """Polarity of the first edge of the canonical shortest u->v path.

    Ties between shortest paths are broken toward the lexicographically
    smallest intermediate node-id sequence, so only the smallest valid next
    hop matters here.
    """
    d = dist[u][v]
    if d == 1:
        return graph.polarity_of[(u, v)].value
    nxt = min(
        w for w in graph.successors[u] if 1.0 + dist[w][v] == d
    )
    return graph.polarity_of[(u, nxt)].value


def _shortest_path_features(graph: CausalGraph, with_polarity: bool) -> Counter:
    dist = _floyd_warshall(graph)
    feats: Counter = Counter()
    for u in dist:
        for v, d in dist[u].items():
            if u == v or d == _INF:
                continue
            if with_polarity:
                key = (graph.name_of[u], graph.name_of[v], d,
                       _first_edge_polarity(graph, dist, u, v))
            else:
                key = (graph.name_of[u], graph.name_of[v], d)
            feats[key] += 1
    return feats


def shortest_path_kernel(g1: CausalGraph, g2: CausalGraph,
                         cfg: KernelConfig | None = None) -> float:
    """Counts pairs of equal-length directed shortest paths whose endpoints
    carry the same names."""
    cfg = cfg or KernelConfig()
    if g1.is_empty or g2.is_empty:
        return 0.0
    f1 = _shortest_path_features(g1, cfg.use_polarity_in_g2_g3)
    f2 = _shortest_path_features(g2, cfg.use_polarity_in_g2_g3)
    return normalize_kernel(_hist_dot(f1, f2), _hist_dot(f1, f1), _hist_dot(f2, f2))


# --- g3: subgraph matching ------------------------------------------------------

def _product_neighbors(g1: CausalGraph, g2: CausalGraph,
                       cfg: KernelConfig) -> list[set[int]]:
    vertices = [
        (a.id, b.id) for a in g1.nodes for b in g2.nodes if a.name == b.name
    ]
    if len(vertices) > cfg.product_size_cap:
        raise ResourceLimitError(
            f"product graph has {len(vertices)} vertices "
            f"(cap {cfg.product_size_cap})"
        )
    e1, e2 = g1.polarity_of, g2.polarity_of
    check_polarity = cfg.use_polarity_in_g2_g3

    def compatible(p: tuple[str, str], q: tuple[str, str]) -> bool:
        (u, u2), (v, v2) = p, q
        if u == v or u2 == v2:
            return False
        for a, b in (((u, v), (u2, v2)), ((v, u), (v2, u2))):
            pol1, pol2 = e1.get(a), e2.get(b)
            if (pol1 is None) != (pol2 is None):
                return False
            if check_polarity and pol1 is not None and pol1 != pol2:
                return False
        return True

    neighbors: list[set[int]] = [set() for _ in vertices]
    for i in range(len(vertices)):
        for j in range(i + 1, len(vertices)):
            if compatible(vertices[i], vertices[j]):
                neighbors[i].add(j)
                neighbors[j].add(i)
    return neighbors


def _weighted_clique_count(neighbors: list[set[int]], max_size: int,
                           weight) -> float:
    total = 0.0

    def grow(candidates: set[int], size: int) -> None:
        nonlocal total
        for w in sorted(candidates):
            total += weight(size + 1)
            if size + 1 < max_size:
                grow({x for x in candidates & neighbors[w] if x > w}, size + 1)

    for v in range(len(neighbors)):
        total += weight(1)
        if max_size >= 2:
            grow({x for x in neighbors[v] if x > v}, 1)
    return total


def _smk_raw(g1: CausalGraph, g2: CausalGraph, cfg: KernelConfig) -> float:
    neighbors = _product_neighbors(g1, g2, cfg)
    return _weighted_clique_count(neighbors, cfg.subgraph_max_size,
                                  cfg.clique_weight)


def subgraph_matching_kernel(g1: CausalGraph, g2: CausalGraph,
                             cfg: KernelConfig | None = None) -> float:
    """Weighted count of common induced sub-structures of size <= k, found as
    cliques of the name-matched product graph."""
    cfg = cfg or KernelConfig()
    if cfg.subgraph_max_size > 4:
        raise ValueError("subgraph_max_size above 4 is not supported (enumeration guard)")
    if g1.is_empty or g2.is_empty:
        return 0.0
    return normalize_kernel(
        _smk_raw(g1, g2, cfg), _smk_raw(g1, g1, cfg), _smk_raw(g2, g2, cfg)
    )


# --- g1: pyramid match ----------------------------------------------------------

def vertex_embedding(graph: CausalGraph, dims: int) -> np.ndarray:
    """Embed vertices into [0, 1]^dims from the undirected adjacency spectrum.

    Coordinates are absolute components of the eigenvectors with the largest
    eigenvalue magnitudes. Eigenpairs are ordered by (-|eigenvalue|, then the
    eigenvector itself, lexicographically, after flipping its first nonzero
    component positive); missing dimensions (n < dims) stay zero.
    """
    n = graph.n
    points = np.zeros((n, dims))
    if n == 0:
        return points
    index = {node.id: i for i, node in enumerate(graph.nodes)}
    adjacency = np.zeros((n, n))
    for e in graph.edges:
        i, j = index[e.src], index[e.dst]
        adjacency[i, j] = 1.0
        adjacency[j, i] = 1.0
    eigenvalues, eigenvectors = np.linalg.eigh(adjacency)
    keyed = []
    for i in range(n):
        column = eigenvectors[:, i].copy()
        nonzero = np.nonzero(np.abs(column) > _SIGN_EPS)[0]
        if nonzero.size and column[nonzero[0]] < 0:
            column = -column
        keyed.append((-abs(eigenvalues[i]), tuple(column), column))
    keyed.sort(key=lambda item: (item[0], item[1]))
    for slot in range(min(dims, n)):
        points[:, slot] = np.abs(keyed[slot][2])
    return points


def _name_groups(graph: CausalGraph, points: np.ndarray) -> dict[str, list]:
    groups: dict[str, list] = {}
    for i, node in enumerate(graph.nodes):
        groups.setdefault(node.name, []).append(points[i])
    return groups


def _level_histogram(points: list, level: int) -> Counter:
    cells = 1 << level
    hist: Counter = Counter()
    for point in points:
        hist[tuple(
            min(int(x * cells), cells - 1) for x in point
        )] += 1
    return hist


def _pm_raw(groups1: dict, groups2: dict, levels: int) -> float:
    shared = set(groups1) & set(groups2)
    if not shared:
        return 0.0
    intersections = []
    for level in range(levels):
        total = 0
        for name in shared:
            h1 = _level_histogram(groups1[name], level)
            h2 = _level_histogram(groups2[name], level)
            total += sum(min(count, h2[cell]) for cell, count in h1.items())
        intersections.append(total)
    raw = float(intersections[-1])
    for level in range(levels - 1):
        raw += (intersections[level] - intersections[level + 1]) / (
            1 << (levels - 1 - level)
        )
    return raw


def pyramid_match_kernel(g1: CausalGraph, g2: CausalGraph,
                         cfg: KernelConfig | None = None) -> float:
    """Multi-resolution histogram matching of vertex embeddings, intersected
    name against same name only."""
    cfg = cfg or KernelConfig()
    if g1.is_empty or g2.is_empty:
        return 0.0
    groups1 = _name_groups(g1, vertex_embedding(g1, cfg.pyramid_dims))
    groups2 = _name_groups(g2, vertex_embedding(g2, cfg.pyramid_dims))
    return normalize_kernel(
        _pm_raw(groups1, groups2, cfg.pyramid_levels),
        _pm_raw(groups1, groups1, cfg.pyramid_levels),
        _pm_raw(groups2, groups2, cfg.pyramid_levels),
    )


# --- bundles --------------------------------------------------------------------

KERNEL_FUNCTIONS = {
    "g1": pyramid_match_kernel,
    "g2": shortest_path_kernel,
    "g3": subgraph_matching_kernel,
    "g4": wl_vertex_histogram,
    "g5": wl_edge_histogram,
}


def kernel_scores(g1: CausalGraph, g2: CausalGraph,
                  cfg: KernelConfig | None = None,
                  kernels: Sequence[str] = KERNEL_IDS) -> KernelScores:
    """All requested kernels under one shared configuration."""
    cfg = cfg or KernelConfig()
    values: dict[str, float | None] = {k: None for k in KERNEL_IDS}
    for kernel_id in kernels:
        try:
            fn = KERNEL_FUNCTIONS[kernel_id]
        except KeyError:
            raise ValueError(f"unknown kernel {kernel_id!r}") from None
        values[kernel_id] = fn(g1, g2, cfg)
    return KernelScores(**values)


def gram_matrix(graphs: Sequence[CausalGraph], kernel_id: str,
                cfg: KernelConfig | None = None) -> np.ndarray:
    """Symmetric matrix of normalized pairwise kernel values."""
    if not graphs:
        raise ValueError("gram_matrix needs at least one graph")
    fn = KERNEL_FUNCTIONS.get(kernel_id)
    if fn is None:
        raise ValueError(f"unknown kernel {kernel_id!r}")
    cfg = cfg or KernelConfig()
    size = len(graphs)
    gram = np.zeros((size, size))
    for i in range(size):
        for j in range(i, size):
            value = fn(graphs[i], graphs[j], cfg)
            gram[i, j] = value
            gram[j, i] = value
    return gram
