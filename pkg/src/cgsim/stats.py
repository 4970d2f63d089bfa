"""Graph-level statistics: density, transitivity, connectivity, cycle count.

Density uses the directed formula m/(n*(n-1)). Transitivity and average
connectivity are defined on the undirected projection (edge direction
collapsed, duplicates dropped), which matches the triangle/triad and local
node connectivity definitions they are built on.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .errors import ResourceLimitError, UndefinedStatisticError
from .graph import CausalGraph

DEFAULT_CYCLE_CAP = 10_000


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    cycles: int
    density: float
    transitivity: float
    avg_connectivity: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "cycles": self.cycles,
            "density": self.density,
            "transitivity": self.transitivity,
            "avg_connectivity": self.avg_connectivity,
        }


def as_digraph(graph: CausalGraph) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(node.id for node in graph.nodes)
    g.add_edges_from((e.src, e.dst) for e in graph.edges)
    return g


def as_undirected(graph: CausalGraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(node.id for node in graph.nodes)
    g.add_edges_from(tuple(pair) for pair in graph.undirected_pairs())
    return g


def density(graph: CausalGraph) -> float:
    """m / (n*(n-1)); defined 0 when n < 2."""
    n = graph.n
    if n < 2:
        return 0.0
    return graph.m / (n * (n - 1))


def transitivity(graph: CausalGraph) -> float:
    """3*triangles / triads on the undirected projection; 0 when no triads."""
    if graph.n == 0:
        return 0.0
    return float(nx.transitivity(as_undirected(graph)))


def average_connectivity(graph: CausalGraph) -> float:
    """Mean local node connectivity over all unordered pairs (undirected)."""
    if graph.n < 2:
        raise UndefinedStatisticError(
            f"average connectivity needs at least 2 nodes, got {graph.n}"
        )
    return float(nx.average_node_connectivity(as_undirected(graph)))


def count_cycles(graph: CausalGraph, cap: int = DEFAULT_CYCLE_CAP) -> int:
    """Number of simple directed cycles, aborting past `cap`.

    Intended for desk-scale graphs; cycle counts in typical causal loop
    diagrams are small integers.
    """
    count = 0
    for _ in nx.simple_cycles(as_digraph(graph)):
        count += 1
        if count > cap:
            raise ResourceLimitError(f"more than {cap} simple cycles; raise the cap")
    return count


def stats(graph: CausalGraph, cycle_cap: int = DEFAULT_CYCLE_CAP) -> GraphStats:
    """Bundle of all graph-level statistics.

    avg_connectivity is reported as 0 for graphs with fewer than 2 nodes,
    where the pairwise mean has no terms.
    """
    avg_conn = 0.0 if graph.n < 2 else average_connectivity(graph)
    return GraphStats(
        n=graph.n,
        m=graph.m,
        cycles=count_cycles(graph, cycle_cap),
        density=density(graph),
        transitivity=transitivity(graph),
        avg_connectivity=avg_conn,
    )
