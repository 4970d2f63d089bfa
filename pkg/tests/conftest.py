"""Shared generators and fixtures for the test suite."""

from __future__ import annotations

import random

import pytest

from cgsim import CausalGraph, DeterministicProvider, reference_graph

# A small shared vocabulary so independently sampled graphs overlap in names,
# which is what the name-sensitive kernels need exercised.
NAME_POOL = (
    "population",
    "net increase",
    "resources per capita",
    "carrying capacity",
    "food supply",
    "pollution",
    "energy demand",
    "growth rate",
    "land use",
    "capital stock",
)


def random_graph(
    rng: random.Random,
    max_nodes: int = 5,
    min_nodes: int = 1,
    require_edge: bool = False,
    unique_names: bool = False,
    name_pool=NAME_POOL,
) -> CausalGraph:
    n = rng.randint(min_nodes, max_nodes)
    if require_edge:
        n = max(n, 2)
    if unique_names:
        names = rng.sample(name_pool, n)
    else:
        names = [rng.choice(name_pool) for _ in range(n)]
    nodes = [(f"n{i}", names[i]) for i in range(n)]
    pairs = [(f"n{i}", f"n{j}") for i in range(n) for j in range(n) if i != j]
    lo = 1 if require_edge and pairs else 0
    m = rng.randint(lo, len(pairs)) if pairs else 0
    edges = [
        (src, dst, rng.choice("+-")) for src, dst in rng.sample(pairs, m)
    ]
    return CausalGraph.build(nodes, edges)


@pytest.fixture
def ref():
    return reference_graph()


@pytest.fixture
def det_provider():
    return DeterministicProvider(seed=7, dim=16)
