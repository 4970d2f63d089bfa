"""Bundled reference graph: a compact population-vs-resources feedback model.

Encoded with 4 variables and 5 causal links: a reinforcing growth loop
(population <-> net increase) and a balancing resource loop (population
depletes resources per capita, which in turn constrain population), with the
fractional net increase feeding the net increase. Its statistics are pinned
by the acceptance suite: n=4, m=5, 2 simple cycles, average connectivity 1,
density 5/12.
"""

from __future__ import annotations

from importlib.resources import files

from .graph import CausalGraph, parse_json

REFERENCE_RESOURCE = "limits_to_growth.json"


def reference_json() -> str:
    return (files("cgsim") / "data" / REFERENCE_RESOURCE).read_text(encoding="utf-8")


def reference_graph() -> CausalGraph:
    return parse_json(reference_json())
