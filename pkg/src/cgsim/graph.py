"""Causal graph data model, parsing, validation, and serialization.

A causal graph is a directed graph whose nodes are named variables and whose
edges carry a polarity: "+" for same-direction influence, "-" for opposite.
Graphs are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterable

from .errors import (
    DanglingEndpointError,
    DuplicateEdgeError,
    DuplicateNodeIdError,
    GraphParseError,
    InvalidNameError,
    LabelConflictError,
    SelfLoopError,
    UnknownPolarityError,
)

_WHITESPACE_RUN = re.compile(r"\s+")


def canonical_name(raw: str) -> str:
    """Lowercase, trim, and collapse internal whitespace runs to one space."""
    name = _WHITESPACE_RUN.sub(" ", raw.strip()).lower()
    if not name:
        raise InvalidNameError(f"variable name {raw!r} is empty after canonicalization")
    return name


class Polarity(str, Enum):
    POSITIVE = "+"
    NEGATIVE = "-"

    @classmethod
    def from_token(cls, token: str, location: str | None = None) -> "Polarity":
        try:
            return cls(token)
        except ValueError:
            raise UnknownPolarityError(
                f"unknown polarity {token!r} (expected '+' or '-')", location
            ) from None

    def flipped(self) -> "Polarity":
        return Polarity.NEGATIVE if self is Polarity.POSITIVE else Polarity.POSITIVE


@dataclass(frozen=True)
class NodeRecord:
    id: str
    name: str  # canonical form


@dataclass(frozen=True)
class EdgeRecord:
    src: str
    dst: str
    polarity: Polarity


@dataclass(frozen=True)
class CausalGraph:
    """Named nodes plus directed polarity-labeled edges.

    Node and edge order is storage only: every similarity operation in this
    package is invariant to it.
    """

    nodes: tuple[NodeRecord, ...]
    edges: tuple[EdgeRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple(self.edges))
        ids = set()
        for node in self.nodes:
            if node.id in ids:
                raise DuplicateNodeIdError(f"duplicate node id {node.id!r}")
            ids.add(node.id)
        seen = set()
        for edge in self.edges:
            if edge.src not in ids:
                raise DanglingEndpointError(f"edge source {edge.src!r} is not a declared node")
            if edge.dst not in ids:
                raise DanglingEndpointError(f"edge target {edge.dst!r} is not a declared node")
            if edge.src == edge.dst:
                raise SelfLoopError(f"self-loop on node {edge.src!r}")
            if (edge.src, edge.dst) in seen:
                raise DuplicateEdgeError(f"duplicate edge {edge.src!r} -> {edge.dst!r}")
            seen.add((edge.src, edge.dst))

    @classmethod
    def build(
        cls,
        nodes: Iterable[tuple[str, str]],
        edges: Iterable[tuple[str, str, str]] = (),
    ) -> "CausalGraph":
        """Construct from (id, name) and (src, dst, polarity-token) tuples."""
        node_records = tuple(NodeRecord(i, canonical_name(n)) for i, n in nodes)
        edge_records = tuple(
            EdgeRecord(s, d, Polarity.from_token(p)) for s, d, p in edges
        )
        return cls(node_records, edge_records)

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def is_empty(self) -> bool:
        return not self.nodes

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(node.name for node in self.nodes)

    @cached_property
    def name_of(self) -> dict[str, str]:
        return {node.id: node.name for node in self.nodes}

    @cached_property
    def polarity_of(self) -> dict[tuple[str, str], Polarity]:
        return {(e.src, e.dst): e.polarity for e in self.edges}

    @cached_property
    def successors(self) -> dict[str, tuple[str, ...]]:
        out: dict[str, list[str]] = {node.id: [] for node in self.nodes}
        for e in self.edges:
            out[e.src].append(e.dst)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def predecessors(self) -> dict[str, tuple[str, ...]]:
        inc: dict[str, list[str]] = {node.id: [] for node in self.nodes}
        for e in self.edges:
            inc[e.dst].append(e.src)
        return {k: tuple(v) for k, v in inc.items()}

    def undirected_pairs(self) -> set[frozenset[str]]:
        """Edge set of the undirected projection (direction collapsed)."""
        return {frozenset((e.src, e.dst)) for e in self.edges}


def validation_warnings(graph: CausalGraph) -> list[str]:
    """Non-fatal issues: duplicate variable names are legal but suspicious,
    since label-based comparisons treat them as the same variable."""
    warnings = []
    seen: dict[str, str] = {}
    for node in graph.nodes:
        if node.name in seen:
            warnings.append(
                f"nodes {seen[node.name]!r} and {node.id!r} share the name {node.name!r}"
            )
        else:
            seen[node.name] = node.id
    return warnings


# --- JSON format ------------------------------------------------------------
#
# {"nodes":[{"id":str,"name":str}...],
#  "edges":[{"src":str,"dst":str,"polarity":"+"|"-"}...]}

_TOP_LEVEL_KEYS = {"nodes", "edges"}


def parse_json(data: bytes | str) -> CausalGraph:
    """Parse the JSON graph format, rejecting unknown top-level keys."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphParseError(
            f"malformed JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}"
        ) from None
    if not isinstance(doc, dict):
        raise GraphParseError("top level must be an object")
    unknown = set(doc) - _TOP_LEVEL_KEYS
    if unknown:
        raise GraphParseError(f"unknown top-level keys: {sorted(unknown)}")
    missing = _TOP_LEVEL_KEYS - set(doc)
    if missing:
        raise GraphParseError(f"missing top-level keys: {sorted(missing)}")

    nodes = []
    ids = set()
    if not isinstance(doc["nodes"], list):
        raise GraphParseError("'nodes' must be an array")
    for i, item in enumerate(doc["nodes"]):
        loc = f"nodes[{i}]"
        if not isinstance(item, dict) or not isinstance(item.get("id"), str) \
                or not isinstance(item.get("name"), str):
            raise GraphParseError("node must be an object with string 'id' and 'name'", loc)
        if item["id"] in ids:
            raise DuplicateNodeIdError(f"duplicate node id {item['id']!r}", loc)
        ids.add(item["id"])
        try:
            name = canonical_name(item["name"])
        except InvalidNameError as exc:
            raise GraphParseError(str(exc), loc) from None
        nodes.append(NodeRecord(item["id"], name))

    edges = []
    seen: set[tuple[str, str]] = set()
    if not isinstance(doc["edges"], list):
        raise GraphParseError("'edges' must be an array")
    for i, item in enumerate(doc["edges"]):
        loc = f"edges[{i}]"
        if not isinstance(item, dict) or not isinstance(item.get("src"), str) \
                or not isinstance(item.get("dst"), str) \
                or not isinstance(item.get("polarity"), str):
            raise GraphParseError(
                "edge must be an object with string 'src', 'dst' and 'polarity'", loc
            )
        polarity = Polarity.from_token(item["polarity"], loc)
        src, dst = item["src"], item["dst"]
        if src not in ids:
            raise DanglingEndpointError(f"edge source {src!r} is not a declared node", loc)
        if dst not in ids:
            raise DanglingEndpointError(f"edge target {dst!r} is not a declared node", loc)
        if src == dst:
            raise SelfLoopError(f"self-loop on node {src!r}", loc)
        if (src, dst) in seen:
            raise DuplicateEdgeError(f"duplicate edge {src!r} -> {dst!r}", loc)
        seen.add((src, dst))
        edges.append(EdgeRecord(src, dst, polarity))

    return CausalGraph(tuple(nodes), tuple(edges))


def to_json(graph: CausalGraph, indent: int | None = 2) -> str:
    """Serialize to the JSON graph format; parse_json(to_json(g)) == g."""
    payload = {
        "nodes": [{"id": n.id, "name": n.name} for n in graph.nodes],
        "edges": [
            {"src": e.src, "dst": e.dst, "polarity": e.polarity.value}
            for e in graph.edges
        ],
    }
    return json.dumps(payload, indent=indent) + "\n"


# --- CLD text format ---------------------------------------------------------
#
# Optional first line `graph TD`, then one edge per line:
#   ID[Label] -- "+" --> ID[Label]
# A bare ID is allowed once the node has been declared with a label.
# Lines starting with '#' are comments.

_EDGE_LINE = re.compile(
    r"""^(?P<src>[A-Za-z_]\w*)(?:\[(?P<src_label>[^\[\]]+)\])?
        \s*--\s*"(?P<sign>[^"]*)"\s*-->\s*
        (?P<dst>[A-Za-z_]\w*)(?:\[(?P<dst_label>[^\[\]]+)\])?$""",
    re.VERBOSE,
)
_HEADER = re.compile(r"^graph\s+TD$")


def parse_cld_text(text: str) -> CausalGraph:
    """Parse the mermaid-style CLD edge list format."""
    order: list[str] = []
    labels: dict[str, str] = {}
    edges: list[EdgeRecord] = []
    seen: set[tuple[str, str]] = set()
    header_allowed = True

    def register(node_id: str, label: str | None, loc: str) -> None:
        if label is not None:
            try:
                name = canonical_name(label)
            except InvalidNameError as exc:
                raise GraphParseError(str(exc), loc) from None
            if node_id in labels:
                if labels[node_id] != name:
                    raise LabelConflictError(
                        f"node {node_id!r} declared as {labels[node_id]!r}, now {name!r}",
                        loc,
                    )
            else:
                labels[node_id] = name
                order.append(node_id)
        elif node_id not in labels:
            raise GraphParseError(
                f"node {node_id!r} referenced before any [Label] declaration", loc
            )

    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        loc = f"line {lineno}"
        if header_allowed and _HEADER.match(line):
            header_allowed = False
            continue
        header_allowed = False
        match = _EDGE_LINE.match(line)
        if not match:
            raise GraphParseError(
                "expected 'ID[Label] -- \"+\" --> ID[Label]'", loc
            )
        polarity = Polarity.from_token(match["sign"], loc)
        register(match["src"], match["src_label"], loc)
        register(match["dst"], match["dst_label"], loc)
        src, dst = match["src"], match["dst"]
        if src == dst:
            raise SelfLoopError(f"self-loop on node {src!r}", loc)
        if (src, dst) in seen:
            raise DuplicateEdgeError(f"duplicate edge {src!r} -> {dst!r}", loc)
        seen.add((src, dst))
        edges.append(EdgeRecord(src, dst, polarity))

    nodes = tuple(NodeRecord(i, labels[i]) for i in order)
    return CausalGraph(nodes, tuple(edges))
