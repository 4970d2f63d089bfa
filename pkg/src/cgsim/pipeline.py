"""Batch comparison pipeline: perturbation corpora, reports, summaries.

Replaces hand-collected comparison corpora with seeded perturbations of a
reference graph, compares the reference against every corpus graph, and
emits self-describing reports plus per-metric distribution summaries.
"""

from __future__ import annotations

import csv
import io
import json
import os
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from .embeddings import EmbeddingProvider
from .errors import EmptyCorpusError
from .graph import (
    CausalGraph,
    EdgeRecord,
    NodeRecord,
    Polarity,
    canonical_name,
    parse_cld_text,
    parse_json,
    to_json,
)
from .kernels import KERNEL_IDS, KernelConfig, KernelScores, kernel_scores
from .semantic import (
    DEFAULT_STRATEGY,
    SEMANTIC_METRICS,
    SemanticScores,
    semantic_scores,
)

ALL_METRICS = SEMANTIC_METRICS + KERNEL_IDS

# Fixed bin layout so summaries are comparable across runs.
HISTOGRAM_BINS = 20
METRIC_SCALES = {
    "m1": (0.0, 1.0),
    "m2": (0.0, 1.0),
    "m3": (-1.0, 1.0),
    "g1": (0.0, 1.0),
    "g2": (0.0, 1.0),
    "g3": (0.0, 1.0),
    "g4": (0.0, 1.0),
    "g5": (0.0, 1.0),
}


def _timestamp() -> str:
    """Wall clock, unless SOURCE_DATE_EPOCH pins it for reproducible output."""
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(tz=timezone.utc)
    return moment.isoformat()


@dataclass(frozen=True)
class ComparisonReport:
    ref_id: str
    cmp_id: str
    semantic: SemanticScores
    kernels: KernelScores
    config_echo: dict
    timestamp: str

    def scores(self) -> dict:
        return {**self.semantic.to_dict(), **self.kernels.to_dict()}

    def to_dict(self) -> dict:
        return {
            "ref_id": self.ref_id,
            "cmp_id": self.cmp_id,
            "semantic": self.semantic.to_dict(),
            "kernels": self.kernels.to_dict(),
            "config_echo": self.config_echo,
            "timestamp": self.timestamp,
        }


def compare(
    ref: CausalGraph,
    cmp: CausalGraph,
    provider: EmbeddingProvider | None = None,
    cfg: KernelConfig | None = None,
    strategy: str = DEFAULT_STRATEGY,
    metrics: Sequence[str] = ALL_METRICS,
    ref_id: str = "ref",
    cmp_id: str = "cmp",
) -> ComparisonReport:
    """All requested scores for one graph pair, echoing the configuration."""
    cfg = cfg or KernelConfig()
    metrics = tuple(metrics)
    unknown = set(metrics) - set(ALL_METRICS)
    if unknown:
        raise ValueError(f"unknown metrics: {sorted(unknown)}")
    wanted_semantic = tuple(m for m in SEMANTIC_METRICS if m in metrics)
    wanted_kernels = tuple(k for k in KERNEL_IDS if k in metrics)
    semantic = semantic_scores(ref, cmp, provider, strategy, wanted_semantic) \
        if wanted_semantic else SemanticScores(None, None, None, None, strategy)
    kernels = kernel_scores(ref, cmp, cfg, wanted_kernels)
    echo = {
        "kernel_config": cfg.to_dict(),
        "strategy": strategy,
        "provider_id": provider.provider_id if provider is not None else None,
        "metrics": list(metrics),
    }
    return ComparisonReport(ref_id, cmp_id, semantic, kernels, echo, _timestamp())


# --- distribution summaries -----------------------------------------------------

@dataclass(frozen=True)
class DistributionSummary:
    metric_id: str
    count: int
    min: float
    max: float
    mean: float
    median: float
    bin_edges: tuple[float, ...]   # 21 edges
    bin_counts: tuple[int, ...]    # 20 counts

    def to_dict(self) -> dict:
        return {
            "metric_id": self.metric_id,
            "count": self.count,
            "min": self.min,
            "max": self.max,
            "mean": self.mean,
            "median": self.median,
            "histogram": {
                "edges": list(self.bin_edges),
                "counts": list(self.bin_counts),
            },
        }


def summarize(values: Sequence[float], metric_id: str) -> DistributionSummary:
    """Order statistics plus a 20-bin histogram over the metric's scale.

    The median is the lower middle for even counts. m4 has no fixed floor,
    so its bins cover [observed min, 0] ([-1, 0] if everything is 0).
    """
    if not values:
        raise ValueError("cannot summarize an empty value list")
    ordered = sorted(values)
    count = len(ordered)
    if metric_id == "m4":
        lo = ordered[0] if ordered[0] < 0 else -1.0
        hi = 0.0
    else:
        try:
            lo, hi = METRIC_SCALES[metric_id]
        except KeyError:
            raise ValueError(f"unknown metric {metric_id!r}") from None
    width = (hi - lo) / HISTOGRAM_BINS
    edges = tuple(lo + i * width for i in range(HISTOGRAM_BINS)) + (hi,)
    counts = [0] * HISTOGRAM_BINS
    for value in ordered:
        slot = int((value - lo) / width)
        counts[min(max(slot, 0), HISTOGRAM_BINS - 1)] += 1
    return DistributionSummary(
        metric_id=metric_id,
        count=count,
        min=ordered[0],
        max=ordered[-1],
        mean=sum(ordered) / count,
        median=ordered[(count - 1) // 2],
        bin_edges=edges,
        bin_counts=tuple(counts),
    )


# --- perturbation corpus ---------------------------------------------------------

@dataclass(frozen=True)
class PerturbationPlan:
    """How many operations of each kind to apply per generated graph."""

    seed: int
    rename_node: int = 0
    delete_node: int = 0
    add_node: int = 0
    delete_edge: int = 0
    add_edge: int = 0
    flip_polarity: int = 0
    reverse_edge: int = 0

    OP_KINDS = ("rename_node", "delete_node", "add_node", "delete_edge",
                "add_edge", "flip_polarity", "reverse_edge")

    def to_dict(self) -> dict:
        return asdict(self)


_SYNONYMS = {
    "population": "people",
    "people": "community",
    "growth": "expansion",
    "increase": "rise",
    "decrease": "decline",
    "resources": "supplies",
    "resource": "supply",
    "capacity": "limit",
    "rate": "pace",
    "net": "overall",
    "demand": "need",
    "supply": "provision",
    "pollution": "contamination",
    "capital": "assets",
    "food": "nutrition",
    "land": "territory",
    "energy": "power",
}
_MODIFIERS = ("total", "effective", "relative", "expected", "observed")
_FRESH_WORDS = ("external pressure", "policy response", "market signal",
                "innovation effort", "awareness level", "funding stream")


def _rename_node(graph: CausalGraph, rng: random.Random):
    node = rng.choice(graph.nodes)
    tokens = list(node.name.split())
    synonym_slots = [i for i, t in enumerate(tokens) if t in _SYNONYMS]
    if synonym_slots:
        i = rng.choice(synonym_slots)
        tokens[i] = _SYNONYMS[tokens[i]]
    elif len(tokens) >= 2:
        i, j = rng.sample(range(len(tokens)), 2)
        tokens[i], tokens[j] = tokens[j], tokens[i]
    else:
        tokens.insert(0, rng.choice(_MODIFIERS))
    new_name = canonical_name(" ".join(tokens))
    nodes = tuple(
        NodeRecord(n.id, new_name) if n.id == node.id else n for n in graph.nodes
    )
    return CausalGraph(nodes, graph.edges), f"rename_node {node.id} -> {new_name!r}"


def _delete_node(graph: CausalGraph, rng: random.Random):
    if graph.n <= 1:
        return None, "delete_node (graph too small)"
    node = rng.choice(graph.nodes)
    nodes = tuple(n for n in graph.nodes if n.id != node.id)
    edges = tuple(e for e in graph.edges if node.id not in (e.src, e.dst))
    return CausalGraph(nodes, edges), f"delete_node {node.id}"


def _add_node(graph: CausalGraph, rng: random.Random):
    existing = {n.id for n in graph.nodes}
    serial = 0
    while f"x{serial}" in existing:
        serial += 1
    name = canonical_name(rng.choice(_FRESH_WORDS))
    node = NodeRecord(f"x{serial}", name)
    return CausalGraph(graph.nodes + (node,), graph.edges), f"add_node {node.id}"


def _delete_edge(graph: CausalGraph, rng: random.Random):
    if graph.m == 0:
        return None, "delete_edge (no edges)"
    edge = rng.choice(graph.edges)
    edges = tuple(e for e in graph.edges if e != edge)
    return CausalGraph(graph.nodes, edges), f"delete_edge {edge.src}->{edge.dst}"


def _add_edge(graph: CausalGraph, rng: random.Random):
    present = {(e.src, e.dst) for e in graph.edges}
    ids = [n.id for n in graph.nodes]
    candidates = [
        (s, d) for s in ids for d in ids if s != d and (s, d) not in present
    ]
    if not candidates:
        return None, "add_edge (graph complete)"
    src, dst = rng.choice(candidates)
    polarity = rng.choice((Polarity.POSITIVE, Polarity.NEGATIVE))
    edges = graph.edges + (EdgeRecord(src, dst, polarity),)
    return CausalGraph(graph.nodes, edges), f"add_edge {src}->{dst}"


def _flip_polarity(graph: CausalGraph, rng: random.Random):
    if graph.m == 0:
        return None, "flip_polarity (no edges)"
    edge = rng.choice(graph.edges)
    edges = tuple(
        EdgeRecord(e.src, e.dst, e.polarity.flipped()) if e == edge else e
        for e in graph.edges
    )
    return CausalGraph(graph.nodes, edges), f"flip_polarity {edge.src}->{edge.dst}"


def _reverse_edge(graph: CausalGraph, rng: random.Random):
    present = {(e.src, e.dst) for e in graph.edges}
    candidates = [e for e in graph.edges if (e.dst, e.src) not in present]
    if not candidates:
        return None, "reverse_edge (no reversible edge)"
    edge = rng.choice(candidates)
    edges = tuple(
        EdgeRecord(e.dst, e.src, e.polarity) if e == edge else e
        for e in graph.edges
    )
    return CausalGraph(graph.nodes, edges), f"reverse_edge {edge.src}->{edge.dst}"


_OP_FUNCTIONS = {
    "rename_node": _rename_node,
    "delete_node": _delete_node,
    "add_node": _add_node,
    "delete_edge": _delete_edge,
    "add_edge": _add_edge,
    "flip_polarity": _flip_polarity,
    "reverse_edge": _reverse_edge,
}


def perturb_graph(graph: CausalGraph, plan: PerturbationPlan,
                  rng: random.Random) -> tuple[CausalGraph, list[str], list[str]]:
    """Apply the plan's operation counts; skipped ops keep the graph valid."""
    applied: list[str] = []
    skipped: list[str] = []
    for kind in PerturbationPlan.OP_KINDS:
        for _ in range(getattr(plan, kind)):
            result, note = _OP_FUNCTIONS[kind](graph, rng)
            if result is None:
                skipped.append(note)
            else:
                graph = result
                applied.append(note)
    return graph, applied, skipped


def perturb_corpus(ref: CausalGraph, plan: PerturbationPlan, n: int,
                   out_dir: str | Path) -> dict:
    """Write n seeded perturbations of ref as JSON files plus a manifest.

    Same seed, same plan, same reference: byte-identical corpus.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    width = max(4, len(str(n - 1)))
    entries = []
    for i in range(n):
        rng = random.Random(f"{plan.seed}:{i}")
        graph, applied, skipped = perturb_graph(ref, plan, rng)
        filename = f"graph_{i:0{width}d}.json"
        (out / filename).write_text(to_json(graph), encoding="utf-8")
        entries.append({"file": filename, "applied": applied, "skipped": skipped})
    manifest = {"seed": plan.seed, "plan": plan.to_dict(), "count": n,
                "graphs": entries}
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2) + "\n", encoding="utf-8"
    )
    return manifest


# --- batch run -------------------------------------------------------------------

_CORPUS_SUFFIXES = {".json", ".cld", ".txt"}


@dataclass
class BatchResult:
    reports: list[ComparisonReport]
    summaries: dict[str, DistributionSummary]
    rejects: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "reports": [r.to_dict() for r in self.reports],
            "summaries": {k: s.to_dict() for k, s in self.summaries.items()},
            "rejects": self.rejects,
        }


def load_graph_file(path: str | Path) -> CausalGraph:
    """Parse a graph file, sniffing JSON vs CLD text by the leading character."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return parse_json(text)
    return parse_cld_text(text)


def batch(
    ref: CausalGraph,
    corpus_dir: str | Path,
    provider: EmbeddingProvider | None = None,
    cfg: KernelConfig | None = None,
    strategy: str = DEFAULT_STRATEGY,
    metrics: Sequence[str] = ALL_METRICS,
    jobs: int = 1,
    ref_id: str = "reference",
) -> BatchResult:
    """Compare ref against every graph file in corpus_dir (sorted by name).

    Files that fail to parse or compare are collected as rejects and never
    abort the run.
    """
    corpus = Path(corpus_dir)
    files = sorted(
        p for p in corpus.iterdir()
        if p.is_file() and p.suffix in _CORPUS_SUFFIXES and p.name != "manifest.json"
    ) if corpus.is_dir() else []
    if not files:
        raise EmptyCorpusError(f"no graph files found in {corpus_dir}")

    cfg = cfg or KernelConfig()
    rejects: list[dict] = []
    parsed: list[tuple[str, CausalGraph]] = []
    for path in files:
        try:
            parsed.append((path.name, load_graph_file(path)))
        except Exception as exc:
            rejects.append({"file": path.name, "error": str(exc)})

    def run(item: tuple[str, CausalGraph]) -> ComparisonReport:
        name, graph = item
        return compare(ref, graph, provider, cfg, strategy, metrics,
                       ref_id=ref_id, cmp_id=name)

    reports: list[ComparisonReport] = []
    if jobs > 1 and len(parsed) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(lambda item: _try_compare(run, item), parsed))
    else:
        outcomes = [_try_compare(run, item) for item in parsed]
    for (name, _), outcome in zip(parsed, outcomes):
        if isinstance(outcome, ComparisonReport):
            reports.append(outcome)
        else:
            rejects.append({"file": name, "error": outcome})

    summaries: dict[str, DistributionSummary] = {}
    for metric_id in metrics:
        values = [r.scores()[metric_id] for r in reports
                  if r.scores()[metric_id] is not None]
        if values:
            summaries[metric_id] = summarize(values, metric_id)
    return BatchResult(reports=reports, summaries=summaries, rejects=rejects)


def _try_compare(run, item):
    try:
        return run(item)
    except Exception as exc:
        return str(exc)


# --- emission --------------------------------------------------------------------

CSV_COLUMNS = ("cmp_id",) + ALL_METRICS


def write_reports_json(reports: Sequence[ComparisonReport], path: str | Path) -> None:
    payload = [r.to_dict() for r in reports]
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def reports_csv_text(reports: Sequence[ComparisonReport]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(CSV_COLUMNS)
    for report in reports:
        scores = report.scores()
        writer.writerow(
            [report.cmp_id]
            + ["" if scores[m] is None else repr(scores[m]) for m in ALL_METRICS]
        )
    return buffer.getvalue()


def write_reports_csv(reports: Sequence[ComparisonReport], path: str | Path) -> None:
    Path(path).write_text(reports_csv_text(reports), encoding="utf-8")


def write_summaries_json(summaries: dict[str, DistributionSummary],
                         path: str | Path) -> None:
    payload = {metric: summary.to_dict() for metric, summary in summaries.items()}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
