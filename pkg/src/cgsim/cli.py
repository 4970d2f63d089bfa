"""Command-line surface: compare, batch, stats, perturb, validate.

Exit status: 0 on success, 1 on input or runtime errors, 2 on usage errors,
70 on internal invariant violations. Machine output (--format json|csv) goes
to --out or stdout; when it goes to stdout, the human-readable summary moves
to stderr so the two never share a stream.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .embeddings import CachedProvider, EmbeddingProvider, provider_from_spec
from .errors import CgsimError, InternalKernelError
from .fixtures import reference_graph
from .graph import CausalGraph, validation_warnings
from .kernels import KernelConfig
from .pipeline import (
    ALL_METRICS,
    PerturbationPlan,
    batch,
    compare,
    load_graph_file,
    perturb_corpus,
    reports_csv_text,
    write_reports_json,
    write_summaries_json,
)
from .semantic import DEFAULT_STRATEGY, STRATEGIES
from .stats import stats

EX_INPUT = 1
EX_USAGE = 2
EX_INTERNAL = 70


def _load_graph(path: str) -> CausalGraph:
    if path == "@reference":
        return reference_graph()
    return load_graph_file(path)


def _parse_metrics(raw: str | None) -> tuple[str, ...]:
    if raw is None:
        return ALL_METRICS
    requested = tuple(item.strip() for item in raw.split(",") if item.strip())
    unknown = set(requested) - set(ALL_METRICS)
    if unknown:
        raise CgsimError(f"unknown metrics: {sorted(unknown)}")
    if not requested:
        raise CgsimError("empty --metrics list")
    return requested


def _parse_config(raw: str | None) -> KernelConfig:
    if raw is None:
        return KernelConfig()
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CgsimError(f"--config is not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise CgsimError("--config must be a JSON object")
    try:
        return KernelConfig.from_dict(doc)
    except (TypeError, ValueError) as exc:
        raise CgsimError(f"bad --config: {exc}") from None


def _build_provider(args) -> EmbeddingProvider | None:
    if args.embed is None:
        if getattr(args, "embed_cache", None):
            raise CgsimError("--embed-cache requires --embed")
        return None
    provider = provider_from_spec(args.embed)
    if getattr(args, "embed_cache", None):
        provider = CachedProvider(provider, args.embed_cache)
    return provider


def _parse_ops(raw: str | None, seed: int) -> PerturbationPlan:
    counts: dict[str, int] = {}
    if raw:
        for item in raw.split(","):
            item = item.strip()
            if not item:
                continue
            kind, _, value = item.partition("=")
            if kind not in PerturbationPlan.OP_KINDS:
                raise CgsimError(
                    f"unknown perturbation op {kind!r} "
                    f"(one of {', '.join(PerturbationPlan.OP_KINDS)})"
                )
            try:
                counts[kind] = int(value)
            except ValueError:
                raise CgsimError(f"bad count in --ops item {item!r}") from None
    return PerturbationPlan(seed=seed, **counts)


class _Output:
    """Keeps machine and human output on separate streams."""

    def __init__(self, out_path: str | None, machine_to_stdout: bool):
        self.out_path = out_path
        self.human_stream = sys.stderr if machine_to_stdout else sys.stdout

    def human(self, text: str) -> None:
        print(text, file=self.human_stream)

    def machine(self, text: str) -> None:
        if self.out_path:
            Path(self.out_path).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


def _fmt(value) -> str:
    return "-" if value is None else f"{value:.6f}"


def _cmd_compare(args) -> int:
    metrics = _parse_metrics(args.metrics)
    cfg = _parse_config(args.config)
    provider = _build_provider(args)
    ref = _load_graph(args.ref)
    cmp = _load_graph(args.cmp)
    report = compare(ref, cmp, provider, cfg, args.strategy, metrics,
                     ref_id=args.ref, cmp_id=args.cmp)
    out = _Output(args.out, machine_to_stdout=args.format is not None and not args.out)
    scores = report.scores()
    out.human(f"comparison of {args.cmp} against {args.ref}")
    for metric in ALL_METRICS:
        if metric in metrics:
            out.human(f"  {metric} = {_fmt(scores[metric])}")
    out.human(f"  strategy = {args.strategy}; provider = "
              f"{provider.provider_id if provider else 'none'}")
    if args.format == "json":
        out.machine(json.dumps(report.to_dict(), indent=2) + "\n")
    elif args.format == "csv":
        out.machine(reports_csv_text([report]))
    return 0


def _cmd_batch(args) -> int:
    metrics = _parse_metrics(args.metrics)
    cfg = _parse_config(args.config)
    provider = _build_provider(args)
    ref = _load_graph(args.ref)
    result = batch(ref, args.corpus, provider, cfg, args.strategy, metrics,
                   jobs=args.jobs, ref_id=args.ref)
    out = _Output(args.out, machine_to_stdout=args.format is not None and not args.out)
    out.human(f"compared {len(result.reports)} graphs against {args.ref}; "
              f"{len(result.rejects)} rejected")
    for reject in result.rejects:
        out.human(f"  rejected {reject['file']}: {reject['error']}")
    for metric, summary in result.summaries.items():
        out.human(
            f"  {metric}: count={summary.count} min={summary.min:.4f} "
            f"median={summary.median:.4f} mean={summary.mean:.4f} "
            f"max={summary.max:.4f}"
        )
    if args.format == "json":
        out.machine(json.dumps(result.to_dict(), indent=2) + "\n")
    elif args.format == "csv":
        out.machine(reports_csv_text(result.reports))
    if args.report_out:
        write_reports_json(result.reports, args.report_out)
        out.human(f"wrote reports to {args.report_out}")
    if args.summary_out:
        write_summaries_json(result.summaries, args.summary_out)
        out.human(f"wrote summaries to {args.summary_out}")
    return 0


def _cmd_stats(args) -> int:
    graph = _load_graph(args.graph)
    report = stats(graph)
    out = _Output(args.out, machine_to_stdout=args.format is not None and not args.out)
    out.human(f"statistics for {args.graph}")
    out.human(f"  n = {report.n}")
    out.human(f"  m = {report.m}")
    out.human(f"  cycles = {report.cycles}")
    out.human(f"  density = {report.density:.6f}")
    out.human(f"  transitivity = {report.transitivity:.6f}")
    out.human(f"  avg_connectivity = {report.avg_connectivity:.6f}")
    if args.format == "json":
        out.machine(json.dumps(report.to_dict(), indent=2) + "\n")
    return 0


def _cmd_perturb(args) -> int:
    ref = _load_graph(args.ref)
    plan = _parse_ops(args.ops, args.seed)
    manifest = perturb_corpus(ref, plan, args.n, args.out)
    print(f"wrote {manifest['count']} graphs and manifest.json to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    graph = _load_graph(args.graph)
    warnings = validation_warnings(graph)
    print(f"{args.graph}: valid ({graph.n} nodes, {graph.m} edges)")
    for warning in warnings:
        print(f"  warning: {warning}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cgsim",
        description="Semantic and structural similarity between causal graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def shared(p, with_embed=True):
        p.add_argument("--format", choices=("json", "csv"), default=None,
                       help="machine output format")
        p.add_argument("--out", default=None, help="write machine output here")
        p.add_argument("--config", default=None,
                       help="kernel hyperparameters as a JSON object")
        p.add_argument("--strategy", choices=STRATEGIES, default=DEFAULT_STRATEGY,
                       help="semantic aggregation strategy")
        p.add_argument("--metrics", default=None,
                       help="comma-separated subset of m1..m4,g1..g5")
        if with_embed:
            p.add_argument("--embed", default=None,
                           help="file:<path> | http:<url> | det:seed=<s>,dim=<d>")
            p.add_argument("--embed-cache", default=None,
                           help="persistent TSV cache for the embedding provider")

    p_compare = sub.add_parser("compare", help="compare two graphs")
    p_compare.add_argument("ref")
    p_compare.add_argument("cmp")
    shared(p_compare)
    p_compare.set_defaults(fn=_cmd_compare)

    p_batch = sub.add_parser("batch", help="compare a reference against a corpus")
    p_batch.add_argument("ref")
    p_batch.add_argument("corpus")
    shared(p_batch)
    p_batch.add_argument("--jobs", type=int, default=1,
                         help="parallel comparisons (default 1, reproducible)")
    p_batch.add_argument("--report-out", default=None,
                         help="write the JSON report array here")
    p_batch.add_argument("--summary-out", default=None,
                         help="write the per-metric summary JSON here")
    p_batch.set_defaults(fn=_cmd_batch)

    p_stats = sub.add_parser("stats", help="graph-level statistics")
    p_stats.add_argument("graph")
    p_stats.add_argument("--format", choices=("json",), default=None)
    p_stats.add_argument("--out", default=None)
    p_stats.set_defaults(fn=_cmd_stats)

    p_perturb = sub.add_parser("perturb", help="generate a perturbation corpus")
    p_perturb.add_argument("ref")
    p_perturb.add_argument("--n", type=int, required=True)
    p_perturb.add_argument("--seed", type=int, required=True)
    p_perturb.add_argument("--ops", default=None,
                           help="e.g. rename_node=1,delete_edge=2")
    p_perturb.add_argument("--out", required=True, help="output directory")
    p_perturb.set_defaults(fn=_cmd_perturb)

    p_validate = sub.add_parser("validate", help="parse and check a graph file")
    p_validate.add_argument("graph")
    p_validate.set_defaults(fn=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except InternalKernelError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EX_INTERNAL
    except (CgsimError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EX_INPUT


if __name__ == "__main__":
    sys.exit(main())
