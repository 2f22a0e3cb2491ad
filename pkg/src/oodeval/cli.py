"""Command line interface.

Subcommands: ingest, filter, select, parse, evaluate, correlate, pareto,
report. Global flags --config/--seed/--out apply to the pipeline commands.
Exit code 0 only on fully successful runs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .corpus import FilterReport, filter_efever
from .metrics import SIGNIFICANCE_LEVEL, aggregate_human, pareto_front, spearman
from .parsing import parse_generation
from .records import ModelPoint
from .reports import RunConfig, emit_tables, run
from .selection import Method, SelectionConfig, select_per_class, threshold_filter


def _cmd_ingest(args) -> int:
    count = io.validate_file(args.path, args.kind)
    print(f"{args.path}: {count} valid {args.kind} records")
    return 0


def _cmd_filter(args) -> int:
    instances = io.read_instances(args.instances)
    if args.rule == "efever":
        report = FilterReport()
        kept = filter_efever(instances, report)
        print(
            f"kept {len(kept)}/{len(instances)} "
            f"(removed: {report.removed_nei_sentinel} NEI-sentinel, "
            f"{report.removed_claim_repeat} claim-repeat)"
        )
    else:
        scores = io.read_scores(args.scores)
        kept = threshold_filter(instances, scores, args.metric, args.threshold)
        print(f"kept {len(kept)}/{len(instances)} at {args.metric} >= {args.threshold}")
    io.write_instances(args.out_file, kept)
    return 0


def _cmd_select(args) -> int:
    instances = io.read_instances(args.instances)
    scores = io.read_scores(args.scores) if args.scores else []
    embeddings = io.read_embeddings(args.embeddings) if args.embeddings else []
    config = SelectionConfig(
        method=Method(args.method),
        shots_per_class=args.shots,
        k=args.k,
        filter_threshold=args.threshold,
        seed=args.seed,
    )
    chosen = select_per_class(instances, config, scores=scores, embeddings=embeddings)
    by_id = {inst.id: inst for inst in instances}
    io.write_instances(args.out_file, [by_id[i] for i in chosen])
    print(f"selected {len(chosen)} instances -> {args.out_file}")
    return 0


def _cmd_parse(args) -> int:
    generations = io.read_generations(args.generations)
    parsed = [
        parse_generation(g.raw_text, g.template, g.instance_id) for g in generations
    ]
    io.write_parsed_outputs(args.out_file, parsed)
    clean = sum(1 for p in parsed if p.parse_status.value == "clean")
    print(f"parsed {len(parsed)} generations ({clean} clean) -> {args.out_file}")
    return 0


def _cmd_evaluate(args, emit_all: bool) -> int:
    config = RunConfig.from_file(args.config)
    out_dir = Path(args.out)
    report = run(config, out_dir)
    written = emit_tables(report, out_dir)
    if not emit_all:
        written = [p for p in written if p.name == "report.json"]
    for path in written:
        print(f"wrote {path}")
    return 0


def _cmd_correlate(args) -> int:
    judgments = io.read_judgments(args.judgments)
    by_instance: dict[str, list] = {}
    for j in judgments:
        by_instance.setdefault(j.instance_id, []).append(j)
    human = {i: aggregate_human(js) for i, js in by_instance.items()}
    auto = io.scores_by_id(io.read_scores(args.scores), args.metric)
    shared = sorted(set(human) & set(auto))
    if len(shared) < 3:
        print(f"error: only {len(shared)} instances shared between files", file=sys.stderr)
        return 1
    rho, p = spearman([human[i] for i in shared], [auto[i] for i in shared])
    significant = p < SIGNIFICANCE_LEVEL
    print(
        f"n={len(shared)} rho={rho:.4f} p={p:.3e} "
        f"significant_at_{SIGNIFICANCE_LEVEL}={significant}"
    )
    return 0


def _cmd_pareto(args) -> int:
    points = []
    for line in Path(args.points).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        rec = json.loads(line)
        points.append(ModelPoint(rec["model_id"], rec["f1"], rec["acceptability"]))
    front = pareto_front(points)
    for p in front:
        print(f"{p.model_id}\t{p.f1}\t{p.acceptability}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="oodeval")
    parser.add_argument("--config", help="run configuration file (JSON)")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="runs/out", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a record file against its schema")
    p.add_argument("path")
    p.add_argument("--kind", default="instances", choices=sorted(io.READERS))

    p = sub.add_parser("filter", help="acceptability/Themis threshold or e-FEVER filter")
    p.add_argument("--instances", required=True)
    p.add_argument("--rule", choices=["efever", "threshold"], default="threshold")
    p.add_argument("--scores")
    p.add_argument("--metric", default="acceptability")
    p.add_argument("--threshold", type=float, default=0.3)
    p.add_argument("--out-file", required=True)

    p = sub.add_parser("select", help="per-class few-shot sample selection")
    p.add_argument("--instances", required=True)
    p.add_argument("--scores")
    p.add_argument("--embeddings")
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--shots", type=int, required=True)
    p.add_argument("--k", type=int, default=150)
    p.add_argument("--threshold", type=float, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subset", type=int, default=1)
    p.add_argument("--out-file", required=True)

    p = sub.add_parser("parse", help="extract labels/explanations from generations")
    p.add_argument("--generations", required=True)
    p.add_argument("--out-file", required=True)

    sub.add_parser("evaluate", help="run the pipeline and write report.json")
    sub.add_parser("report", help="run the pipeline and write all tables and plot data")

    p = sub.add_parser("correlate", help="Spearman correlation of human vs automatic scores")
    p.add_argument("--judgments", required=True)
    p.add_argument("--scores", required=True)
    p.add_argument("--metric", default="acceptability")

    p = sub.add_parser("pareto", help="Pareto front of (F1, Acceptability) model points")
    p.add_argument("--points", required=True)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "ingest":
            return _cmd_ingest(args)
        if args.command == "filter":
            return _cmd_filter(args)
        if args.command == "select":
            return _cmd_select(args)
        if args.command == "parse":
            return _cmd_parse(args)
        if args.command in ("evaluate", "report"):
            if not args.config:
                print("error: --config is required", file=sys.stderr)
                return 2
            return _cmd_evaluate(args, emit_all=args.command == "report")
        if args.command == "correlate":
            return _cmd_correlate(args)
        if args.command == "pareto":
            return _cmd_pareto(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
