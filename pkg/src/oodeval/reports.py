"""Experiment orchestration: run configuration, the selection -> parse ->
evaluate pipeline, and table / plot-data emission.

Fine-tuning and generation are out of process: a run first writes the
selected-sample files, then evaluates whatever generation files the config
points at. All referenced files must exist before anything is written.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__, io
from .corpus import make_subsets
from .labels import Label, Scheme, merge_to_binary
from .metrics import ScoreBin, balanced_accuracy, bin_by_score, macro_f1, unparsed_rate
from .parsing import parse_generation
from .records import DatasetSpec, Instance, ModelPoint, Task
from .rng import ALGORITHM_ID, derive_seed
from .selection import Method, SelectionConfig, select_per_class

SOURCES = ("e-SNLI", "e-FEVER")
SHOT_GRID = (1, 2, 4, 8, 16, 32, 64, 128)
METHOD_GRID = (
    Method.RANDOM,
    Method.AMBIGUOUS,
    Method.FASTVOTEK,
    Method.ACCEPT_AMBIGUOUS,
    Method.ACCEPT_FASTVOTEK,
)


def enumerate_grid(
    sources: Sequence[str] = SOURCES,
    n_subsets: int = 5,
    shots: Sequence[int] = SHOT_GRID,
    methods: Sequence[Method] = METHOD_GRID,
) -> list[tuple[str, int, int, Method]]:
    """All (source, subset, shots, method) selection cells of an experiment."""
    return [
        (source, subset, m, method)
        for source in sources
        for subset in range(1, n_subsets + 1)
        for m in shots
        for method in methods
    ]


@dataclass(frozen=True)
class OodDatasetFiles:
    manifest: Path
    instances: Path
    scores: Optional[Path] = None  # per-instance acceptability scores

    def paths(self) -> list[Path]:
        return [p for p in (self.manifest, self.instances, self.scores) if p is not None]


@dataclass(frozen=True)
class ModelCell:
    """One fine-tuned model: its provenance plus per-dataset generation files."""

    model_id: str
    template: str
    shots: int
    method: str
    subset: int
    generations: dict[str, Path]  # dataset name -> generations file


@dataclass(frozen=True)
class RunConfig:
    source: str
    seed: int
    selection: Optional[SelectionConfig] = None
    subsets: tuple[int, ...] = ()
    n_subsets: int = 5
    subset_capacity: int = 5000
    source_instances: Optional[Path] = None
    source_scores: Optional[Path] = None
    source_embeddings: Optional[Path] = None
    ood_datasets: tuple[OodDatasetFiles, ...] = ()
    models: tuple[ModelCell, ...] = ()

    @staticmethod
    def from_file(path) -> "RunConfig":
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        base = Path(path).parent

        def resolve(p):
            return (base / p) if p is not None else None

        selection = None
        if raw.get("selection"):
            sel = dict(raw["selection"])
            sel["method"] = Method(sel["method"])
            selection = SelectionConfig(**sel)
        ood = tuple(
            OodDatasetFiles(
                manifest=resolve(d["manifest"]),
                instances=resolve(d["instances"]),
                scores=resolve(d.get("scores")),
            )
            for d in raw.get("ood_datasets", [])
        )
        models = tuple(
            ModelCell(
                model_id=m["model_id"],
                template=m["template"],
                shots=int(m["shots"]),
                method=m["method"],
                subset=int(m.get("subset", 1)),
                generations={k: resolve(v) for k, v in m["generations"].items()},
            )
            for m in raw.get("models", [])
        )
        return RunConfig(
            source=raw["source"],
            seed=int(raw["seed"]),
            selection=selection,
            subsets=tuple(raw.get("subsets", [])),
            n_subsets=int(raw.get("n_subsets", 5)),
            subset_capacity=int(raw.get("subset_capacity", 5000)),
            source_instances=resolve(raw.get("source_instances")),
            source_scores=resolve(raw.get("source_scores")),
            source_embeddings=resolve(raw.get("source_embeddings")),
            ood_datasets=ood,
            models=models,
        )

    def referenced_files(self) -> list[Path]:
        paths = [
            p
            for p in (self.source_instances, self.source_scores, self.source_embeddings)
            if p is not None
        ]
        for d in self.ood_datasets:
            paths.extend(d.paths())
        for m in self.models:
            paths.extend(m.generations.values())
        return paths


@dataclass(frozen=True)
class DatasetRow:
    dataset: str
    task: Task
    n: int
    macro_f1: float
    balanced_accuracy: float
    acceptability: Optional[float]
    unparsed_rate: float


@dataclass(frozen=True)
class ModelReport:
    cell: ModelCell
    rows: tuple[DatasetRow, ...]
    # accuracy-by-acceptability-range bins, pooled over datasets with scores
    bins: Optional[tuple[ScoreBin, ...]] = None

    def average(self, task: Optional[Task] = None) -> Optional[dict[str, float]]:
        rows = [r for r in self.rows if task is None or r.task is task]
        if not rows:
            return None
        accept = [r.acceptability for r in rows if r.acceptability is not None]
        return {
            "macro_f1": sum(r.macro_f1 for r in rows) / len(rows),
            "balanced_accuracy": sum(r.balanced_accuracy for r in rows) / len(rows),
            "acceptability": sum(accept) / len(accept) if accept else None,
            "unparsed_rate": sum(r.unparsed_rate for r in rows) / len(rows),
        }


@dataclass(frozen=True)
class EvalReport:
    source: str
    seed: int
    selections: dict[str, tuple[str, ...]]  # selection file stem -> selected ids
    models: tuple[ModelReport, ...]
    manifest: dict


class MissingArtifactError(FileNotFoundError):
    pass


def _load_dataset(files: OodDatasetFiles) -> tuple[DatasetSpec, list[Instance], dict[str, float]]:
    spec = io.read_dataset_manifest(files.manifest)
    instances = io.read_instances(files.instances, scheme=spec.scheme)
    accept = {}
    if files.scores is not None:
        accept = io.scores_by_id(io.read_scores(files.scores), "acceptability")
    return spec, instances, accept


def _evaluate_cell(
    cell: ModelCell, datasets: dict[str, tuple[DatasetSpec, list[Instance], dict[str, float]]]
) -> ModelReport:
    rows = []
    pooled_scores: list[float] = []
    pooled_preds: list = []
    pooled_golds: list = []
    for name in sorted(cell.generations):
        spec, instances, accept = datasets[name]
        generations = io.read_generations(cell.generations[name])
        parsed = [
            parse_generation(g.raw_text, g.template, g.instance_id) for g in generations
        ]
        gold_by_id = {inst.id: inst.label for inst in instances}
        preds, golds = [], []
        for p in parsed:
            gold = gold_by_id.get(p.instance_id)
            if gold is None:
                raise ValueError(f"{name}: generation for unknown id {p.instance_id}")
            pred = p.label
            if spec.scheme is Scheme.TWO_WAY and pred is not None:
                pred = merge_to_binary(pred)
            preds.append(pred)
            golds.append(gold)
        scores = [accept[p.instance_id] for p in parsed if p.instance_id in accept]
        for p, pred, gold in zip(parsed, preds, golds):
            if p.instance_id in accept:
                pooled_scores.append(accept[p.instance_id])
                pooled_preds.append(pred)
                pooled_golds.append(gold)
        rows.append(
            DatasetRow(
                dataset=name,
                task=spec.task,
                n=len(parsed),
                macro_f1=macro_f1(preds, golds),
                balanced_accuracy=balanced_accuracy(preds, golds),
                acceptability=float(np.mean(scores)) if scores else None,
                unparsed_rate=unparsed_rate(parsed),
            )
        )
    bins = (
        tuple(bin_by_score(pooled_scores, pooled_preds, pooled_golds))
        if pooled_scores
        else None
    )
    return ModelReport(cell=cell, rows=tuple(rows), bins=bins)


def run(config: RunConfig, out_dir) -> EvalReport:
    """Execute selection and evaluation; deterministic for identical inputs."""
    missing = [str(p) for p in config.referenced_files() if not Path(p).exists()]
    if missing:
        raise MissingArtifactError(f"missing artifact files: {missing}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    selections: dict[str, tuple[str, ...]] = {}
    if config.selection is not None and config.source_instances is not None:
        instances = io.read_instances(config.source_instances)
        scores = io.read_scores(config.source_scores) if config.source_scores else []
        embeddings = (
            io.read_embeddings(config.source_embeddings)
            if config.source_embeddings
            else []
        )
        subset_seed = derive_seed(config.seed, "subsets", config.source)
        subsets = make_subsets(
            instances, config.n_subsets, config.subset_capacity, subset_seed
        )
        by_id = {inst.id: inst for inst in instances}
        for index in config.subsets or range(1, config.n_subsets + 1):
            subset = subsets[index - 1]
            pool = [by_id[i] for i in subset.instance_ids]
            cell_seed = derive_seed(config.seed, "select", index, config.selection.method.value)
            cell_config = SelectionConfig(
                method=config.selection.method,
                shots_per_class=config.selection.shots_per_class,
                k=config.selection.k,
                filter_threshold=config.selection.filter_threshold,
                vote_discount=config.selection.vote_discount,
                seed=cell_seed,
                ambiguity_center=config.selection.ambiguity_center,
            )
            chosen = select_per_class(pool, cell_config, scores=scores, embeddings=embeddings)
            stem = (
                f"selected_{config.source}_{config.selection.method.value}"
                f"_{config.selection.shots_per_class}shot_subset{index}"
            )
            io.write_instances(out_dir / f"{stem}.jsonl", [by_id[i] for i in chosen])
            selections[stem] = tuple(chosen)

    datasets = {}
    for files in config.ood_datasets:
        spec, instances, accept = _load_dataset(files)
        datasets[spec.name] = (spec, instances, accept)

    models = tuple(_evaluate_cell(cell, datasets) for cell in config.models)

    manifest = {
        "version": __version__,
        "source": config.source,
        "seed": config.seed,
        "shuffle_algorithm": ALGORITHM_ID,
        "input_digests": {
            str(p): io.file_digest(p) for p in sorted(map(str, config.referenced_files()))
        },
    }
    (out_dir / "run_manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return EvalReport(
        source=config.source,
        seed=config.seed,
        selections=selections,
        models=models,
        manifest=manifest,
    )


def _fmt(value: Optional[float]) -> str:
    return "-" if value is None else f"{100 * value:.1f}"


TASK_ORDER = (Task.NLI, Task.FC, Task.HDAS)


def emit_tables(report: EvalReport, out_dir) -> list[Path]:
    """Write the per-dataset score table, the structured report, and plot data."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    # main table: one row per dataset per model, then task averages
    table = out_dir / "table_scores.tsv"
    lines = ["model\tdataset\ttask\tn\tmacro_f1\tbalanced_accuracy\tacceptability\tunparsed_rate"]
    for model in report.models:
        for row in model.rows:
            lines.append(
                f"{model.cell.model_id}\t{row.dataset}\t{row.task.value}\t{row.n}\t"
                f"{_fmt(row.macro_f1)}\t{_fmt(row.balanced_accuracy)}\t"
                f"{_fmt(row.acceptability)}\t{_fmt(row.unparsed_rate)}"
            )
        for task in TASK_ORDER:
            avg = model.average(task)
            if avg is None:
                continue
            lines.append(
                f"{model.cell.model_id}\tAvg {task.value}\t{task.value}\t-\t"
                f"{_fmt(avg['macro_f1'])}\t{_fmt(avg['balanced_accuracy'])}\t"
                f"{_fmt(avg['acceptability'])}\t{_fmt(avg['unparsed_rate'])}"
            )
        avg = model.average()
        if avg is not None:
            lines.append(
                f"{model.cell.model_id}\tAvg All\t-\t-\t{_fmt(avg['macro_f1'])}\t"
                f"{_fmt(avg['balanced_accuracy'])}\t{_fmt(avg['acceptability'])}\t"
                f"{_fmt(avg['unparsed_rate'])}"
            )
    table.write_text("\n".join(lines) + "\n", encoding="utf-8")
    written.append(table)

    # structured report
    structured = out_dir / "report.json"
    payload = {
        "source": report.source,
        "seed": report.seed,
        "selections": {k: list(v) for k, v in report.selections.items()},
        "models": [
            {
                "model_id": m.cell.model_id,
                "template": m.cell.template,
                "shots": m.cell.shots,
                "method": m.cell.method,
                "subset": m.cell.subset,
                "datasets": [
                    {
                        "dataset": r.dataset,
                        "task": r.task.value,
                        "n": r.n,
                        "macro_f1": r.macro_f1,
                        "balanced_accuracy": r.balanced_accuracy,
                        "acceptability": r.acceptability,
                        "unparsed_rate": r.unparsed_rate,
                    }
                    for r in m.rows
                ],
                "averages": {
                    **{t.value: m.average(t) for t in TASK_ORDER if m.average(t)},
                    "All": m.average(),
                },
            }
            for m in report.models
        ],
    }
    structured.write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    written.append(structured)

    # plot data: shots vs F1, and the F1/Acceptability scatter with front flags
    shots_file = out_dir / "plot_shots_f1.tsv"
    shots_lines = ["model\tmethod\tshots\tmacro_f1"]
    points = []
    for m in report.models:
        avg = m.average()
        if avg is None:
            continue
        shots_lines.append(
            f"{m.cell.model_id}\t{m.cell.method}\t{m.cell.shots}\t{avg['macro_f1']:.6f}"
        )
        if avg["acceptability"] is not None:
            points.append(
                ModelPoint(m.cell.model_id, avg["macro_f1"], avg["acceptability"])
            )
    shots_file.write_text("\n".join(shots_lines) + "\n", encoding="utf-8")
    written.append(shots_file)

    if points:
        from .metrics import pareto_front

        front = {p.model_id for p in pareto_front(points)}
        scatter = out_dir / "plot_pareto.tsv"
        scatter_lines = ["model\tmacro_f1\tacceptability\tpareto"]
        for p in points:
            scatter_lines.append(
                f"{p.model_id}\t{p.f1:.6f}\t{p.acceptability:.6f}\t"
                f"{int(p.model_id in front)}"
            )
        scatter.write_text("\n".join(scatter_lines) + "\n", encoding="utf-8")
        written.append(scatter)

    bin_lines = ["model\tbin_lower\tbin_upper\tbalanced_accuracy\tsample_fraction"]
    any_bins = False
    for m in report.models:
        if m.bins is None:
            continue
        any_bins = True
        for b in m.bins:
            acc = "-" if b.balanced_accuracy is None else f"{b.balanced_accuracy:.6f}"
            bin_lines.append(
                f"{m.cell.model_id}\t{b.lower:.2f}\t{b.upper:.2f}\t{acc}\t"
                f"{b.sample_fraction:.6f}"
            )
    if any_bins:
        bins_file = out_dir / "plot_bins.tsv"
        bins_file.write_text("\n".join(bin_lines) + "\n", encoding="utf-8")
        written.append(bins_file)

    return written
