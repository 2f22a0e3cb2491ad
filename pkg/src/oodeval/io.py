"""Line-delimited record files: readers, writers, and schema validation.

All artifacts exchanged with external processes (instances, embeddings,
scores, generations, parsed outputs, human judgments) are UTF-8 JSON lines.
Validation errors always name the file and 1-based line number.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

from .labels import Label, Scheme, parse_label
from .records import (
    Answer,
    DatasetSpec,
    EmbeddingRecord,
    Generation,
    HumanJudgment,
    Instance,
    ParsedOutput,
    ParseStatus,
    ScoreRecord,
    Task,
    Template,
)


class RecordError(ValueError):
    """A malformed record, carrying its file and line number."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


def _iter_json_lines(path) -> Iterator[tuple[int, dict]]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordError(path, line_no, f"invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise RecordError(path, line_no, "record is not an object")
            yield line_no, record


def _require(record: dict, fields: Iterable[str], path, line_no: int) -> None:
    missing = [f for f in fields if f not in record]
    if missing:
        raise RecordError(path, line_no, f"missing fields: {missing}")


def write_jsonl(path, records: Iterable[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# instances + dataset manifest


def read_instances(path, scheme: Optional[Scheme] = None) -> list[Instance]:
    instances = []
    for line_no, rec in _iter_json_lines(path):
        _require(rec, ("id", "dataset", "split", "hypothesis", "premise"), path, line_no)
        label = None
        if rec.get("label") is not None:
            try:
                label = parse_label(str(rec["label"]), scheme or Scheme.THREE_WAY)
            except ValueError as exc:
                raise RecordError(path, line_no, str(exc)) from exc
        premises = rec.get("premises")
        instances.append(
            Instance(
                id=str(rec["id"]),
                dataset=str(rec["dataset"]),
                split=str(rec["split"]),
                hypothesis=str(rec["hypothesis"]),
                premise=str(rec["premise"]),
                label=label,
                explanation=rec.get("explanation"),
                native=rec.get("native"),
                premises=tuple(premises) if premises is not None else None,
            )
        )
    return instances


def write_instances(path, instances: Iterable[Instance]) -> None:
    def to_record(inst: Instance) -> dict:
        rec = {
            "id": inst.id,
            "dataset": inst.dataset,
            "split": inst.split,
            "hypothesis": inst.hypothesis,
            "premise": inst.premise,
        }
        if inst.label is not None:
            rec["label"] = inst.label.value
        if inst.explanation is not None:
            rec["explanation"] = inst.explanation
        if inst.native is not None:
            rec["native"] = inst.native
        if inst.premises is not None:
            rec["premises"] = list(inst.premises)
        return rec

    write_jsonl(path, (to_record(i) for i in instances))


def read_dataset_manifest(path) -> DatasetSpec:
    rec = json.loads(Path(path).read_text(encoding="utf-8"))
    scheme = Scheme(rec["scheme"])
    return DatasetSpec(
        name=rec["name"],
        task=Task(rec["task"]),
        scheme=scheme,
        n_labels=rec.get("n_labels", scheme.n_labels),
        declared_size=rec.get("declared_size"),
        preprocessing_rule=rec.get("preprocessing_rule"),
        source_uri=rec.get("source_uri"),
    )


# ---------------------------------------------------------------------------
# embeddings (header line with {dimension, model_id}, then {id, vector})


def read_embeddings(path) -> list[EmbeddingRecord]:
    lines = _iter_json_lines(path)
    try:
        line_no, header = next(lines)
    except StopIteration:
        raise RecordError(path, 1, "missing embeddings header") from None
    _require(header, ("dimension", "model_id"), path, line_no)
    dim = int(header["dimension"])
    model_id = str(header["model_id"])
    records = []
    for line_no, rec in lines:
        _require(rec, ("id", "vector"), path, line_no)
        vector = np.asarray(rec["vector"], dtype=float)
        if vector.ndim != 1 or vector.shape[0] != dim:
            raise RecordError(
                path, line_no, f"vector of dimension {vector.shape} != declared {dim}"
            )
        try:
            records.append(EmbeddingRecord(str(rec["id"]), vector, model_id))
        except ValueError as exc:
            raise RecordError(path, line_no, str(exc)) from exc
    return records


def write_embeddings(path, records: list[EmbeddingRecord], dimension: int, model_id: str) -> None:
    header = {"dimension": dimension, "model_id": model_id}
    body = ({"id": r.instance_id, "vector": r.vector.tolist()} for r in records)
    write_jsonl(path, [header, *body])


# ---------------------------------------------------------------------------
# scores


def read_scores(path) -> list[ScoreRecord]:
    records = []
    for line_no, rec in _iter_json_lines(path):
        _require(rec, ("id", "metric", "value"), path, line_no)
        try:
            records.append(ScoreRecord(str(rec["id"]), str(rec["metric"]), float(rec["value"])))
        except (TypeError, ValueError) as exc:
            raise RecordError(path, line_no, str(exc)) from exc
    return records


def write_scores(path, records: Iterable[ScoreRecord]) -> None:
    write_jsonl(
        path,
        ({"id": r.instance_id, "metric": r.metric, "value": r.value} for r in records),
    )


def scores_by_id(records: Iterable[ScoreRecord], metric: str) -> dict[str, float]:
    return {r.instance_id: r.value for r in records if r.metric == metric}


# ---------------------------------------------------------------------------
# generations and parsed outputs


def read_generations(path) -> list[Generation]:
    records = []
    for line_no, rec in _iter_json_lines(path):
        _require(rec, ("id", "model_id", "template", "raw_text"), path, line_no)
        try:
            template = Template(rec["template"])
        except ValueError as exc:
            raise RecordError(path, line_no, f"unknown template {rec['template']!r}") from exc
        records.append(
            Generation(str(rec["id"]), str(rec["model_id"]), str(rec["raw_text"]), template)
        )
    return records


def write_generations(path, records: Iterable[Generation]) -> None:
    write_jsonl(
        path,
        (
            {
                "id": r.instance_id,
                "model_id": r.model_id,
                "template": r.template.value,
                "raw_text": r.raw_text,
            }
            for r in records
        ),
    )


def read_parsed_outputs(path) -> list[ParsedOutput]:
    records = []
    for line_no, rec in _iter_json_lines(path):
        _require(rec, ("id", "parse_status"), path, line_no)
        label = Label(rec["label"]) if rec.get("label") is not None else None
        try:
            records.append(
                ParsedOutput(
                    str(rec["id"]),
                    label,
                    rec.get("explanation"),
                    ParseStatus(rec["parse_status"]),
                )
            )
        except ValueError as exc:
            raise RecordError(path, line_no, str(exc)) from exc
    return records


def write_parsed_outputs(path, records: Iterable[ParsedOutput]) -> None:
    def to_record(r: ParsedOutput) -> dict:
        rec = {"id": r.instance_id, "parse_status": r.parse_status.value}
        if r.label is not None:
            rec["label"] = r.label.value
        if r.explanation is not None:
            rec["explanation"] = r.explanation
        return rec

    write_jsonl(path, (to_record(r) for r in records))


# ---------------------------------------------------------------------------
# human judgments


def read_judgments(path) -> list[HumanJudgment]:
    records = []
    for line_no, rec in _iter_json_lines(path):
        _require(rec, ("instance_id", "evaluator_id", "answer"), path, line_no)
        try:
            records.append(
                HumanJudgment(
                    str(rec["instance_id"]),
                    str(rec["evaluator_id"]),
                    Answer(rec["answer"]),
                    frozenset(rec.get("shortcomings", [])),
                )
            )
        except ValueError as exc:
            raise RecordError(path, line_no, str(exc)) from exc
    return records


# ---------------------------------------------------------------------------
# schema checking entry point (used by the CLI and by adapter tests)

READERS = {
    "instances": read_instances,
    "embeddings": read_embeddings,
    "scores": read_scores,
    "generations": read_generations,
    "parsed": read_parsed_outputs,
    "judgments": read_judgments,
}


def validate_file(path, kind: str) -> int:
    """Validate a record file against its schema; returns the record count.

    Raises RecordError (with line number) on the first invalid record.
    """
    if kind not in READERS:
        raise ValueError(f"unknown artifact kind {kind!r}; expected one of {sorted(READERS)}")
    return len(READERS[kind](path))
