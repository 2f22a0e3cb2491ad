import json

import pytest

from oodeval import io
from oodeval.labels import Label, Scheme
from oodeval.records import (
    Answer,
    EmbeddingRecord,
    Generation,
    Instance,
    ParsedOutput,
    ParseStatus,
    ScoreRecord,
    Task,
    Template,
)

from conftest import make_instances


class TestInstances:
    def test_round_trip(self, tmp_path):
        instances = make_instances(3)
        path = tmp_path / "inst.jsonl"
        io.write_instances(path, instances)
        assert io.read_instances(path) == instances

    def test_optional_fields_survive(self, tmp_path):
        inst = Instance(
            "a", "d", "train", "h", "p",
            label=Label.NEUTRAL,
            explanation="because",
            native="likely",
            premises=("x.", "y."),
        )
        path = tmp_path / "one.jsonl"
        io.write_instances(path, [inst])
        assert io.read_instances(path) == [inst]

    def test_missing_field_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"id": "a", "dataset": "d", "split": "t", "hypothesis": "h"}\n')
        with pytest.raises(io.RecordError, match="bad.jsonl:1"):
            io.read_instances(path)

    def test_invalid_json_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        good = '{"id":"a","dataset":"d","split":"t","hypothesis":"h","premise":"p"}'
        path.write_text(good + "\nnot json\n")
        with pytest.raises(io.RecordError) as err:
            io.read_instances(path)
        assert err.value.line_no == 2

    def test_scheme_enforced(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(
            '{"id":"a","dataset":"d","split":"t","hypothesis":"h","premise":"p","label":"neutral"}\n'
        )
        assert io.read_instances(path, Scheme.THREE_WAY)[0].label is Label.NEUTRAL
        with pytest.raises(io.RecordError, match="neutral"):
            io.read_instances(path, Scheme.TWO_WAY)

    def test_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "gaps.jsonl"
        io.write_instances(path, make_instances(1))
        path.write_text(path.read_text() + "\n\n")
        assert len(io.read_instances(path)) == 3


class TestDatasetManifest:
    def test_read(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(
            json.dumps({"name": "x", "task": "NLI", "scheme": "three_way", "n_labels": 3})
        )
        spec = io.read_dataset_manifest(path)
        assert spec.task is Task.NLI
        assert spec.scheme is Scheme.THREE_WAY

    def test_label_count_mismatch_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(
            json.dumps({"name": "x", "task": "FC", "scheme": "two_way", "n_labels": 3})
        )
        with pytest.raises(ValueError, match="n_labels"):
            io.read_dataset_manifest(path)


class TestEmbeddings:
    def test_round_trip(self, tmp_path):
        records = [
            EmbeddingRecord("a", [1.0, 2.0], "enc"),
            EmbeddingRecord("b", [3.0, 4.0], "enc"),
        ]
        path = tmp_path / "emb.jsonl"
        io.write_embeddings(path, records, 2, "enc")
        got = io.read_embeddings(path)
        assert [r.instance_id for r in got] == ["a", "b"]
        assert got[0].vector.tolist() == [1.0, 2.0]
        assert got[0].model_id == "enc"

    def test_missing_header(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text("")
        with pytest.raises(io.RecordError, match="header"):
            io.read_embeddings(path)

    def test_dimension_mismatch_names_line(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text(
            '{"dimension": 2, "model_id": "enc"}\n{"id": "a", "vector": [1.0]}\n'
        )
        with pytest.raises(io.RecordError) as err:
            io.read_embeddings(path)
        assert err.value.line_no == 2

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text(
            '{"dimension": 2, "model_id": "enc"}\n{"id": "a", "vector": [1.0, NaN]}\n'
        )
        with pytest.raises(io.RecordError):
            io.read_embeddings(path)


class TestScores:
    def test_round_trip_and_lookup(self, tmp_path):
        records = [
            ScoreRecord("a", "acceptability", 0.25),
            ScoreRecord("a", "themis", 4.0),
            ScoreRecord("b", "acceptability", 0.75),
        ]
        path = tmp_path / "scores.jsonl"
        io.write_scores(path, records)
        got = io.read_scores(path)
        assert got == records
        assert io.scores_by_id(got, "acceptability") == {"a": 0.25, "b": 0.75}

    def test_out_of_range_value_rejected(self, tmp_path):
        path = tmp_path / "scores.jsonl"
        path.write_text('{"id": "a", "metric": "acceptability", "value": 1.5}\n')
        with pytest.raises(io.RecordError):
            io.read_scores(path)

    def test_themis_must_be_integer_rating(self, tmp_path):
        path = tmp_path / "scores.jsonl"
        path.write_text('{"id": "a", "metric": "themis", "value": 3.5}\n')
        with pytest.raises(io.RecordError):
            io.read_scores(path)


class TestGenerationsAndParsed:
    def test_generation_round_trip(self, tmp_path):
        records = [
            Generation("a", "m1", "entailment explanation: x", Template.NLI),
            Generation("b", "m1", '{"relationship": "neutral", "explanation": "y"}', Template.JSON),
        ]
        path = tmp_path / "gen.jsonl"
        io.write_generations(path, records)
        assert io.read_generations(path) == records

    def test_unknown_template_rejected(self, tmp_path):
        path = tmp_path / "gen.jsonl"
        path.write_text(
            '{"id": "a", "model_id": "m", "template": "xml", "raw_text": "t"}\n'
        )
        with pytest.raises(io.RecordError, match="template"):
            io.read_generations(path)

    def test_parsed_round_trip(self, tmp_path):
        records = [
            ParsedOutput("a", Label.ENTAILMENT, "x", ParseStatus.CLEAN),
            ParsedOutput("b", None, None, ParseStatus.NONE),
            ParsedOutput("c", Label.NEUTRAL, None, ParseStatus.FALLBACK),
        ]
        path = tmp_path / "parsed.jsonl"
        io.write_parsed_outputs(path, records)
        assert io.read_parsed_outputs(path) == records

    def test_inconsistent_none_status_rejected(self, tmp_path):
        path = tmp_path / "parsed.jsonl"
        path.write_text(
            '{"id": "a", "parse_status": "none", "label": "entailment"}\n'
        )
        with pytest.raises(io.RecordError):
            io.read_parsed_outputs(path)


class TestJudgments:
    def test_read(self, tmp_path):
        path = tmp_path / "j.jsonl"
        path.write_text(
            '{"instance_id": "a", "evaluator_id": "e1", "answer": "Yes", "shortcomings": ["none"]}\n'
            '{"instance_id": "a", "evaluator_id": "e2", "answer": "WeaklyNo", "shortcomings": ["trivial", "irrelevant"]}\n'
        )
        got = io.read_judgments(path)
        assert got[0].answer is Answer.YES
        assert got[1].shortcomings == frozenset({"trivial", "irrelevant"})

    def test_unknown_shortcoming_rejected(self, tmp_path):
        path = tmp_path / "j.jsonl"
        path.write_text(
            '{"instance_id": "a", "evaluator_id": "e1", "answer": "No", "shortcomings": ["bogus"]}\n'
        )
        with pytest.raises(io.RecordError):
            io.read_judgments(path)


class TestValidateFile:
    def test_counts_records(self, tmp_path):
        path = tmp_path / "inst.jsonl"
        io.write_instances(path, make_instances(2))
        assert io.validate_file(path, "instances") == 6

    def test_unknown_kind(self, tmp_path):
        with pytest.raises(ValueError, match="unknown artifact kind"):
            io.validate_file(tmp_path / "x", "nonsense")

    def test_every_registered_kind_is_callable(self, tmp_path):
        assert set(io.READERS) == {
            "instances", "embeddings", "scores", "generations", "parsed", "judgments",
        }


def test_file_digest_changes_with_content(tmp_path):
    path = tmp_path / "f"
    path.write_text("one")
    first = io.file_digest(path)
    assert len(first) == 64
    path.write_text("two")
    assert io.file_digest(path) != first
