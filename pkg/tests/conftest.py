import json
import zlib
import random

import pytest

from oodeval import io
from oodeval.labels import Label, Scheme
from oodeval.parsing import render_json_output, render_nli_output
from oodeval.records import EmbeddingRecord, Generation, Instance, ScoreRecord, Template

THREE_WAY = (Label.ENTAILMENT, Label.NEUTRAL, Label.CONTRADICTION)


def make_instances(n_per_class=60, dataset="mini-source", split="train", seed=7):
    rng = random.Random(seed)
    instances = []
    for label in THREE_WAY:
        for i in range(n_per_class):
            iid = f"{dataset}-{label.value[:3]}-{i:03d}"
            instances.append(
                Instance(
                    id=iid,
                    dataset=dataset,
                    split=split,
                    hypothesis=f"hypothesis {label.value} {i} {rng.randint(0, 999)}",
                    premise=f"premise {label.value} {i} {rng.randint(0, 999)}",
                    label=label,
                    explanation=f"because of reason {i} for {label.value}",
                )
            )
    return instances


def make_embeddings(instances, dim=8):
    records = []
    for inst in instances:
        rng = random.Random(f"emb:{inst.id}")
        records.append(
            EmbeddingRecord(
                inst.id, [rng.gauss(0, 1) for _ in range(dim)], "fixture-encoder"
            )
        )
    return records


def make_scores(instances, metric, seed=11):
    records = []
    for inst in instances:
        rng = random.Random(f"{metric}:{seed}:{inst.id}")
        if metric == "themis":
            value = float(rng.randint(1, 5))
        else:
            value = round(rng.random(), 6)
        records.append(ScoreRecord(inst.id, metric, value))
    return records


def make_generations(instances, model_id, template, flip_rate=0.2, garble_rate=0.05, seed=23):
    """Generations reproducing the gold label except for a deterministic
    fraction of flips and a small fraction of unparseable outputs."""
    records = []
    for inst in instances:
        rng = random.Random(f"gen:{model_id}:{seed}:{inst.id}")
        label = inst.label
        if rng.random() < flip_rate:
            label = rng.choice([l for l in THREE_WAY if l is not label])
        explanation = f"generated explanation for {inst.id}"
        if rng.random() < garble_rate:
            raw = "the model rambles with no recognizable structure"
        elif template is Template.NLI:
            raw = render_nli_output(label, explanation)
        else:
            raw = render_json_output(label, explanation)
        records.append(Generation(inst.id, model_id, raw, template))
    return records


def build_mini_corpus(root):
    """Write the full synthetic fixture tree and a run config; returns paths."""
    root.mkdir(parents=True, exist_ok=True)
    source = make_instances(60)
    io.write_instances(root / "source_instances.jsonl", source)
    io.write_scores(
        root / "source_scores.jsonl",
        make_scores(source, "acceptability") + make_scores(source, "first_token_prob"),
    )
    io.write_embeddings(
        root / "source_embeddings.jsonl", make_embeddings(source), 8, "fixture-encoder"
    )

    ood_specs = [
        ("mini-nli", "NLI", Scheme.THREE_WAY),
        ("mini-hdas", "HDAS", Scheme.TWO_WAY),
    ]
    ood_entries = []
    model_cells = {"demo-t5": Template.NLI, "demo-olmo": Template.JSON}
    generations_by_model = {m: {} for m in model_cells}
    for name, task, scheme in ood_specs:
        instances = make_instances(12, dataset=name, split="test", seed=zlib.crc32(name.encode()) % 1000)
        if scheme is Scheme.TWO_WAY:
            instances = [
                inst.with_(
                    label=Label.ENTAILMENT
                    if inst.label is Label.ENTAILMENT
                    else Label.NOT_ENTAILMENT
                )
                for inst in instances
            ]
        io.write_instances(root / f"{name}_instances.jsonl", instances)
        (root / f"{name}_manifest.json").write_text(
            json.dumps(
                {
                    "name": name,
                    "task": task,
                    "scheme": scheme.value,
                    "n_labels": scheme.n_labels,
                    "declared_size": len(instances),
                }
            )
        )
        io.write_scores(
            root / f"{name}_scores.jsonl", make_scores(instances, "acceptability")
        )
        ood_entries.append(
            {
                "manifest": f"{name}_manifest.json",
                "instances": f"{name}_instances.jsonl",
                "scores": f"{name}_scores.jsonl",
            }
        )
        # generations are produced from three-way source labels, matching the
        # generating model's scheme; merging happens at evaluation time
        three_way = make_instances(12, dataset=name, split="test", seed=zlib.crc32(name.encode()) % 1000)
        for model_id, template in model_cells.items():
            path = root / f"{name}_{model_id}_generations.jsonl"
            io.write_generations(
                path, make_generations(three_way, model_id, template)
            )
            generations_by_model[model_id][name] = path.name

    config = {
        "source": "mini-source",
        "seed": 42,
        "selection": {"method": "accept_fastvotek", "shots_per_class": 2, "k": 5},
        "subsets": [1, 2],
        "n_subsets": 2,
        "subset_capacity": 60,
        "source_instances": "source_instances.jsonl",
        "source_scores": "source_scores.jsonl",
        "source_embeddings": "source_embeddings.jsonl",
        "ood_datasets": ood_entries,
        "models": [
            {
                "model_id": model_id,
                "template": template.value,
                "shots": 2,
                "method": "accept_fastvotek",
                "subset": 1,
                "generations": generations_by_model[model_id],
            }
            for model_id, template in model_cells.items()
        ],
    }
    config_path = root / "run_config.json"
    config_path.write_text(json.dumps(config, indent=2))
    return config_path


@pytest.fixture
def mini_corpus(tmp_path):
    return build_mini_corpus(tmp_path / "mini")
