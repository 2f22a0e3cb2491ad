"""Core record types shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .labels import Label, Scheme


class Task(str, Enum):
    NLI = "NLI"
    FC = "FC"
    HDAS = "HDAS"


@dataclass(frozen=True)
class Instance:
    """One hypothesis/premise pair with optional gold label and explanation."""

    id: str
    dataset: str
    split: str
    hypothesis: str
    premise: str
    label: Optional[Label] = None
    explanation: Optional[str] = None
    # Native annotation before harmonization: an ordinal score, a native
    # label string, or a list of per-annotator label strings.
    native: object = None
    # Unmerged premise sentences (multi-premise datasets only).
    premises: Optional[tuple[str, ...]] = None

    def with_(self, **changes) -> "Instance":
        return replace(self, **changes)


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    task: Task
    scheme: Scheme
    n_labels: int
    declared_size: Optional[int] = None
    preprocessing_rule: Optional[str] = None
    source_uri: Optional[str] = None

    def __post_init__(self):
        if self.n_labels != self.scheme.n_labels:
            raise ValueError(
                f"{self.name}: n_labels={self.n_labels} inconsistent with "
                f"scheme {self.scheme.value} ({self.scheme.n_labels} labels)"
            )


@dataclass(frozen=True)
class Subset:
    index: int
    instance_ids: tuple[str, ...]
    capacity: int

    def __post_init__(self):
        if len(set(self.instance_ids)) != len(self.instance_ids):
            raise ValueError(f"subset {self.index}: duplicate instance ids")
        if len(self.instance_ids) != self.capacity:
            raise ValueError(
                f"subset {self.index}: {len(self.instance_ids)} ids != capacity {self.capacity}"
            )


# Declared value ranges per score metric; checked on ingestion.
METRIC_RANGES = {
    "acceptability": (0.0, 1.0),
    "first_token_prob": (0.0, 1.0),
    "themis": (1.0, 5.0),
}


@dataclass(frozen=True)
class ScoreRecord:
    instance_id: str
    metric: str
    value: float

    def __post_init__(self):
        if not np.isfinite(self.value):
            raise ValueError(f"{self.instance_id}: non-finite score {self.value}")
        bounds = METRIC_RANGES.get(self.metric)
        if bounds is not None and not (bounds[0] <= self.value <= bounds[1]):
            raise ValueError(
                f"{self.instance_id}: {self.metric} value {self.value} outside {bounds}"
            )
        if self.metric == "themis" and self.value not in (1, 2, 3, 4, 5):
            raise ValueError(
                f"{self.instance_id}: themis rating {self.value} not in {{1..5}}"
            )


@dataclass(frozen=True)
class EmbeddingRecord:
    instance_id: str
    vector: np.ndarray
    model_id: str

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=float)
        if not np.all(np.isfinite(vec)):
            raise ValueError(f"{self.instance_id}: non-finite embedding values")
        object.__setattr__(self, "vector", vec)


class Template(str, Enum):
    NLI = "nli_template"
    JSON = "json_template"


@dataclass(frozen=True)
class Generation:
    instance_id: str
    model_id: str
    raw_text: str
    template: Template


class ParseStatus(str, Enum):
    CLEAN = "clean"
    FALLBACK = "fallback"
    NONE = "none"


@dataclass(frozen=True)
class ParsedOutput:
    instance_id: str
    label: Optional[Label]
    explanation: Optional[str]
    parse_status: ParseStatus

    def __post_init__(self):
        both_absent = self.label is None and self.explanation is None
        if (self.parse_status is ParseStatus.NONE) != both_absent:
            raise ValueError(
                f"{self.instance_id}: parse_status={self.parse_status.value} "
                f"inconsistent with label/explanation presence"
            )


class Answer(str, Enum):
    YES = "Yes"
    WEAKLY_YES = "WeaklyYes"
    WEAKLY_NO = "WeaklyNo"
    NO = "No"


SHORTCOMINGS = frozenset(
    {"no_sense", "insufficient", "irrelevant", "trivial", "hallucinated", "none"}
)


@dataclass(frozen=True)
class HumanJudgment:
    instance_id: str
    evaluator_id: str
    answer: Answer
    shortcomings: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        unknown = set(self.shortcomings) - SHORTCOMINGS
        if unknown:
            raise ValueError(f"unknown shortcomings: {sorted(unknown)}")
        if "none" in self.shortcomings and self.answer is not Answer.YES:
            raise ValueError('"none" shortcoming requires answer Yes')


@dataclass(frozen=True)
class ModelPoint:
    model_id: str
    f1: float
    acceptability: float

    def __post_init__(self):
        if not (np.isfinite(self.f1) and np.isfinite(self.acceptability)):
            raise ValueError(f"{self.model_id}: non-finite coordinates")


def ids_of(items: Sequence) -> list[str]:
    return [x.id if isinstance(x, Instance) else x.instance_id for x in items]
