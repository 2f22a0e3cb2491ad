"""Label schemes, normalization, and the three-to-two-way merge."""

from __future__ import annotations

import re
from enum import Enum


class Label(str, Enum):
    ENTAILMENT = "entailment"
    NEUTRAL = "neutral"
    CONTRADICTION = "contradiction"
    NOT_ENTAILMENT = "not_entailment"

    def __str__(self) -> str:
        return self.value


class Scheme(str, Enum):
    THREE_WAY = "three_way"
    TWO_WAY = "two_way"

    @property
    def labels(self) -> tuple[Label, ...]:
        """Members of the scheme, in the canonical class order used everywhere."""
        if self is Scheme.THREE_WAY:
            return (Label.ENTAILMENT, Label.NEUTRAL, Label.CONTRADICTION)
        return (Label.ENTAILMENT, Label.NOT_ENTAILMENT)

    @property
    def n_labels(self) -> int:
        return len(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels


# Surface forms seen in model generations and native dataset annotations.
_ALIASES = {
    "entailment": Label.ENTAILMENT,
    "entailed": Label.ENTAILMENT,
    "supports": Label.ENTAILMENT,
    "contradiction": Label.CONTRADICTION,
    "refutes": Label.CONTRADICTION,
    "neutral": Label.NEUTRAL,
    "not enough info": Label.NEUTRAL,
    "nei": Label.NEUTRAL,
    "not_entailment": Label.NOT_ENTAILMENT,
    "not entailment": Label.NOT_ENTAILMENT,
    "non-entailment": Label.NOT_ENTAILMENT,
}

_PUNCT = re.compile(r"[^\w\s-]")


def normalize_label(text: str) -> Label | None:
    """Map a free-form label string to a Label, or None if unrecognized.

    Lowercases, strips punctuation, and accepts common aliases so that
    drifting surface forms in generations still resolve.
    """
    cleaned = _PUNCT.sub("", text.strip().lower())
    cleaned = re.sub(r"[\s_-]+", " ", cleaned).strip()
    return _ALIASES.get(cleaned) or _ALIASES.get(cleaned.replace(" ", "_"))


def parse_label(text: str, scheme: Scheme) -> Label:
    """Strictly parse a label string for ingestion; raises on unknown values."""
    label = normalize_label(text)
    if label is None:
        raise ValueError(f"unknown label string: {text!r}")
    if label not in scheme:
        raise ValueError(f"label {label.value!r} not in scheme {scheme.value!r}")
    return label


def merge_to_binary(label: Label) -> Label:
    """Collapse the three-way scheme onto {entailment, not_entailment}.

    neutral and contradiction both map to not_entailment; two-way labels
    pass through unchanged so the operation is idempotent.
    """
    if label in (Label.NEUTRAL, Label.CONTRADICTION):
        return Label.NOT_ENTAILMENT
    return label
