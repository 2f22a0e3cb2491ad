"""Dataset ingestion, per-dataset preprocessing, and subset construction."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from . import io
from .labels import Label, Scheme, merge_to_binary  # noqa: F401 (re-export)
from .records import DatasetSpec, Instance, Subset
from .rng import shuffled

EFEVER_NEI_SENTINEL = "The relevant information about the claim is lacking in the context."


class TieError(ValueError):
    def __init__(self, tied: Sequence[Label]):
        super().__init__(f"majority vote tie between {sorted(l.value for l in tied)}")
        self.tied = tuple(tied)


def load_instances(path, spec: DatasetSpec) -> list[Instance]:
    """Load and validate an instance record file against a dataset spec."""
    instances = io.read_instances(path, scheme=spec.scheme)
    return instances


def _normalize_text(text: str) -> str:
    return re.sub(r"\s+", " ", text.strip().lower())


@dataclass
class FilterReport:
    removed_nei_sentinel: int = 0
    removed_claim_repeat: int = 0

    @property
    def removed(self) -> int:
        return self.removed_nei_sentinel + self.removed_claim_repeat


def filter_efever(
    instances: Sequence[Instance], report: Optional[FilterReport] = None
) -> list[Instance]:
    """Drop instances with heuristically incorrect explanations.

    Two removal rules:
      (a) the explanation is the fixed "information is lacking" sentinel but
          the label is not neutral (NEI);
      (b) the explanation repeats the claim verbatim (after whitespace and
          case normalization) but the label is not entailment (SUPPORTS).

    Per-rule removal counts are accumulated in `report` when given, so both
    the overall removal rate and the per-rule split are auditable.
    """
    kept = []
    sentinel = _normalize_text(EFEVER_NEI_SENTINEL)
    for inst in instances:
        if inst.explanation is None:
            raise ValueError(f"{inst.id}: explanation required for e-FEVER filtering")
        explanation = _normalize_text(inst.explanation)
        if explanation == sentinel and inst.label is not Label.NEUTRAL:
            if report is not None:
                report.removed_nei_sentinel += 1
            continue
        if explanation == _normalize_text(inst.hypothesis) and inst.label is not Label.ENTAILMENT:
            if report is not None:
                report.removed_claim_repeat += 1
            continue
        kept.append(inst)
    return kept


# ---------------------------------------------------------------------------
# per-dataset harmonization rules

_EFEVER_NATIVE = {
    "SUPPORTS": Label.ENTAILMENT,
    "REFUTES": Label.CONTRADICTION,
    "NOT ENOUGH INFO": Label.NEUTRAL,
}

_JOCI_NATIVE = {
    "very likely": Label.ENTAILMENT,
    "likely": Label.NEUTRAL,
    "plausible": Label.NEUTRAL,
    "technically possible": Label.NEUTRAL,
    "impossible": Label.CONTRADICTION,
}


def _with_terminal_punct(sentence: str) -> str:
    sentence = sentence.strip()
    if sentence and sentence[-1] not in ".!?":
        sentence += "."
    return sentence


def _rule_efever(inst: Instance) -> Instance:
    native = str(inst.native)
    if native not in _EFEVER_NATIVE:
        raise ValueError(f"{inst.id}: unknown e-FEVER label {native!r}")
    return inst.with_(label=_EFEVER_NATIVE[native], native=None)


def _rule_addone_rte(inst: Instance) -> Optional[Instance]:
    score = float(inst.native)
    if not (1.0 <= score <= 5.0):
        raise ValueError(f"{inst.id}: AddOneRTE mean score {score} outside [1, 5]")
    if score >= 4.0:
        return inst.with_(label=Label.ENTAILMENT, native=None)
    if score <= 3.0:
        return inst.with_(label=Label.NOT_ENTAILMENT, native=None)
    return None  # strictly between 3 and 4: removed


def _rule_joci(inst: Instance) -> Instance:
    native = str(inst.native).strip().lower()
    if native not in _JOCI_NATIVE:
        raise ValueError(f"{inst.id}: unknown JOCI category {inst.native!r}")
    return inst.with_(label=_JOCI_NATIVE[native], native=None)


def _rule_mpe(inst: Instance) -> Instance:
    premises = inst.premises if inst.premises is not None else (inst.premise,)
    merged = " ".join(_with_terminal_punct(p) for p in premises)
    return inst.with_(premise=merged, premises=None)


def _rule_factcc(inst: Instance) -> Instance:
    native = str(inst.native).strip().lower()
    if native == "factual":
        return inst.with_(label=Label.ENTAILMENT, native=None)
    if native in ("non-factual", "nonfactual", "non_factual"):
        return inst.with_(label=Label.NOT_ENTAILMENT, native=None)
    raise ValueError(f"{inst.id}: unknown FactCC label {inst.native!r}")


def _rule_majority(inst: Instance) -> Instance:
    annotations = [Label(a) for a in inst.native]
    return inst.with_(label=majority_label(annotations), native=None)


HARMONIZE_RULES = {
    "e-fever": _rule_efever,
    "addonerte": _rule_addone_rte,
    "joci": _rule_joci,
    "mpe": _rule_mpe,
    "factcc": _rule_factcc,
    "qags_cnn": _rule_majority,
    "qags_xsum": _rule_majority,
    "xsum_hallucination": _rule_majority,
}


def harmonize(instance: Instance, rule: str) -> Optional[Instance]:
    """Apply a dataset's preprocessing rule; returns None when dropped."""
    key = rule.strip().lower()
    if key not in HARMONIZE_RULES:
        raise ValueError(f"unknown preprocessing rule {rule!r}")
    return HARMONIZE_RULES[key](instance)


def majority_label(annotations: Sequence[Label]) -> Label:
    """Modal label of an annotation list; exact ties are an error."""
    if not annotations:
        raise ValueError("empty annotation list")
    counts = Counter(annotations)
    ranked = counts.most_common()
    if len(ranked) > 1 and ranked[0][1] == ranked[1][1]:
        top = ranked[0][1]
        raise TieError([label for label, n in ranked if n == top])
    return ranked[0][0]


def make_subsets(
    instances: Sequence[Instance], n_subsets: int, capacity: int, seed: int
) -> list[Subset]:
    """Draw pairwise-disjoint subsets of `capacity` ids by a seeded shuffle."""
    ids = [inst.id for inst in instances]
    needed = n_subsets * capacity
    if needed > len(ids):
        raise ValueError(
            f"need {needed} instances for {n_subsets} subsets of {capacity}, "
            f"have {len(ids)} (short by {needed - len(ids)})"
        )
    order = shuffled(ids, seed)
    return [
        Subset(
            index=i + 1,
            instance_ids=tuple(order[i * capacity : (i + 1) * capacity]),
            capacity=capacity,
        )
        for i in range(n_subsets)
    ]
