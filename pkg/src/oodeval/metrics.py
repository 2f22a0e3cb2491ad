"""Evaluation statistics: per-class/macro F1, balanced accuracy, human-score
aggregation, Spearman correlation, score-range binning, Pareto fronts, and
evaluation-instance sampling."""

from __future__ import annotations

import math

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as scipy_stats

from .labels import Label
from .records import Answer, HumanJudgment, ModelPoint, ParsedOutput
from .rng import shuffled

# Predictions without a recognizable label count as one distinct wrong class:
# never a true positive, but they still consume recall from the gold class.
UNPARSED = "<unparsed>"


def _check_lengths(preds: Sequence, golds: Sequence) -> None:
    if len(preds) != len(golds):
        raise ValueError(f"length mismatch: {len(preds)} preds vs {len(golds)} golds")


def _key(label) -> str:
    if label is None:
        return UNPARSED
    return label.value if isinstance(label, Label) else str(label)


def per_class_f1(preds: Sequence, golds: Sequence) -> dict[str, float]:
    """F1 per class over all classes present in preds or golds (gold classes
    and real predicted classes; the unparsed pseudo-class is excluded)."""
    _check_lengths(preds, golds)
    pred_keys = [_key(p) for p in preds]
    gold_keys = [_key(g) for g in golds]
    classes = sorted((set(pred_keys) | set(gold_keys)) - {UNPARSED})
    result = {}
    for cls in classes:
        tp = sum(1 for p, g in zip(pred_keys, gold_keys) if p == cls and g == cls)
        fp = sum(1 for p, g in zip(pred_keys, gold_keys) if p == cls and g != cls)
        fn = sum(1 for p, g in zip(pred_keys, gold_keys) if p != cls and g == cls)
        result[cls] = (2 * tp / (2 * tp + fp + fn)) if (2 * tp + fp + fn) else 0.0
    return result


def macro_f1(preds: Sequence, golds: Sequence) -> float:
    """Unweighted mean of per-class F1 over classes present in the golds."""
    _check_lengths(preds, golds)
    scores = per_class_f1(preds, golds)
    gold_classes = sorted({_key(g) for g in golds})
    return sum(scores[c] for c in gold_classes) / len(gold_classes)


def balanced_accuracy(preds: Sequence, golds: Sequence) -> float:
    """Unweighted mean of per-class recall over classes present in the golds."""
    _check_lengths(preds, golds)
    if not golds:
        raise ValueError("empty input")
    pred_keys = [_key(p) for p in preds]
    gold_keys = [_key(g) for g in golds]
    recalls = []
    for cls in sorted(set(gold_keys)):
        total = sum(1 for g in gold_keys if g == cls)
        tp = sum(1 for p, g in zip(pred_keys, gold_keys) if p == cls and g == cls)
        recalls.append(tp / total)
    return sum(recalls) / len(recalls)


ANSWER_WEIGHTS = {
    Answer.YES: 3,  # numerators over 3: Yes 3/3, WeaklyYes 2/3, WeaklyNo 1/3, No 0/3
    Answer.WEAKLY_YES: 2,
    Answer.WEAKLY_NO: 1,
    Answer.NO: 0,
}


def aggregate_human(judgments: Sequence[HumanJudgment]) -> float:
    """Mean of the three evaluators' answer weights; exact on the 1/9 grid."""
    if len(judgments) != 3:
        raise ValueError(f"need exactly 3 judgments, got {len(judgments)}")
    ids = {j.instance_id for j in judgments}
    if len(ids) != 1:
        raise ValueError(f"judgments span multiple instances: {sorted(ids)}")
    return sum(ANSWER_WEIGHTS[j.answer] for j in judgments) / 9


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Spearman rank correlation with average ranks for ties.

    Returns (rho, two-sided p-value); the p-value uses the t-distribution
    approximation, adequate at the sample sizes evaluated here.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 pairs")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ValueError("constant input vector: rho undefined")
    rx = _average_ranks(x)
    ry = _average_ranks(y)
    rho = float(np.corrcoef(rx, ry)[0, 1])
    if abs(rho) >= 1.0:
        return (math.copysign(1.0, rho), 0.0)
    t = rho * math.sqrt((n - 2) / (1 - rho * rho))
    p = 2 * float(scipy_stats.t.sf(abs(t), n - 2))
    return rho, p


SIGNIFICANCE_LEVEL = 1e-3


@dataclass(frozen=True)
class ScoreBin:
    lower: float
    upper: float
    balanced_accuracy: Optional[float]
    sample_fraction: float


def bin_by_score(
    scores: Sequence[float],
    preds: Sequence,
    golds: Sequence,
    bin_width: float = 0.1,
) -> list[ScoreBin]:
    """Balanced accuracy and sample fraction per score range over [0, 1].

    Bins are right-open except the last, which includes 1.0. Empty bins carry
    no accuracy and fraction 0.
    """
    _check_lengths(scores, preds)
    _check_lengths(preds, golds)
    n_bins = round(1.0 / bin_width)
    if abs(n_bins * bin_width - 1.0) > 1e-9 or n_bins < 1:
        raise ValueError(f"1/bin_width must be integral, got width {bin_width}")
    if not scores:
        raise ValueError("empty input")
    if min(scores) < 0 or max(scores) > 1:
        raise ValueError("scores must lie in [0, 1]")

    buckets: list[list[int]] = [[] for _ in range(n_bins)]
    for idx, score in enumerate(scores):
        b = min(int(score / bin_width), n_bins - 1)
        buckets[b].append(idx)

    total = len(scores)
    bins = []
    for b, members in enumerate(buckets):
        accuracy = None
        if members:
            accuracy = balanced_accuracy(
                [preds[i] for i in members], [golds[i] for i in members]
            )
        bins.append(
            ScoreBin(
                lower=b * bin_width,
                upper=(b + 1) * bin_width,
                balanced_accuracy=accuracy,
                sample_fraction=len(members) / total,
            )
        )
    return bins


def pareto_front(points: Sequence[ModelPoint]) -> list[ModelPoint]:
    """Points not strictly dominated in both coordinates, in input order."""
    if not points:
        raise ValueError("empty point list")
    return [
        p
        for p in points
        if not any(q.f1 > p.f1 and q.acceptability > p.acceptability for q in points)
    ]


def sample_eval_instances(
    parsed: Sequence[ParsedOutput],
    golds: dict[str, Label],
    per_class: int,
    seed: int,
) -> list[str]:
    """Seeded shuffle, then the first `per_class` correctly predicted ids per
    gold class, concatenated in sorted class order."""
    order = shuffled([p.instance_id for p in parsed], seed)
    by_id = {p.instance_id: p for p in parsed}
    correct: dict[str, list[str]] = {}
    for instance_id in order:
        output = by_id[instance_id]
        gold = golds.get(instance_id)
        if gold is not None and output.label is gold:
            correct.setdefault(gold.value, []).append(instance_id)

    selected = []
    for cls in sorted({g.value for g in golds.values()}):
        pool = correct.get(cls, [])
        if len(pool) < per_class:
            raise ValueError(
                f"class {cls!r}: only {len(pool)} correct predictions, need {per_class}"
            )
        selected.extend(pool[:per_class])
    return selected


def unparsed_rate(parsed: Sequence[ParsedOutput]) -> float:
    """Fraction of outputs with no recognizable label (reported separately)."""
    if not parsed:
        return 0.0
    return sum(1 for p in parsed if p.label is None) / len(parsed)
