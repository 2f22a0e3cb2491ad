"""Few-shot fine-tuning sample selection.

Methods: seeded random baseline, ambiguity ranking over first-token label
probabilities, FastVote-k graph selection over sentence embeddings, and the
filtered combinations (acceptability or Themis threshold first, then the
base method), applied independently within each gold-label class.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np

from .labels import Label, Scheme
from .records import EmbeddingRecord, Instance, ScoreRecord
from .rng import derive_seed, shuffled


class Method(str, Enum):
    RANDOM = "random"
    AMBIGUOUS = "ambiguous"
    FASTVOTEK = "fastvotek"
    ACCEPT_AMBIGUOUS = "accept_ambiguous"
    ACCEPT_FASTVOTEK = "accept_fastvotek"
    THEMIS_FASTVOTEK = "themis_fastvotek"


# Filter metric and default threshold per filtered method.
_FILTER_STAGE = {
    Method.ACCEPT_AMBIGUOUS: ("acceptability", 0.3),
    Method.ACCEPT_FASTVOTEK: ("acceptability", 0.3),
    Method.THEMIS_FASTVOTEK: ("themis", 3.0),
}


@dataclass(frozen=True)
class SelectionConfig:
    method: Method
    shots_per_class: int
    k: int = 150
    filter_threshold: Optional[float] = None  # default depends on the filter metric
    vote_discount: float = 10.0
    seed: int = 0
    # "midrange" follows the (max+min)/2 centre; "mean" is the arithmetic-mean
    # variant, exposed because the two readings differ in the literature.
    ambiguity_center: str = "midrange"

    def __post_init__(self):
        if self.shots_per_class < 1:
            raise ValueError("shots_per_class must be >= 1")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.method in _FILTER_STAGE and self.filter_threshold is not None:
            metric, _ = _FILTER_STAGE[self.method]
            lo, hi = (0.0, 1.0) if metric == "acceptability" else (1.0, 5.0)
            if not (lo <= self.filter_threshold <= hi):
                raise ValueError(
                    f"threshold {self.filter_threshold} outside {metric} range [{lo}, {hi}]"
                )


def threshold_filter(
    instances: Sequence[Instance],
    scores: Iterable[ScoreRecord],
    metric: str,
    threshold: float,
) -> list[Instance]:
    """Keep instances whose `metric` score is >= threshold, order preserved.

    Scores strictly below the threshold are removed; the boundary is kept.
    """
    by_id = {s.instance_id: s.value for s in scores if s.metric == metric}
    missing = [inst.id for inst in instances if inst.id not in by_id]
    if missing:
        raise ValueError(f"missing {metric!r} scores for ids: {missing}")
    return [inst for inst in instances if by_id[inst.id] >= threshold]


def ambiguity_rank(
    probs: dict[str, float], center: str = "midrange"
) -> list[str]:
    """Rank ids by ambiguity of their first-token label probability.

    The centre score is (p_max + p_min) / 2 (or the arithmetic mean for the
    "mean" variant); each sample is scored by its absolute distance to the
    centre and ranked ascending, so the most ambiguous sample comes first.
    Ties break by id order.
    """
    if not probs:
        raise ValueError("empty probability map")
    values = np.array(list(probs.values()), dtype=float)
    if not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > 1:
        raise ValueError("probabilities must be finite and within [0, 1]")
    if center == "midrange":
        p_mean = (values.max() + values.min()) / 2.0
    elif center == "mean":
        p_mean = values.mean()
    else:
        raise ValueError(f"unknown ambiguity centre {center!r}")
    return sorted(probs, key=lambda i: (abs(probs[i] - p_mean), i))


def _knn_lists(vectors: np.ndarray, k: int) -> list[np.ndarray]:
    """Each vertex's k most similar others under cosine, ties by index order."""
    norms = np.linalg.norm(vectors, axis=1)
    sim = (vectors @ vectors.T) / np.outer(norms, norms)
    np.fill_diagonal(sim, -np.inf)
    order = np.argsort(-sim, axis=1, kind="stable")
    return [order[v, :k] for v in range(vectors.shape[0])]


def fast_votek(
    embeddings: Sequence[EmbeddingRecord],
    n: int,
    k: int,
    rho: float = 10.0,
) -> list[str]:
    """Greedy discounted-vote selection on the directed k-NN cosine graph.

    Each vertex votes for its k nearest neighbors; an unselected candidate's
    score is the sum over its voters v of rho^(-|knn(v) & selected|), so
    votes from neighborhoods already covered by the selection are discounted.
    The highest-scoring candidate is appended each round (ties: smallest id).
    """
    if not embeddings:
        raise ValueError("no embeddings")
    if not (1 <= n <= len(embeddings)):
        raise ValueError(f"n={n} out of range for {len(embeddings)} embeddings")
    if not (1 <= k <= len(embeddings) - 1):
        raise ValueError(f"k={k} out of range for {len(embeddings)} embeddings")

    records = sorted(embeddings, key=lambda r: r.instance_id)
    ids = [r.instance_id for r in records]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate instance ids in embeddings")
    dims = {r.vector.shape[0] for r in records}
    if len(dims) != 1:
        raise ValueError(f"mixed embedding dimensions: {sorted(dims)}")
    vectors = np.stack([r.vector for r in records])
    zero = [ids[i] for i in np.flatnonzero(np.linalg.norm(vectors, axis=1) == 0)]
    if zero:
        raise ValueError(f"zero vectors (cosine undefined) for ids: {zero}")

    knn = _knn_lists(vectors, k)
    voters: list[list[int]] = [[] for _ in ids]
    for v, neighbors in enumerate(knn):
        for u in neighbors:
            voters[u].append(v)

    selected: list[int] = []
    selected_mask = np.zeros(len(ids), dtype=bool)
    while len(selected) < n:
        discount = np.array(
            [rho ** -float(selected_mask[nb].sum()) for nb in knn]
        )
        best_u, best_score = -1, -np.inf
        for u in range(len(ids)):
            if selected_mask[u]:
                continue
            score = float(discount[voters[u]].sum()) if voters[u] else 0.0
            if score > best_score:
                best_u, best_score = u, score
        selected.append(best_u)
        selected_mask[best_u] = True
    return [ids[u] for u in selected]


def random_select(ids: Sequence[str], n: int, seed: int) -> list[str]:
    """Seeded uniform sample without replacement (shuffle prefix)."""
    if n > len(ids):
        raise ValueError(f"cannot sample {n} from {len(ids)} ids")
    return shuffled(ids, seed)[:n]


def select_per_class(
    instances: Sequence[Instance],
    config: SelectionConfig,
    scores: Iterable[ScoreRecord] = (),
    embeddings: Sequence[EmbeddingRecord] = (),
    scheme: Optional[Scheme] = None,
) -> list[str]:
    """Select exactly `shots_per_class` ids per gold-label class.

    The optional filter stage (for accept_* / themis_* methods) runs first
    over the whole candidate pool; the base method then runs independently
    within each class. For FastVote-k the neighbor count is capped at the
    class size minus one. Classes concatenate in fixed scheme order.
    """
    scores = list(scores)
    if config.method in _FILTER_STAGE:
        metric, default = _FILTER_STAGE[config.method]
        threshold = config.filter_threshold if config.filter_threshold is not None else default
        candidates = threshold_filter(instances, scores, metric, threshold)
    else:
        candidates = list(instances)

    unlabeled = [inst.id for inst in candidates if inst.label is None]
    if unlabeled:
        raise ValueError(f"candidates without gold labels: {unlabeled}")

    if scheme is None:
        present = {inst.label for inst in candidates}
        scheme = Scheme.TWO_WAY if Label.NOT_ENTAILMENT in present else Scheme.THREE_WAY

    m = config.shots_per_class
    probs = {s.instance_id: s.value for s in scores if s.metric == "first_token_prob"}
    emb_by_id = {e.instance_id: e for e in embeddings}

    selected: list[str] = []
    for label in scheme.labels:
        members = [inst for inst in candidates if inst.label is label]
        if len(members) < m:
            raise ValueError(
                f"class {label.value!r}: only {len(members)} candidates after "
                f"filtering, need {m}"
            )
        member_ids = [inst.id for inst in members]
        base = config.method
        if base in (Method.AMBIGUOUS, Method.ACCEPT_AMBIGUOUS):
            missing = [i for i in member_ids if i not in probs]
            if missing:
                raise ValueError(f"missing first_token_prob for ids: {missing}")
            ranked = ambiguity_rank(
                {i: probs[i] for i in member_ids}, center=config.ambiguity_center
            )
            chosen = ranked[:m]
        elif base in (Method.FASTVOTEK, Method.ACCEPT_FASTVOTEK, Method.THEMIS_FASTVOTEK):
            missing = [i for i in member_ids if i not in emb_by_id]
            if missing:
                raise ValueError(f"missing embeddings for ids: {missing}")
            class_embeddings = [emb_by_id[i] for i in member_ids]
            k = min(config.k, len(class_embeddings) - 1)
            chosen = fast_votek(class_embeddings, m, k, rho=config.vote_discount)
        elif base is Method.RANDOM:
            chosen = random_select(
                member_ids, m, derive_seed(config.seed, "class", label.value)
            )
        else:  # pragma: no cover
            raise ValueError(f"unknown method {config.method}")
        selected.extend(chosen)
    return selected
