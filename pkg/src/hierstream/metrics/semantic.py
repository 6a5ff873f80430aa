"""Description-aware metrics: top-k F1 and goal accuracy.

Top-k F1 keeps the optimal interval matching and adds a semantic gate: a
threshold-passing pair stays a true positive only if the matched ground
truth description ranks within the top k of the whole evaluation corpus
when sorted by cosine similarity to the prediction's embedding. Goal
accuracy is top-1 retrieval of the video's own goal among all goal texts.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from ..core import ActionInstance
from .embedding import Embedder
from .matching import EMPTY_VS_EMPTY_F1, hungarian_match


def description_rank(
    pred_vector: np.ndarray,
    corpus_vectors: np.ndarray,
    corpus: Sequence[str],
    target_text: str,
) -> int:
    """1-based rank of target_text in the corpus ordered by similarity to
    the prediction; similarity ties break by corpus order."""
    sims = corpus_vectors @ pred_vector
    order = sorted(range(len(corpus)), key=lambda i: (-sims[i], i))
    for rank, idx in enumerate(order, start=1):
        if corpus[idx] == target_text:
            return rank
    raise ValueError(f"description not present in corpus: {target_text!r}")


def topk_f1(
    gt: Sequence[ActionInstance],
    pred: Sequence[ActionInstance],
    threshold: float,
    k: int,
    embedder: Embedder,
    corpus: Sequence[str],
) -> float:
    """Optimal-matching F1 with the top-k description constraint."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not corpus:
        raise ValueError("empty description corpus")
    if not gt and not pred:
        return EMPTY_VS_EMPTY_F1

    matched = hungarian_match(
        [g.interval for g in gt], [p.interval for p in pred]
    )
    thr = Fraction(threshold)
    candidates = [(i, j) for i, j, t in matched if t >= thr]

    tp = 0
    if candidates:
        corpus_vectors = embedder.embed(list(corpus))
        pred_vectors = embedder.embed([pred[j].description for _, j in candidates])
        for vec, (i, _j) in zip(pred_vectors, candidates):
            rank = description_rank(vec, corpus_vectors, corpus, gt[i].description)
            if rank <= k:
                tp += 1
    return 2.0 * tp / (len(gt) + len(pred))


def topk_f1_corpus(
    videos: Sequence[tuple[Sequence[ActionInstance], Sequence[ActionInstance]]],
    threshold: float,
    k: int,
    embedder: Embedder,
    corpus: Sequence[str],
) -> float:
    """Micro-averaged top-k F1 over per-video matchings."""
    if not corpus:
        raise ValueError("empty description corpus")
    corpus_vectors = embedder.embed(list(corpus))
    thr = Fraction(threshold)
    total_tp, total_gt, total_pred = 0, 0, 0
    for gt, pred in videos:
        total_gt += len(gt)
        total_pred += len(pred)
        matched = hungarian_match([g.interval for g in gt], [p.interval for p in pred])
        candidates = [(i, j) for i, j, t in matched if t >= thr]
        if not candidates:
            continue
        pred_vectors = embedder.embed([pred[j].description for _, j in candidates])
        for vec, (i, _j) in zip(pred_vectors, candidates):
            rank = description_rank(vec, corpus_vectors, corpus, gt[i].description)
            if rank <= k:
                total_tp += 1
    if total_gt + total_pred == 0:
        return EMPTY_VS_EMPTY_F1
    return 2.0 * total_tp / (total_gt + total_pred)


def goal_accuracy(
    pred_goals: Sequence[str], gt_goals: Sequence[str], embedder: Embedder
) -> float:
    """Fraction of videos whose own goal text is the nearest goal in the
    split to the predicted goal. Similarity ties that include the own goal
    count as correct."""
    if not gt_goals:
        raise ValueError("empty goal corpus")
    if len(pred_goals) != len(gt_goals):
        raise ValueError(
            f"{len(pred_goals)} predictions vs {len(gt_goals)} ground truths"
        )
    gt_vectors = embedder.embed(list(gt_goals))
    pred_vectors = embedder.embed(list(pred_goals))
    sims = pred_vectors @ gt_vectors.T
    correct = sum(
        1 for i in range(len(pred_goals)) if sims[i, i] >= sims[i].max() - 1e-12
    )
    return correct / len(pred_goals)
