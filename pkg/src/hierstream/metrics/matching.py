"""Interval matching metrics: tIoU, optimal-matching F1, greedy matching,
and emission-delay statistics.

F1 follows the optimal one-to-one matching convention: build the full
gt x pred tIoU profit matrix, take the assignment maximizing total tIoU,
then count matched pairs at or above the threshold as true positives and
report 2*tp / (|gt| + |pred|). Matching is threshold-independent, so one
match result serves every threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ..core import Interval
from ..detector import Emission
from .assignment import solve_max_profit

# F1 when both sides are empty; Algorithm-style 2*tp/(a+p) would divide by
# zero, and two empty sets agree perfectly.
EMPTY_VS_EMPTY_F1 = 1.0


def tiou(a: Interval, b: Interval) -> float:
    """Temporal intersection over union; 0 when the union has zero length."""
    inter = max(0.0, min(a.end, b.end) - max(a.start, b.start))
    union = a.length + b.length - inter
    if union <= 0:
        return 0.0
    return inter / union


def _tiou_fraction(a: Interval, b: Interval) -> Fraction:
    a_s, a_e = Fraction(a.start), Fraction(a.end)
    b_s, b_e = Fraction(b.start), Fraction(b.end)
    inter = max(Fraction(0), min(a_e, b_e) - max(a_s, b_s))
    union = (a_e - a_s) + (b_e - b_s) - inter
    if union <= 0:
        return Fraction(0)
    return inter / union


@dataclass(frozen=True)
class MatchResult:
    """Matched (gt, pred, tIoU) pairs plus threshold-dependent counts.

    In optimal-matching mode the pairs form a partial bijection; in greedy
    mode several predictions may share one ground-truth index.
    """

    pairs: tuple[tuple[int, int, float], ...]
    tp: int
    fn: int
    fp: int

    @property
    def f1(self) -> float:
        denom = (self.tp + self.fn) + (self.tp + self.fp)
        if denom == 0:
            return EMPTY_VS_EMPTY_F1
        return 2.0 * self.tp / denom


def hungarian_match(gt: Sequence[Interval], pred: Sequence[Interval]) -> list[tuple[int, int, Fraction]]:
    """Optimal one-to-one matching by total tIoU, exact and deterministic.
    Only pairs with positive overlap are returned."""
    if not gt or not pred:
        return []
    profit = [[_tiou_fraction(g, p) for p in pred] for g in gt]
    pairs = solve_max_profit(profit)
    return [(i, j, profit[i][j]) for i, j in pairs]


def hungarian_f1(
    gt: Sequence[Interval], pred: Sequence[Interval], threshold: float
) -> tuple[float, MatchResult]:
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    matched = hungarian_match(gt, pred)
    thr = Fraction(threshold)
    tp = sum(1 for _, _, t in matched if t >= thr)
    result = MatchResult(
        pairs=tuple((i, j, float(t)) for i, j, t in matched),
        tp=tp,
        fn=len(gt) - tp,
        fp=len(pred) - tp,
    )
    return result.f1, result


def hungarian_f1_corpus(
    videos: Sequence[tuple[Sequence[Interval], Sequence[Interval]]], threshold: float
) -> float:
    """Micro-averaged F1 over per-video matchings (instances never match
    across videos)."""
    total_tp, total_gt, total_pred = 0, 0, 0
    for gt, pred in videos:
        _, result = hungarian_f1(gt, pred, threshold)
        total_tp += result.tp
        total_gt += len(gt)
        total_pred += len(pred)
    if total_gt + total_pred == 0:
        return EMPTY_VS_EMPTY_F1
    return 2.0 * total_tp / (total_gt + total_pred)


def greedy_match(
    gt: Sequence[Interval], pred: Sequence[Interval], threshold: float
) -> MatchResult:
    """Each prediction takes the ground truth with the highest tIoU (ties go
    to the earliest), kept when it clears the threshold. Several predictions
    may claim the same ground truth."""
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    pairs = []
    matched_gt = set()
    for j, p in enumerate(pred):
        if not gt:
            continue
        best_i = max(range(len(gt)), key=lambda i: (tiou(gt[i], p), -i))
        best = tiou(gt[best_i], p)
        if best >= threshold:
            pairs.append((best_i, j, best))
            matched_gt.add(best_i)
    return MatchResult(
        pairs=tuple(pairs),
        tp=len(pairs),
        fn=len(gt) - len(matched_gt),
        fp=len(pred) - len(pairs),
    )


@dataclass(frozen=True)
class DelayStats:
    """Emission-delay summary over true positives: mean absolute gap between
    emission time and the matched ground-truth end, plus the signed mean."""

    mean_abs: float
    mean_signed: float
    count: int


def _tp_gaps(gt: Sequence[Interval], pred: Sequence[Emission], threshold: float) -> list[float]:
    intervals = [e.instance.interval for e in pred]
    thr = Fraction(threshold)
    return [
        pred[j].emit_time - gt[i].end
        for i, j, t in hungarian_match(gt, intervals)
        if t >= thr
    ]


def aedt(
    gt: Sequence[Interval], pred: Sequence[Emission], threshold: float
) -> DelayStats | None:
    """Average emission delay over optimal-matching TPs at the threshold.
    Returns None when there are no true positives."""
    gaps = _tp_gaps(gt, pred, threshold)
    if not gaps:
        return None
    return DelayStats(
        mean_abs=sum(abs(g) for g in gaps) / len(gaps),
        mean_signed=sum(gaps) / len(gaps),
        count=len(gaps),
    )


def aedt_corpus(
    videos: Sequence[tuple[Sequence[Interval], Sequence[Emission]]], threshold: float
) -> DelayStats | None:
    """Pooled emission-delay stats across videos."""
    gaps: list[float] = []
    for gt, pred in videos:
        gaps.extend(_tp_gaps(gt, pred, threshold))
    if not gaps:
        return None
    return DelayStats(
        mean_abs=sum(abs(g) for g in gaps) / len(gaps),
        mean_signed=sum(gaps) / len(gaps),
        count=len(gaps),
    )
