"""Corpus-level evaluation: localization F1, description-aware F1, emission
delay, and goal accuracy assembled into one JSON-friendly report."""

from __future__ import annotations

from typing import Mapping, Sequence

from .core import AnnotationSet, HierarchyLevel
from .detector import Emission
from .metrics.embedding import Embedder
from .metrics.matching import aedt_corpus, hungarian_f1_corpus
from .metrics.semantic import goal_accuracy, topk_f1_corpus

LEVEL_KEYS = {HierarchyLevel.SUBSTEP: "substep", HierarchyLevel.STEP: "step"}


def evaluate_corpus(
    annotations: Sequence[AnnotationSet],
    emissions_by_video: Mapping[str, Sequence[Emission]],
    goals_by_video: Mapping[str, str] | None = None,
    thresholds: Sequence[float] = (0.3, 0.5, 0.7),
    k: int = 5,
    embedder: Embedder | None = None,
    aedt_threshold: float = 0.5,
) -> dict:
    """Evaluate predicted emissions against annotations, per level.

    Description-aware F1 is reported only when predictions carry
    descriptions and an embedder is supplied; goal accuracy only when a
    goal text exists for every annotated video.
    """
    report: dict = {"thresholds": list(thresholds), "levels": {}}

    for level, key in LEVEL_KEYS.items():
        per_video = []
        instance_pairs = []
        corpus: list[str] = []
        any_description = False
        for a in annotations:
            gt_instances = list(a.at_level(level))
            corpus.extend(i.description for i in gt_instances)
            preds = [
                e for e in emissions_by_video.get(a.video_id, [])
                if e.instance.level == level
            ]
            any_description = any_description or any(
                e.instance.description for e in preds
            )
            per_video.append(([i.interval for i in gt_instances], preds))
            instance_pairs.append((gt_instances, [e.instance for e in preds]))

        entry: dict = {
            "gt_instances": sum(len(g) for g, _ in instance_pairs),
            "pred_instances": sum(len(p) for _, p in instance_pairs),
            "f1_loc": {
                str(t): hungarian_f1_corpus(
                    [(g, [e.instance.interval for e in p]) for g, p in per_video], t
                )
                for t in thresholds
            },
        }

        if any_description and embedder is not None and corpus:
            entry["f1_loc_desc"] = {
                str(t): topk_f1_corpus(instance_pairs, t, k, embedder, corpus)
                for t in thresholds
            }
            entry["topk"] = k
        else:
            entry["f1_loc_desc"] = None

        delay = aedt_corpus(per_video, aedt_threshold)
        entry["aedt"] = (
            None if delay is None else {
                "threshold": aedt_threshold,
                "mean_abs": delay.mean_abs,
                "mean_signed": delay.mean_signed,
                "count": delay.count,
            }
        )
        report["levels"][key] = entry

    if goals_by_video and embedder is not None:
        with_goals = [a for a in annotations if a.video_id in goals_by_video]
        if with_goals and len(with_goals) == len(annotations):
            report["goal_accuracy"] = goal_accuracy(
                [goals_by_video[a.video_id] for a in annotations],
                [a.goal for a in annotations],
                embedder,
            )
        else:
            report["goal_accuracy"] = None
    else:
        report["goal_accuracy"] = None

    return report
