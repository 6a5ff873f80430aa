"""Time-indexed store of frame references and past predictions.

The streaming loop inserts one entry per frame (stored only while some
instance is ongoing) and commits a prediction after every describer call.
Retrieval queries assemble the frames and prior text that one describer
call needs:

 - substep queries sample stored frames at 1.0 s spacing and carry the
   long-form predictions of earlier substeps inside the current step;
 - step queries sample frames belonging to detected substeps at 3.3 s
   spacing and carry up to the 10 most recent step predictions;
 - goal queries return one representative frame per described step plus
   every step's short-form prediction.

After a step is described, its stored frames collapse to the single frame
closest to the step midpoint; that representative is what goal queries see.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .core import ActionInstance, HierarchyLevel, Interval

SUBSTEP_FRAME_SPACING = 1.0
STEP_FRAME_SPACING = 3.3
MAX_STEP_HISTORY = 10


@dataclass(frozen=True)
class FrameRef:
    timestamp: float
    member_levels: frozenset[HierarchyLevel]
    handle: str


@dataclass(frozen=True)
class Prediction:
    level: HierarchyLevel
    interval: Interval
    short_form: str
    long_form: str
    created_at: float

    def __post_init__(self) -> None:
        if self.level != HierarchyLevel.GOAL and self.created_at < self.interval.end:
            raise ValueError(
                f"prediction created at {self.created_at} before its interval end "
                f"{self.interval.end}"
            )


@dataclass(frozen=True)
class RetrievalBundle:
    frames: tuple[FrameRef, ...]
    prior_predictions: tuple[str, ...]  # oldest first
    level: HierarchyLevel
    interval: Interval


def _spaced(frames: list[FrameRef], spacing: float) -> list[FrameRef]:
    """Greedy selection from the start: take the earliest frame, then the
    earliest frame at least `spacing` seconds after the last pick."""
    picked: list[FrameRef] = []
    for ref in frames:
        if not picked or ref.timestamp >= picked[-1].timestamp + spacing:
            picked.append(ref)
    return picked


class ContextMemory:
    """Single-writer store; queries are pure reads."""

    def __init__(self) -> None:
        self._frames: list[FrameRef] = []
        self._predictions: list[Prediction] = []
        self._last_seen: float | None = None
        # Start of the step instance currently ongoing, derived from the
        # membership of observed frames; None while no step is ongoing.
        self._current_step_start: float | None = None

    # ------------------------------------------------------------------
    # writes
    # ------------------------------------------------------------------

    def insert_frame(
        self, timestamp: float, member_levels: set[HierarchyLevel], handle: str
    ) -> None:
        if self._last_seen is not None and timestamp <= self._last_seen:
            raise ValueError(f"out-of-order insert at {timestamp} after {self._last_seen}")
        self._last_seen = timestamp

        if HierarchyLevel.STEP in member_levels:
            if self._current_step_start is None:
                self._current_step_start = timestamp
        else:
            self._current_step_start = None

        if member_levels:
            self._frames.append(FrameRef(timestamp, frozenset(member_levels), handle))

    def commit_prediction(self, p: Prediction) -> None:
        self._predictions.append(p)
        if p.level == HierarchyLevel.STEP:
            self._prune_to_representative(p.interval)

    def _prune_to_representative(self, interval: Interval) -> None:
        inside = [f for f in self._frames if interval.start <= f.timestamp <= interval.end]
        if not inside:
            return
        mid = (interval.start + interval.end) / 2.0
        rep = min(inside, key=lambda f: (abs(f.timestamp - mid), f.timestamp))
        self._frames = [
            f for f in self._frames
            if f is rep or not (interval.start <= f.timestamp <= interval.end)
        ]

    # ------------------------------------------------------------------
    # reads
    # ------------------------------------------------------------------

    @property
    def frame_count(self) -> int:
        return len(self._frames)

    @property
    def predictions(self) -> tuple[Prediction, ...]:
        return tuple(self._predictions)

    def _frames_within(self, interval: Interval) -> list[FrameRef]:
        return [f for f in self._frames if interval.start <= f.timestamp <= interval.end]

    def query(self, instance: ActionInstance) -> RetrievalBundle:
        iv = instance.interval
        if instance.level != HierarchyLevel.GOAL:
            if self._last_seen is None or iv.end > self._last_seen:
                raise ValueError(
                    f"memory covers up to {self._last_seen}, queried interval ends at {iv.end}"
                )

        if instance.level == HierarchyLevel.SUBSTEP:
            frames = _spaced(self._frames_within(iv), SUBSTEP_FRAME_SPACING)
            prior: list[str] = []
            if self._current_step_start is not None:
                step_iv = Interval(self._current_step_start, self._last_seen)
                prior = [
                    p.long_form
                    for p in self._predictions
                    if p.level == HierarchyLevel.SUBSTEP
                    and step_iv.start <= p.interval.start
                    and p.interval.end <= step_iv.end
                ]
            return RetrievalBundle(tuple(frames), tuple(prior), instance.level, iv)

        if instance.level == HierarchyLevel.STEP:
            candidates = [
                f for f in self._frames_within(iv) if HierarchyLevel.SUBSTEP in f.member_levels
            ]
            frames = _spaced(candidates, STEP_FRAME_SPACING)
            step_preds = [p for p in self._predictions if p.level == HierarchyLevel.STEP]
            prior = [p.long_form for p in step_preds[-MAX_STEP_HISTORY:]]
            return RetrievalBundle(tuple(frames), tuple(prior), instance.level, iv)

        # Goal: one representative frame per described step, oldest first.
        frames = []
        prior = []
        for p in self._predictions:
            if p.level != HierarchyLevel.STEP:
                continue
            prior.append(p.short_form)
            inside = self._frames_within(p.interval)
            if inside:
                frames.append(inside[0])
        end = self._last_seen if self._last_seen is not None else iv.end
        return RetrievalBundle(
            tuple(sorted(frames, key=lambda f: f.timestamp)),
            tuple(prior),
            HierarchyLevel.GOAL,
            Interval(0.0, max(end, 0.0)),
        )

    # ------------------------------------------------------------------
    # debugging
    # ------------------------------------------------------------------

    def snapshot(self) -> dict:
        """JSON-friendly dump of the store; not a stable format."""
        return {
            "frames": [
                {
                    "timestamp": f.timestamp,
                    "levels": sorted(int(l) for l in f.member_levels),
                    "handle": f.handle,
                }
                for f in self._frames
            ],
            "predictions": [
                {
                    "level": int(p.level),
                    "start": p.interval.start,
                    "end": p.interval.end,
                    "short_form": p.short_form,
                    "long_form": p.long_form,
                    "created_at": p.created_at,
                }
                for p in self._predictions
            ],
        }

    def export_snapshot(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.snapshot(), fh, indent=2, sort_keys=True)
