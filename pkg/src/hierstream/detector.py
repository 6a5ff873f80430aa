"""Online hybrid action-boundary detection.

Starts are detected from the per-frame state distribution (actionness
crossing a threshold); ends are detected from sudden drops in the decoded
progress signal, which is what separates back-to-back events that share no
background frame in between. Emissions are final the moment they happen:
nothing is ever rewritten by later frames.

Per frame and per level the order is end-check first, then start-check.
A drop-triggered end closes the instance at the previous frame and marks
the current frame as background for that level, so the follow-up instance
can open no earlier than the next frame.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum

from .core import (
    STATE_STEP,
    STATE_STEP_AND_SUBSTEP,
    ActionInstance,
    FrameScores,
    HierarchyLevel,
    Interval,
)
from .scoring.histogram import HistogramConfig, histogram_expectation


class EventKind(Enum):
    INSTANCE_STARTED = "instance_started"
    INSTANCE_ENDED = "instance_ended"
    GOAL_DUE = "goal_due"


@dataclass(frozen=True)
class DetectorConfig:
    """Thresholds of the boundary state machine.

    start_threshold: minimum actionness to open an instance.
    drop_delta: minimum one-frame decrease of decoded progress that closes
        an instance. Values above 1.0 can never trigger (progress lives in
        [0, 1]), which disables drop-based ends entirely.
    min_progress_for_drop: progress must have reached this value before a
        drop is honored, so early jitter cannot end an instance.
    """

    start_threshold: float = 0.5
    drop_delta: float = 0.4
    min_progress_for_drop: float = 0.5
    close_incomplete_at_eos: bool = True

    def __post_init__(self) -> None:
        if not 0 < self.start_threshold < 1:
            raise ValueError(f"start_threshold must be in (0,1), got {self.start_threshold}")
        if self.drop_delta <= 0:
            raise ValueError(f"drop_delta must be positive, got {self.drop_delta}")
        if not 0 <= self.min_progress_for_drop <= 1:
            raise ValueError(
                f"min_progress_for_drop must be in [0,1], got {self.min_progress_for_drop}"
            )


@dataclass(frozen=True)
class DetectionEvent:
    kind: EventKind
    level: HierarchyLevel | None
    timestamp: float
    interval: Interval | None = None


@dataclass(frozen=True)
class Emission:
    """A completed instance plus the stream time at which it was emitted."""

    instance: ActionInstance
    emit_time: float


@dataclass
class _LevelState:
    ongoing: bool = False
    open_start: float = 0.0
    previous_progress: float = 0.0
    suppressed_this_frame: bool = False


def actionness(fs: FrameScores, level: HierarchyLevel) -> float:
    """Probability that an instance of the level is ongoing, marginalized
    from the 3-state distribution (substeps imply an enclosing step)."""
    if level == HierarchyLevel.STEP:
        return float(fs.state_probs[STATE_STEP] + fs.state_probs[STATE_STEP_AND_SUBSTEP])
    if level == HierarchyLevel.SUBSTEP:
        return float(fs.state_probs[STATE_STEP_AND_SUBSTEP])
    raise ValueError(f"no actionness for level {level}")


class StreamDetector:
    """One per stream. Feed frames through :meth:`step`, then call
    :meth:`finish` exactly once after the last frame."""

    LEVELS = (HierarchyLevel.SUBSTEP, HierarchyLevel.STEP)

    def __init__(self, cfg: DetectorConfig = DetectorConfig(),
                 histogram: HistogramConfig = HistogramConfig()):
        self.cfg = cfg
        self.histogram = histogram
        self._levels = {level: _LevelState() for level in self.LEVELS}
        self._last_ts: float | None = None
        self._finished = False
        self.emission_log: list[DetectionEvent] = []

    def _progress(self, fs: FrameScores, level: HierarchyLevel) -> float:
        dist = (
            fs.substep_progress_dist
            if level == HierarchyLevel.SUBSTEP
            else fs.step_progress_dist
        )
        return histogram_expectation(dist, self.histogram)

    def _emit(self, event: DetectionEvent) -> DetectionEvent:
        self.emission_log.append(event)
        return event

    def ongoing_levels(self) -> set[HierarchyLevel]:
        """Levels with an open instance; the membership a frame stored right
        after :meth:`step` should carry."""
        return {level for level, ls in self._levels.items() if ls.ongoing}

    def step(self, fs: FrameScores) -> list[DetectionEvent]:
        if self._finished:
            raise RuntimeError("detector already finished")
        t = fs.timestamp
        if self._last_ts is not None and t <= self._last_ts:
            raise ValueError(f"non-monotonic timestamp {t} after {self._last_ts}")

        events: list[DetectionEvent] = []
        for level in self.LEVELS:
            ls = self._levels[level]
            ls.suppressed_this_frame = False
            act = actionness(fs, level)

            if ls.ongoing:
                p = self._progress(fs, level)
                dropped = (
                    ls.previous_progress - p >= self.cfg.drop_delta
                    and ls.previous_progress >= self.cfg.min_progress_for_drop
                )
                if dropped:
                    # Progress collapsed: the instance ended at the previous
                    # frame and this frame belongs to no instance at this level.
                    events.append(self._emit(DetectionEvent(
                        EventKind.INSTANCE_ENDED, level, t,
                        Interval(ls.open_start, self._last_ts),
                    )))
                    ls.ongoing = False
                    ls.suppressed_this_frame = True
                elif act < self.cfg.start_threshold:
                    events.append(self._emit(DetectionEvent(
                        EventKind.INSTANCE_ENDED, level, t,
                        Interval(ls.open_start, t),
                    )))
                    ls.ongoing = False
                else:
                    ls.previous_progress = p

            if not ls.ongoing and not ls.suppressed_this_frame and act >= self.cfg.start_threshold:
                ls.ongoing = True
                ls.open_start = t
                ls.previous_progress = self._progress(fs, level)
                events.append(self._emit(DetectionEvent(
                    EventKind.INSTANCE_STARTED, level, t,
                )))

        self._last_ts = t
        return events

    def finish(self, final_timestamp: float | None = None) -> list[DetectionEvent]:
        if self._finished:
            raise RuntimeError("finish() called twice")
        self._finished = True
        if final_timestamp is None:
            final_timestamp = self._last_ts if self._last_ts is not None else 0.0

        events: list[DetectionEvent] = []
        if self.cfg.close_incomplete_at_eos:
            for level in self.LEVELS:
                ls = self._levels[level]
                if ls.ongoing:
                    events.append(self._emit(DetectionEvent(
                        EventKind.INSTANCE_ENDED, level, final_timestamp,
                        Interval(ls.open_start, final_timestamp),
                    )))
                    ls.ongoing = False
        events.append(self._emit(DetectionEvent(
            EventKind.GOAL_DUE, HierarchyLevel.GOAL, final_timestamp,
        )))
        return events


def run_stream(
    scores: list[FrameScores],
    cfg: DetectorConfig = DetectorConfig(),
    histogram: HistogramConfig = HistogramConfig(),
) -> list[Emission]:
    """Fold a whole score stream through the detector and return every
    completed instance in emission order (descriptions left empty)."""
    det = StreamDetector(cfg, histogram)
    emissions: list[Emission] = []
    for fs in scores:
        for ev in det.step(fs):
            if ev.kind == EventKind.INSTANCE_ENDED:
                emissions.append(Emission(
                    ActionInstance(ev.interval, "", ev.level), ev.timestamp,
                ))
    for ev in det.finish():
        if ev.kind == EventKind.INSTANCE_ENDED:
            emissions.append(Emission(
                ActionInstance(ev.interval, "", ev.level), ev.timestamp,
            ))
    return emissions


# ----------------------------------------------------------------------
# emissions JSONL
# ----------------------------------------------------------------------

def emission_to_dict(e: Emission) -> dict:
    d = {
        "start": e.instance.interval.start,
        "end": e.instance.interval.end,
        "level": int(e.instance.level),
        "emit_time": e.emit_time,
    }
    if e.instance.description:
        d["description"] = e.instance.description
    return d


def emission_from_dict(d: dict) -> Emission:
    return Emission(
        instance=ActionInstance(
            interval=Interval(float(d["start"]), float(d["end"])),
            description=str(d.get("description", "")),
            level=HierarchyLevel(int(d["level"])),
        ),
        emit_time=float(d["emit_time"]),
    )


def write_emissions(emissions: list[Emission], path) -> None:
    with open(path, "w") as fh:
        for e in emissions:
            fh.write(json.dumps(emission_to_dict(e)) + "\n")


def read_emissions(path) -> list[Emission]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(emission_from_dict(json.loads(line)))
    return out
