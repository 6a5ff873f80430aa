"""Training-target construction from temporal annotations.

Progress inside an instance is linear in time: an event spanning [2, 4]
has progress 0.5 at t = 3. The per-frame state class records which levels
are simultaneously active.
"""

from __future__ import annotations

from ..core import (
    STATE_BG,
    STATE_STEP,
    STATE_STEP_AND_SUBSTEP,
    AnnotationSet,
    HierarchyLevel,
    Interval,
)


def progress_target(t: float, iv: Interval) -> float:
    """Linear progress of timestamp t through interval iv, in [0, 1]."""
    if iv.end <= iv.start:
        raise ValueError(f"zero-length interval [{iv.start}, {iv.end}] has no progress")
    if not iv.start <= t <= iv.end:
        raise ValueError(f"timestamp {t} outside interval [{iv.start}, {iv.end}]")
    return (t - iv.start) / (iv.end - iv.start)


def _inside(t: float, iv: Interval, duration: float) -> bool:
    # Half-open [start, end); the final stream frame exactly at an instance
    # end that coincides with the video end still counts as inside.
    if iv.start <= t < iv.end:
        return True
    return t == iv.end == duration


def state_target(t: float, a: AnnotationSet) -> int:
    """State class for timestamp t: BG, STEP, or STEP_AND_SUBSTEP."""
    if not 0 <= t <= a.duration:
        raise ValueError(f"timestamp {t} outside video [0, {a.duration}]")
    in_substep = any(
        _inside(t, inst.interval, a.duration)
        for inst in a.instances
        if inst.level == HierarchyLevel.SUBSTEP
    )
    if in_substep:
        return STATE_STEP_AND_SUBSTEP
    in_step = any(
        _inside(t, inst.interval, a.duration)
        for inst in a.instances
        if inst.level == HierarchyLevel.STEP
    )
    return STATE_STEP if in_step else STATE_BG


def instance_at(t: float, a: AnnotationSet, level: HierarchyLevel) -> Interval | None:
    """The level's instance interval covering t, or None."""
    for inst in a.instances:
        if inst.level == level and _inside(t, inst.interval, a.duration):
            return inst.interval
    return None
