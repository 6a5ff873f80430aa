"""The full streaming loop: detector events drive memory writes and
describer calls.

Every frame goes through the detector and is offered to the context
memory with its current hierarchy membership. The describer runs exactly
once per completed instance plus once for the goal at stream end; no
other code path may invoke it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .core import ActionInstance, FrameScores, HierarchyLevel, Interval
from .describer.http import DescriberEndpoint, HttpDescriber
from .describer.mock import mock_describe
from .describer.responses import DescribeRequest, DescriberResponse, build_request
from .detector import DetectorConfig, Emission, EventKind, StreamDetector
from .memory import ContextMemory, Prediction, RetrievalBundle
from .scoring.histogram import HistogramConfig

DescribeFn = Callable[[RetrievalBundle, DescribeRequest], DescriberResponse]


def mock_describer() -> DescribeFn:
    return lambda bundle, _request: mock_describe(bundle)


def http_describer(endpoint: DescriberEndpoint, limits=None) -> DescribeFn:
    client = HttpDescriber(endpoint, limits) if limits else HttpDescriber(endpoint)
    return lambda _bundle, request: client.describe(request)


@dataclass
class StreamResult:
    emissions: list[Emission]  # described, in emission order
    goal_text: str
    describe_calls: int
    memory: ContextMemory


def _default_handle(timestamp: float) -> str:
    return f"frame@{timestamp:.3f}"


def run_described_stream(
    scores: Sequence[FrameScores],
    describe: DescribeFn,
    detector_cfg: DetectorConfig = DetectorConfig(),
    histogram: HistogramConfig = HistogramConfig(),
    frame_handle: Callable[[float], str] = _default_handle,
    completion: float = 1.0,
) -> StreamResult:
    """Stream scores through detection, retrieval, and description.

    ``completion`` below 1.0 truncates each instance's retrieval window to
    its leading fraction before the describer sees it, for describing
    still-incomplete instances; emitted intervals are unaffected.
    """
    if not 0 < completion <= 1.0:
        raise ValueError(f"completion must be in (0, 1], got {completion}")

    detector = StreamDetector(detector_cfg, histogram)
    memory = ContextMemory()
    emissions: list[Emission] = []
    calls = 0

    def describe_instance(instance: ActionInstance, emit_time: float) -> DescriberResponse:
        nonlocal calls
        query_iv = instance.interval
        if completion < 1.0 and instance.level != HierarchyLevel.GOAL:
            query_iv = Interval(
                query_iv.start,
                query_iv.start + completion * query_iv.length,
            )
        bundle = memory.query(ActionInstance(query_iv, "", instance.level))
        request = build_request(bundle)
        calls += 1
        response = describe(bundle, request)
        memory.commit_prediction(Prediction(
            level=instance.level,
            interval=instance.interval,
            short_form=response.short_form,
            long_form=response.long_form_after or response.short_form,
            created_at=emit_time,
        ))
        return response

    def handle_events(events) -> None:
        for ev in events:
            if ev.kind != EventKind.INSTANCE_ENDED:
                continue
            instance = ActionInstance(ev.interval, "", ev.level)
            response = describe_instance(instance, ev.timestamp)
            emissions.append(Emission(
                ActionInstance(ev.interval, response.short_form, ev.level),
                ev.timestamp,
            ))

    last_ts = 0.0
    for fs in scores:
        events = detector.step(fs)
        memory.insert_frame(fs.timestamp, detector.ongoing_levels(), frame_handle(fs.timestamp))
        handle_events(events)
        last_ts = fs.timestamp

    final_events = detector.finish()
    handle_events([ev for ev in final_events if ev.kind == EventKind.INSTANCE_ENDED])

    goal_text = ""
    for ev in final_events:
        if ev.kind == EventKind.GOAL_DUE:
            goal_instance = ActionInstance(Interval(0.0, last_ts), "", HierarchyLevel.GOAL)
            goal_text = describe_instance(goal_instance, ev.timestamp).short_form

    return StreamResult(
        emissions=emissions,
        goal_text=goal_text,
        describe_calls=calls,
        memory=memory,
    )
