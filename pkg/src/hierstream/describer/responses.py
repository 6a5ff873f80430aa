"""Request assembly and response parsing for describer calls."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from ..core import HierarchyLevel
from ..memory import RetrievalBundle
from .prompts import PLACEHOLDERS, TEMPLATES


class DescribeParseError(ValueError):
    """Raised when a reply does not follow the expected output format.
    Carries the raw text so callers can log or retry."""

    def __init__(self, message: str, raw: str):
        super().__init__(message)
        self.raw = raw


@dataclass(frozen=True)
class DescribeRequest:
    level: HierarchyLevel
    prompt: str
    frame_handles: tuple[str, ...]
    # True for a goal request assembled with no step predictions available.
    empty_history: bool = False


@dataclass(frozen=True)
class DescriberResponse:
    short_form: str
    long_form_before: str = ""
    long_form_after: str = ""


def build_request(bundle: RetrievalBundle) -> DescribeRequest:
    """Fill the level's template with the bundle's prediction history and
    attach frame handles in timestamp order."""
    template = TEMPLATES[bundle.level]
    placeholder = PLACEHOLDERS[bundle.level]
    serialized = json.dumps(list(bundle.prior_predictions))
    prompt = template.replace(placeholder, serialized)
    frames = tuple(f.handle for f in sorted(bundle.frames, key=lambda f: f.timestamp))
    return DescribeRequest(
        level=bundle.level,
        prompt=prompt,
        frame_handles=frames,
        empty_history=bundle.level == HierarchyLevel.GOAL and not bundle.prior_predictions,
    )


_SHORT_RE = re.compile(r"short form response\s*:\s*(.*)", re.IGNORECASE)
_LONG_BEFORE_RE = re.compile(
    r"long form response \(before revision\)\s*:\s*(.*)", re.IGNORECASE
)
_LONG_AFTER_RE = re.compile(
    r"long form response \(after revision\)\s*:\s*(.*)", re.IGNORECASE
)
_ANSWER_RE = re.compile(r"answer\s*:\s*(.*)", re.IGNORECASE)


def parse_response(text: str) -> DescriberResponse:
    """Extract the labeled fields from a reply.

    Three-field replies (substep/step) populate every field; a bare
    ``Answer: ...`` line (goal) populates short_form only.
    """
    short = _SHORT_RE.search(text)
    before = _LONG_BEFORE_RE.search(text)
    after = _LONG_AFTER_RE.search(text)
    if short and before and after:
        fields = (short.group(1).strip(), before.group(1).strip(), after.group(1).strip())
        if all(fields):
            return DescriberResponse(*fields)
        raise DescribeParseError("labeled response has empty fields", text)
    if short or before or after:
        raise DescribeParseError("incomplete labeled response", text)
    answer = _ANSWER_RE.search(text)
    if answer and answer.group(1).strip():
        return DescriberResponse(short_form=answer.group(1).strip())
    raise DescribeParseError("no recognizable answer labels", text)


def format_response(resp: DescriberResponse) -> str:
    """Render a response in the labeled output shape; inverse of
    :func:`parse_response` on the three fields."""
    if not resp.long_form_before and not resp.long_form_after:
        return f"Answer: {resp.short_form}"
    return (
        "Answer:\n"
        f"short form response: {resp.short_form}\n"
        f"long form response (before revision): {resp.long_form_before}\n"
        f"long form response (after revision): {resp.long_form_after}"
    )
