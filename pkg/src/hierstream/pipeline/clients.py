"""Chat clients for the annotation pipeline: a protocol, a deterministic
window-grouping mock, and a thin adapter over an OpenAI-compatible chat
endpoint."""

from __future__ import annotations

import json
from typing import Protocol

from .._http import HttpLimits, JsonHttpClient


class ChatClient(Protocol):
    def complete(self, prompt: str) -> str: ...


def _find_substep_array(prompt: str) -> list | None:
    """First JSON array of indexed objects embedded anywhere in the text."""
    decoder = json.JSONDecoder()
    pos = prompt.find("[")
    while pos != -1:
        try:
            value, _end = decoder.raw_decode(prompt, pos)
        except json.JSONDecodeError:
            value = None
        if (
            isinstance(value, list) and value
            and all(isinstance(x, dict) and "index" in x for x in value)
        ):
            return value
        pos = prompt.find("[", pos + 1)
    return None


class MockGroupingClient:
    """Groups substeps into fixed-size consecutive windows.

    Reads the substep array embedded in the grouping prompt and replies
    with the JSON contract the parser expects; referentially transparent.
    """

    def __init__(self, window: int = 2):
        if window < 1:
            raise ValueError(f"window must be >= 1, got {window}")
        self.window = window

    def complete(self, prompt: str) -> str:
        substeps = _find_substep_array(prompt)
        if substeps is None:
            raise ValueError("grouping prompt carries no substep array")
        steps = []
        for start in range(0, len(substeps), self.window):
            chunk = substeps[start: start + self.window]
            steps.append({
                "substep_indices": [s["index"] for s in chunk],
                "description": f"do: {chunk[0]['description']}",
            })
        reply = {"steps": steps, "goal": f"complete {len(steps)} activities"}
        return json.dumps(reply)


class HttpChatClient:
    """Text-only chat completion against an OpenAI-compatible endpoint."""

    def __init__(self, base_url: str, model: str, api_key: str | None = None,
                 limits: HttpLimits = HttpLimits(), temperature: float = 0.0):
        self.model = model
        self.temperature = temperature
        self._client = JsonHttpClient(base_url, api_key=api_key, limits=limits)

    def complete(self, prompt: str) -> str:
        reply = self._client.post_json("/chat/completions", {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": prompt}],
        })
        return reply["choices"][0]["message"]["content"]
