"""Deterministic describer double for tests and offline runs."""

from __future__ import annotations

from ..core import HierarchyLevel
from ..memory import RetrievalBundle
from .responses import DescriberResponse


def mock_describe(bundle: RetrievalBundle) -> DescriberResponse:
    """Text derived only from the bundle's level, interval, and frame count,
    so identical bundles always produce identical responses."""
    tag = (
        f"{bundle.level.name.lower()}"
        f"[{bundle.interval.start:.3f}-{bundle.interval.end:.3f}]"
        f"x{len(bundle.frames)}"
    )
    if bundle.level == HierarchyLevel.GOAL:
        return DescriberResponse(short_form=f"{tag} h{len(bundle.prior_predictions)}")
    return DescriberResponse(
        short_form=tag,
        long_form_before=f"{tag} draft h{len(bundle.prior_predictions)}",
        long_form_after=f"{tag} revised h{len(bundle.prior_predictions)}",
    )
