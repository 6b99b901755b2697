"""Client interface the harness fans out to."""

from __future__ import annotations

from typing import Any, Protocol, runtime_checkable

from ..models import LABELS
from ..errors import ProtocolError


@runtime_checkable
class ModerationClient(Protocol):
    """Accepts PNG/GIF bytes, returns (label, raw payload).

    Implementations must be safe to call concurrently and keep no
    per-request state.
    """

    name: str

    def moderate(self, artifact: bytes, artifact_format: str,
                 ground_truth: str | None = None) -> tuple[str, Any]:
        ...


def check_label(label: str) -> str:
    if label not in LABELS:
        raise ProtocolError(f"unknown verdict label {label!r}")
    return label


class StaticClient:
    """Always returns the same label; handy in tests."""

    def __init__(self, label: str, name: str = "static"):
        self.label = check_label(label)
        self.name = name

    def moderate(self, artifact, artifact_format, ground_truth=None):
        return self.label, None
