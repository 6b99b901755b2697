"""Pluggable moderation targets."""

from .base import ModerationClient, StaticClient
from .http import HttpClient, HttpTargetConfig
from .mock import MockModerationServer
from .reference import ReferenceModerator, ReferenceModeratorConfig

__all__ = [
    "ModerationClient", "StaticClient",
    "HttpClient", "HttpTargetConfig",
    "MockModerationServer",
    "ReferenceModerator", "ReferenceModeratorConfig",
]
