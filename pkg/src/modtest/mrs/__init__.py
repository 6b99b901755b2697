"""Metamorphic relations: character-, paragraph-, and picture-level."""

from .pipeline import (ALL_MR_IDS, CHAR, MR_REGISTRY, PARAGRAPH, PICTURE,
                       apply_chain, compose, mr_level, render_baseline,
                       validate_chain)

__all__ = [
    "ALL_MR_IDS", "CHAR", "MR_REGISTRY", "PARAGRAPH", "PICTURE",
    "apply_chain", "compose", "mr_level", "render_baseline", "validate_chain",
]
