"""Metamorphic testing toolkit for image-based content moderation.

Renders seed texts into perturbed images under 21 metamorphic relations,
runs them against moderation targets, and reports Error Finding Rates.
"""

__version__ = "0.1.0"

from .canvas import Canvas, GlyphPlacement
from .corpus import SeedCorpus, SeedRecord, filter_baseline, load_seeds
from .models import EfrReport, EfrRow, PerturbationSpec, TestCase, Verdict
from .mrs.pipeline import ALL_MR_IDS, MR_REGISTRY, apply_chain, compose

__all__ = [
    "Canvas", "GlyphPlacement",
    "SeedCorpus", "SeedRecord", "filter_baseline", "load_seeds",
    "EfrReport", "EfrRow", "PerturbationSpec", "TestCase", "Verdict",
    "ALL_MR_IDS", "MR_REGISTRY", "apply_chain", "compose",
]
