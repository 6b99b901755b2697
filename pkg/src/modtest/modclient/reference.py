"""Built-in reference moderator: exact template matching over binarized ink.

Each banned word is rendered with the default renderer into a binary
template; the template slides over the binarized artifact and the best
matched-ink fraction decides the verdict. Deliberately scale- and
rotation-naive: every unperturbed render of a banned word scores 1.0, and
most perturbations break the match, which is what makes desk-scale EFR
numbers meaningful.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from ..canvas import Canvas, decode_image
from ..errors import ParamError
from ..models import NON_TOXIC, TOXIC
from ..render import DEFAULT_SIZE, ink_mask, render_line


@dataclass
class ReferenceModeratorConfig:
    banned_words: list[str]
    match_threshold: float = 0.9
    ink_threshold: int = 128  # pixel is ink if max channel < this
    template_size: int = DEFAULT_SIZE

    def __post_init__(self):
        if not self.banned_words:
            raise ParamError("banned lexicon must be non-empty")
        if not 0.0 < self.match_threshold <= 1.0:
            raise ParamError(
                f"match threshold must be in (0, 1], got {self.match_threshold}")


class ReferenceModerator:
    name = "reference"

    def __init__(self, cfg: ReferenceModeratorConfig, font=None):
        self.cfg = cfg
        self._templates: list[tuple[str, np.ndarray]] = []
        for word in cfg.banned_words:
            canvas, _ = render_line(word, font, cfg.template_size, padding=0)
            tpl = ink_mask(canvas)
            if tpl.any():
                self._templates.append((word, tpl))

    def _binarize(self, frame: Canvas) -> np.ndarray:
        return frame.pixels.max(axis=2) < self.cfg.ink_threshold

    def score_frame(self, frame: Canvas) -> tuple[float, str | None]:
        """Best matched-ink fraction over all banned words and offsets."""
        image_ink = self._binarize(frame).astype(np.float64)
        best, best_word = 0.0, None
        for word, tpl in self._templates:
            th, tw = tpl.shape
            if th > image_ink.shape[0] or tw > image_ink.shape[1]:
                continue
            hits = fftconvolve(image_ink, tpl[::-1, ::-1].astype(np.float64),
                               mode="valid")
            score = float(hits.max()) / float(tpl.sum())
            if score > best:
                best, best_word = score, word
        return min(best, 1.0), best_word

    def moderate(self, artifact: bytes, artifact_format: str,
                 ground_truth: str | None = None):
        frames = decode_image(artifact)
        best, best_word = 0.0, None
        for frame in frames:
            score, word = self.score_frame(frame)
            if score > best:
                best, best_word = score, word
            if best >= self.cfg.match_threshold:
                break  # GIF verdict is the OR over frames
        toxic = best >= self.cfg.match_threshold
        raw = {"score": round(best, 6), "matched_word": best_word if toxic else None}
        return (TOXIC if toxic else NON_TOXIC), raw
