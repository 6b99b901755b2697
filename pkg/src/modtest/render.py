"""Text rendering over the canvas substrate.

`render_line` is the baseline renderer: monospaced cells left to right with
uniform padding. `render_unit` is the style-aware variant the perturbation
pipeline builds layouts from (per-unit sizes, per-glyph rotation, colors).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .canvas import BLACK, WHITE, Canvas, GlyphPlacement, composite, rotate_canvas
from .errors import InvalidTextError, ParamError
from .font import FontProvider, default_font

DEFAULT_SIZE = 16
DEFAULT_PADDING = 4


def split_units(text: str, language: str = "english") -> list[str]:
    """Layout units: whitespace-delimited words for English, single
    characters for Chinese."""
    if language == "chinese":
        return [ch for ch in text if not ch.isspace()]
    return text.split()


def _stamp_mask(pixels: np.ndarray, mask: np.ndarray, x: int, y: int, fg) -> None:
    h, w = mask.shape
    H, W = pixels.shape[:2]
    x0, y0 = max(x, 0), max(y, 0)
    x1, y1 = min(x + w, W), min(y + h, H)
    if x0 >= x1 or y0 >= y1:
        return
    sub = mask[y0 - y:y1 - y, x0 - x:x1 - x]
    pixels[y0:y1, x0:x1][sub] = fg


def render_line(text: str, font: FontProvider | None = None, size: int = DEFAULT_SIZE,
                fg=BLACK, bg=WHITE, padding: int = DEFAULT_PADDING,
                ) -> tuple[Canvas, list[GlyphPlacement]]:
    """Render one line of text on a monospaced grid.

    Every codepoint (including spaces) advances one cell; the glyph ledger
    records only non-space glyphs, left to right.
    """
    if not text:
        raise InvalidTextError("cannot render empty text")
    if padding < 0:
        raise ParamError("padding must be >= 0")
    font = font or default_font()
    for ch in text:
        font.require(ord(ch))
    cell_w, cell_h = font.scaled_cell(size)
    width = padding * 2 + len(text) * cell_w
    height = padding * 2 + cell_h
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:] = bg
    ledger: list[GlyphPlacement] = []
    order = 0
    for i, ch in enumerate(text):
        if ch == " ":
            continue
        x = padding + i * cell_w
        _stamp_mask(pixels, font.glyph_mask(ord(ch), size), x, padding, fg)
        ledger.append(GlyphPlacement(codepoint=ord(ch), bbox=(x, padding, cell_w, cell_h),
                                     render_order=order))
        order += 1
    return Canvas(pixels), ledger


@dataclass
class RenderStyle:
    """Resolved character-level styling shared by all layouts."""

    font: FontProvider = field(default_factory=default_font)
    size: int = DEFAULT_SIZE
    fg: tuple[int, int, int] = BLACK
    bg: tuple[int, int, int] = WHITE
    padding: int = DEFAULT_PADDING
    unit_sizes: dict[int, int] = field(default_factory=dict)  # unit idx -> px
    char_angle_range: tuple[float, float] | None = None
    char_rng: Any = None  # Rng owning the per-glyph rotation stream
    strikethrough: bool = False

    def size_for(self, unit_index: int) -> int:
        return self.unit_sizes.get(unit_index, self.size)


def render_unit(unit: str, style: RenderStyle, unit_index: int, rng=None,
                ) -> tuple[Canvas, list[GlyphPlacement]]:
    """Render one unit (word or character) without padding.

    With a char rotation range set, each glyph is rotated individually inside
    an enlarged slot (advance unchanged) and composited with darken so that
    spilled ink merges.
    """
    if not unit:
        raise InvalidTextError("cannot render empty unit")
    font = style.font
    for ch in unit:
        font.require(ord(ch))
    size = style.size_for(unit_index)
    cell_w, cell_h = font.scaled_cell(size)
    rotating = style.char_angle_range is not None and style.char_angle_range != (0.0, 0.0)

    if not rotating:
        pixels = np.empty((cell_h, len(unit) * cell_w, 3), dtype=np.uint8)
        pixels[:] = style.bg
        ledger = []
        for i, ch in enumerate(unit):
            x = i * cell_w
            _stamp_mask(pixels, font.glyph_mask(ord(ch), size), x, 0, style.fg)
            if ch != " ":
                ledger.append(GlyphPlacement(codepoint=ord(ch), bbox=(x, 0, cell_w, cell_h),
                                             render_order=i, unit_index=unit_index))
        return Canvas(pixels), ledger

    lo, hi = style.char_angle_range
    rng = style.char_rng if style.char_rng is not None else rng
    slot = math.ceil(math.hypot(cell_w, cell_h))  # largest rotated bbox side
    margin = (slot - cell_w + 1) // 2
    out_w = len(unit) * cell_w + 2 * margin
    canvas = Canvas.blank(out_w, slot, style.bg)
    ledger = []
    for i, ch in enumerate(unit):
        angle = rng.uniform(lo, hi) if rng is not None else 0.0
        if ch == " ":
            continue
        glyph_px = np.empty((cell_h, cell_w, 3), dtype=np.uint8)
        glyph_px[:] = style.bg
        _stamp_mask(glyph_px, font.glyph_mask(ord(ch), size), 0, 0, style.fg)
        rotated = rotate_canvas(Canvas(glyph_px), angle, fill=style.bg)
        cx = margin + i * cell_w + cell_w // 2
        gx = cx - rotated.width // 2
        gy = (slot - rotated.height) // 2
        canvas = composite(canvas, rotated, (gx, gy), mode="darken")
        bx, by = max(gx, 0), max(gy, 0)
        bw = min(gx + rotated.width, canvas.width) - bx
        bh = min(gy + rotated.height, canvas.height) - by
        ledger.append(GlyphPlacement(codepoint=ord(ch), bbox=(bx, by, bw, bh),
                                     rotation_deg=angle, render_order=i,
                                     unit_index=unit_index))
    return canvas, ledger


def translate_ledger(ledger: list[GlyphPlacement], dx: int, dy: int,
                     base_order: int = 0, unit_index: int | None = None,
                     ) -> list[GlyphPlacement]:
    out = []
    for g in ledger:
        x, y, w, h = g.bbox
        out.append(GlyphPlacement(
            codepoint=g.codepoint, bbox=(x + dx, y + dy, w, h),
            rotation_deg=g.rotation_deg, render_order=base_order + g.render_order,
            unit_index=g.unit_index if unit_index is None else unit_index))
    return out


def ink_mask(c: Canvas, bg=WHITE) -> np.ndarray:
    """Boolean mask of pixels that differ from the background color."""
    return np.any(c.pixels != np.asarray(bg, dtype=np.uint8), axis=2)
