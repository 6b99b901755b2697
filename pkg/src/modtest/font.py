"""Font providers: deterministic glyph bitmaps on a monospaced cell grid.

The bundled default covers printable ASCII with an 8x16 bitmap per glyph.
Other scripts (e.g. Chinese) need a user-supplied TrueType file loaded
through :func:`FontProvider.from_truetype`.
"""

from __future__ import annotations

import math

import numpy as np

from ._font8x16 import CELL_H, CELL_W, GLYPHS
from .errors import GlyphCoverageError, ParamError


class FontProvider:
    """Monospaced glyph source. Nominal size equals the cell height."""

    def __init__(self, name: str, glyphs: dict[int, np.ndarray],
                 cell_w: int, cell_h: int, shear_deg: float = 0.0):
        self.name = name
        self._glyphs = glyphs  # codepoint -> (cell_h, cell_w) bool array
        self.cell_w = cell_w
        self.cell_h = cell_h
        self.shear_deg = shear_deg

    @property
    def nominal_size(self) -> int:
        return self.cell_h

    def covers(self, codepoint: int) -> bool:
        return codepoint == 0x20 or codepoint in self._glyphs

    def require(self, codepoint: int) -> None:
        if not self.covers(codepoint):
            raise GlyphCoverageError(codepoint)

    def oblique(self, shear_deg: float = 20.0) -> "FontProvider":
        """Same glyphs with a horizontal shear applied at rasterization time."""
        return FontProvider(f"{self.name}-oblique{shear_deg:g}", self._glyphs,
                            self.cell_w, self.cell_h, shear_deg=shear_deg)

    def scaled_cell(self, size: int) -> tuple[int, int]:
        """Cell (w, h) in pixels when rendering at `size` px."""
        if size < 1:
            raise ParamError(f"font size must be >= 1, got {size}")
        w = max(1, round(self.cell_w * size / self.cell_h))
        return w + self._shear_extent(size), size

    def _shear_extent(self, size: int) -> int:
        if self.shear_deg == 0.0:
            return 0
        return round(math.tan(math.radians(self.shear_deg)) * (size - 1))

    def glyph_mask(self, codepoint: int, size: int) -> np.ndarray:
        """Boolean ink mask of the glyph scaled to the cell for `size` px."""
        self.require(codepoint)
        cell_w, cell_h = self.scaled_cell(size)
        base_w = cell_w - self._shear_extent(size)
        if codepoint == 0x20 and codepoint not in self._glyphs:
            return np.zeros((cell_h, cell_w), dtype=bool)
        base = self._glyphs[codepoint]
        ys = np.minimum((np.arange(cell_h) * base.shape[0]) // cell_h, base.shape[0] - 1)
        xs = np.minimum((np.arange(base_w) * base.shape[1]) // base_w, base.shape[1] - 1)
        scaled = base[np.ix_(ys, xs)]
        if self.shear_deg == 0.0:
            return scaled
        slope = math.tan(math.radians(self.shear_deg))
        out = np.zeros((cell_h, cell_w), dtype=bool)
        for y in range(cell_h):
            shift = round(slope * (cell_h - 1 - y))
            out[y, shift:shift + base_w] = scaled[y]
        return out

    @staticmethod
    def from_truetype(path: str, point_size: int = 13,
                      cell_w: int = CELL_W, cell_h: int = CELL_H,
                      codepoints=None) -> "FontProvider":
        """Rasterize a TrueType font onto the monospaced cell grid.

        `codepoints` defaults to printable ASCII; pass the full set the seed
        corpus needs (e.g. its CJK characters).
        """
        from PIL import Image, ImageDraw, ImageFont

        font = ImageFont.truetype(path, point_size)
        if codepoints is None:
            codepoints = range(0x20, 0x7F)
        glyphs: dict[int, np.ndarray] = {}
        for cp in codepoints:
            img = Image.new("L", (cell_w * 3, cell_h * 3), 0)
            ImageDraw.Draw(img).text((cell_w, cell_h), chr(cp), font=font,
                                     fill=255, anchor="ls")
            cell = img.crop((cell_w, cell_h - 12, cell_w * 2, cell_h - 12 + cell_h))
            mask = np.asarray(cell, dtype=np.uint8) >= 128
            if mask.any() or cp == 0x20:
                glyphs[cp] = mask
        import os
        return FontProvider(os.path.basename(path), glyphs, cell_w, cell_h)


def _unpack_bundled() -> dict[int, np.ndarray]:
    glyphs = {}
    for cp, rows in GLYPHS.items():
        mask = np.zeros((CELL_H, CELL_W), dtype=bool)
        for y, byte in enumerate(rows):
            for x in range(CELL_W):
                if byte & (1 << (CELL_W - 1 - x)):
                    mask[y, x] = True
        glyphs[cp] = mask
    return glyphs


_BUNDLED: FontProvider | None = None


def default_font() -> FontProvider:
    """The bundled ASCII 8x16 bitmap font (cached)."""
    global _BUNDLED
    if _BUNDLED is None:
        _BUNDLED = FontProvider("bundled-8x16", _unpack_bundled(), CELL_W, CELL_H)
    return _BUNDLED
