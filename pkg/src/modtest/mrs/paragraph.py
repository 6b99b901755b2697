"""Paragraph-level perturbations: layouts that place units without touching
glyph shapes. A unit is a word (English) or a character (Chinese)."""

from __future__ import annotations

import math

import numpy as np

from ..canvas import Canvas, GlyphPlacement, composite, draw_ellipse_outline
from ..errors import CloudInfeasibleError, ParamError
from ..render import RenderStyle, ink_mask, render_line, render_unit, translate_ledger
from ..rng import Rng


def _renumber(ledger: list[GlyphPlacement]) -> list[GlyphPlacement]:
    return [GlyphPlacement(codepoint=g.codepoint, bbox=g.bbox,
                           rotation_deg=g.rotation_deg, render_order=i,
                           unit_index=g.unit_index)
            for i, g in enumerate(ledger)]


def _render_all(units: list[str], style: RenderStyle, rng: Rng,
                ) -> list[tuple[Canvas, list[GlyphPlacement]]]:
    return [render_unit(u, style, i, rng) for i, u in enumerate(units)]


def layout_line(units: list[str], style: RenderStyle, params: dict, rng: Rng,
                benign_words, seed):
    """Baseline: units left to right, one space cell apart, bottom-aligned."""
    rendered = _render_all(units, style, rng)
    space_w = style.font.scaled_cell(style.size)[0]
    pad = style.padding
    width = 2 * pad + sum(c.width for c, _ in rendered) + space_w * (len(rendered) - 1)
    height = 2 * pad + max(c.height for c, _ in rendered)
    out = Canvas.blank(width, height, style.bg)
    ledger: list[GlyphPlacement] = []
    x = pad
    for c, sub in rendered:
        y = height - pad - c.height
        out = composite(out, c, (x, y), mode="replace")
        ledger.extend(translate_ledger(sub, x, y))
        x += c.width + space_w
    return out, _renumber(ledger), {}


def layout_right_to_left(units, style, params, rng, benign_words, seed):
    """Unit order reversed; glyph order inside each unit preserved."""
    canvas, ledger, aux = layout_line(list(reversed(units)), style, params, rng,
                                      benign_words, seed)
    n = len(units)
    ledger = [GlyphPlacement(codepoint=g.codepoint, bbox=g.bbox,
                             rotation_deg=g.rotation_deg, render_order=g.render_order,
                             unit_index=n - 1 - g.unit_index)
              for g in ledger]
    return canvas, ledger, aux


def layout_vertical(units, style, params, rng, benign_words, seed):
    """Each unit rendered as its own padded line, stacked top-to-bottom and
    horizontally centered."""
    subs = []
    for i, u in enumerate(units):
        c, led = render_line(u, style.font, style.size_for(i), style.fg, style.bg,
                             style.padding)
        led = [GlyphPlacement(codepoint=g.codepoint, bbox=g.bbox,
                              rotation_deg=g.rotation_deg, render_order=g.render_order,
                              unit_index=i) for g in led]
        subs.append((c, led))
    width = max(c.width for c, _ in subs)
    height = sum(c.height for c, _ in subs)
    out = Canvas.blank(width, height, style.bg)
    ledger: list[GlyphPlacement] = []
    y = 0
    for c, led in subs:
        x = (width - c.width) // 2
        out = composite(out, c, (x, y), mode="replace")
        ledger.extend(translate_ledger(led, x, y))
        y += c.height
    return out, _renumber(ledger), {"stack_heights": [c.height for c, _ in subs]}


def layout_align_alternate(units, style, params, rng, benign_words, seed):
    """One unit per line; 1st/3rd/... lines left-aligned, 2nd/4th/... right."""
    rendered = _render_all(units, style, rng)
    pad = style.padding
    width = 2 * pad + max(c.width for c, _ in rendered)
    height = 2 * pad + sum(c.height for c, _ in rendered)
    out = Canvas.blank(width, height, style.bg)
    ledger: list[GlyphPlacement] = []
    y = pad
    for i, (c, sub) in enumerate(rendered):
        x = pad if i % 2 == 0 else width - pad - c.width
        out = composite(out, c, (x, y), mode="replace")
        ledger.extend(translate_ledger(sub, x, y))
        y += c.height
    return out, _renumber(ledger), {}


def layout_circle(units, style, params, rng, benign_words, seed):
    """Units upright on a circle, reading clockwise from the top."""
    rendered = _render_all(units, style, rng)
    n = len(rendered)
    max_w = max(c.width for c, _ in rendered)
    max_h = max(c.height for c, _ in rendered)
    radius = n * max_w / (2 * math.pi) + max_h
    pad = style.padding
    half = int(math.ceil(radius + math.hypot(max_w, max_h) / 2)) + pad
    side = 2 * half
    out = Canvas.blank(side, side, style.bg)
    ledger: list[GlyphPlacement] = []
    for i, (c, sub) in enumerate(rendered):
        theta = math.radians(-90.0 + 360.0 * i / n)
        cx = half + radius * math.cos(theta)
        cy = half + radius * math.sin(theta)
        x = int(round(cx - c.width / 2))
        y = int(round(cy - c.height / 2))
        out = composite(out, c, (x, y), mode="darken")
        ledger.extend(translate_ledger(sub, x, y))
    return out, _renumber(ledger), {"radius": radius}


def layout_overlap(units, style, params, rng, benign_words, seed):
    """Units composited with darken at a reduced horizontal advance."""
    overlap = float(params["overlap"])
    if not 0.0 <= overlap < 1.0:
        raise ParamError(f"overlap must be in [0, 1), got {overlap}")
    rendered = _render_all(units, style, rng)
    pad = style.padding
    xs = [pad]
    for c, _ in rendered[:-1]:
        xs.append(xs[-1] + int(round(c.width * (1.0 - overlap))))
    width = max(xs[i] + rendered[i][0].width for i in range(len(rendered))) + pad
    height = 2 * pad + max(c.height for c, _ in rendered)
    out = Canvas.blank(width, height, style.bg)
    ledger: list[GlyphPlacement] = []
    for x, (c, sub) in zip(xs, rendered):
        y = height - pad - c.height
        out = composite(out, c, (x, y), mode="darken")
        ledger.extend(translate_ledger(sub, x, y))
    return out, _renumber(ledger), {"advances": xs}


def layout_benign_text_camouflage(units, style, params, rng, benign_words, seed):
    """Insert k benign words between consecutive units; red ellipse outlines
    mark each original unit."""
    k = int(params["k"])
    if k < 0:
        raise ParamError(f"k must be >= 0, got {k}")
    if k > 0 and not benign_words:
        raise ParamError("benign lexicon required when k > 0")
    mixed: list[str] = []
    original_slots: list[int] = []
    inserted: list[str] = []
    for i, u in enumerate(units):
        original_slots.append(len(mixed))
        mixed.append(u)
        if i < len(units) - 1:
            for _ in range(k):
                w = benign_words[rng.randrange(len(benign_words))]
                inserted.append(w)
                mixed.append(w)
    canvas, ledger, _ = layout_line(mixed, style, params, rng, benign_words, seed)

    original_bboxes = []
    pixels = canvas.mutable()
    for slot in original_slots:
        glyphs = [g for g in ledger if g.unit_index == slot]
        if not glyphs:
            continue
        x0 = min(g.bbox[0] for g in glyphs)
        y0 = min(g.bbox[1] for g in glyphs)
        x1 = max(g.bbox[0] + g.bbox[2] for g in glyphs)
        y1 = max(g.bbox[1] + g.bbox[3] for g in glyphs)
        original_bboxes.append((x0, y0, x1 - x0, y1 - y0))
        draw_ellipse_outline(pixels, (x0 + x1) / 2, (y0 + y1) / 2,
                             (x1 - x0) / 2 + 3, (y1 - y0) / 2 + 3,
                             thickness=2, color=(255, 0, 0))
    # ledger keeps only the original units' glyphs; benign glyphs are context
    kept = _renumber([g for g in ledger if g.unit_index in original_slots])
    aux = {"original_unit_bboxes": original_bboxes, "inserted_words": inserted,
           "rendered_unit_count": len(mixed)}
    return Canvas(pixels), kept, aux


def _dilate1(mask: np.ndarray) -> np.ndarray:
    out = mask.copy()
    out[1:, :] |= mask[:-1, :]
    out[:-1, :] |= mask[1:, :]
    out[:, 1:] |= mask[:, :-1]
    out[:, :-1] |= mask[:, 1:]
    return out


def layout_word_cloud(units, style, params, rng, benign_words, seed):
    """Fill the ink outline of the large-size text with small benign words."""
    from scipy.signal import fftconvolve

    min_coverage = float(params["min_coverage"])
    if not 0.0 <= min_coverage <= 1.0:
        raise ParamError(f"min_coverage must be in [0, 1], got {min_coverage}")
    mask_size = int(params["mask_size"])
    word_size = int(params["word_size"])
    if not benign_words:
        raise ParamError("benign lexicon required for the word cloud")

    # large render of the full text provides the target shape
    big_style = RenderStyle(font=style.font, size=mask_size, fg=(0, 0, 0),
                            bg=style.bg, padding=style.padding,
                            unit_sizes={i: max(1, round(s * mask_size / style.size))
                                        for i, s in style.unit_sizes.items()},
                            char_angle_range=style.char_angle_range)
    shape_canvas, _, _ = layout_line(units, big_style, {}, rng, benign_words, seed)
    mask = ink_mask(shape_canvas, big_style.bg)
    dilated = _dilate1(mask)
    if not mask.any():
        raise CloudInfeasibleError("shape render produced no ink")

    words = [w for w in benign_words if all(style.font.covers(ord(ch)) for ch in w)]
    rng.shuffle(words)
    word_inks = {}
    fit_maps = {}
    H, W = mask.shape
    # a word fits where all of its ink lands on the 1px-dilated mask
    not_mask = (~dilated).astype(np.float64)

    def fit_map(word):
        if word not in fit_maps:
            c, _ = render_unit(word, RenderStyle(font=style.font, size=word_size),
                               0, None)
            ink = ink_mask(c, (255, 255, 255))
            word_inks[word] = ink
            h, w = ink.shape
            if h > H or w > W:
                fit_maps[word] = np.zeros((0, 0), dtype=bool)
            else:
                # positions where every ink pixel of the word lands on mask
                overlap_out = fftconvolve(not_mask, ink[::-1, ::-1].astype(np.float64),
                                          mode="valid")
                fit_maps[word] = overlap_out < 0.5
        return fit_maps[word]

    out = shape_canvas.mutable()
    out[:] = style.bg
    occupied = np.zeros((H, W), dtype=bool)
    covered = np.zeros((H, W), dtype=bool)
    mask_area = int(mask.sum())
    placements = []
    coverage = 0.0
    step = 2
    done = False
    for y in range(0, H, step):
        if done:
            break
        for x in range(0, W, step):
            if coverage >= min_coverage and min_coverage > 0:
                done = True
                break
            if not dilated[y, x]:
                continue
            for k in range(4):
                word = words[(len(placements) + k) % len(words)]
                fits = fit_map(word)
                h, w = word_inks[word].shape if word in word_inks else (0, 0)
                if fits.size == 0 or y >= fits.shape[0] or x >= fits.shape[1]:
                    continue
                if not fits[y, x]:
                    continue
                if occupied[y:y + h, x:x + w].any():
                    continue
                ink = word_inks[word]
                region = out[y:y + h, x:x + w]
                region[ink] = style.fg
                occupied[y:y + h, x:x + w] = True
                covered[y:y + h, x:x + w] |= mask[y:y + h, x:x + w]
                coverage = covered.sum() / mask_area
                placements.append({"word": word, "bbox": [x, y, w, h]})
                break

    if not placements and min_coverage > 0:
        raise CloudInfeasibleError(
            f"no benign word fits the shape mask for {seed.text!r}")
    aux = {"coverage": round(coverage, 4), "placed_words": len(placements),
           "benign_placements": placements, "mask_area": mask_area,
           "mask_size": mask_size, "word_size": word_size}
    return Canvas(out), [], aux


LAYOUTS = {
    "line": layout_line,
    "circle": layout_circle,
    "vertical": layout_vertical,
    "right-to-left": layout_right_to_left,
    "align-alternate": layout_align_alternate,
    "word-cloud": layout_word_cloud,
    "overlap": layout_overlap,
    "benign-text-camouflage": layout_benign_text_camouflage,
}
