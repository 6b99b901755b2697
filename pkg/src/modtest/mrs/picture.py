"""Picture-level perturbations applied to the rendered screenshot."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..canvas import (Canvas, GlyphPlacement, blur_mean, composite,
                      draw_thick_line, mirror_canvas, resize_nonuniform,
                      rotate_canvas)
from ..errors import ParamError
from ..render import RenderStyle, ink_mask, render_unit
from ..rng import Rng


@dataclass
class PictureState:
    """Mutable pipeline state flowing through the picture stage."""

    canvas: Canvas
    ledger: list[GlyphPlacement]
    aux: dict
    bg: tuple[int, int, int] = (255, 255, 255)
    frames: list[Canvas] | None = None  # set by to-gif (terminal)
    frame_delay_ms: int = 10


def op_blurring(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    state.canvas = blur_mean(state.canvas, int(params["k"]))


def op_crop(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    """Keep the top fraction of every glyph cell; the rest becomes background."""
    frac = float(params["keep_top_fraction"])
    if not 0.0 < frac <= 1.0:
        raise ParamError(f"keep_top_fraction must be in (0, 1], got {frac}")
    if frac == 1.0:
        return
    pixels = state.canvas.mutable()
    cells = [g.bbox for g in state.ledger]
    if not cells:
        cells = [(0, 0, state.canvas.width, state.canvas.height)]
    for x, y, w, h in cells:
        keep = math.ceil(frac * h)
        if keep < h:
            pixels[y + keep:y + h, x:x + w] = state.bg
    state.canvas = Canvas(pixels)


def op_mirror(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    W = state.canvas.width
    state.canvas = mirror_canvas(state.canvas)
    state.ledger = [GlyphPlacement(codepoint=g.codepoint,
                                   bbox=(W - g.bbox[0] - g.bbox[2], g.bbox[1],
                                         g.bbox[2], g.bbox[3]),
                                   rotation_deg=g.rotation_deg,
                                   render_order=g.render_order,
                                   unit_index=g.unit_index)
                    for g in state.ledger]


def op_rotation(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    degrees = float(params["degrees"])
    before = state.canvas
    state.canvas = rotate_canvas(before, degrees, fill=state.bg)
    # ledger bboxes become approximate: track each box through the forward map
    deg = degrees % 360.0
    rad = math.radians(deg)
    c, s = math.cos(rad), math.sin(rad)
    W, H = before.width, before.height
    OW, OH = state.canvas.width, state.canvas.height
    new_ledger = []
    for g in state.ledger:
        x, y, w, h = g.bbox
        corners = [(x, y), (x + w, y), (x, y + h), (x + w, y + h)]
        pts = []
        for px, py in corners:
            dx, dy = px - W / 2.0, py - H / 2.0
            pts.append((c * dx - s * dy + OW / 2.0, s * dx + c * dy + OH / 2.0))
        x0 = max(0, int(math.floor(min(p[0] for p in pts))))
        y0 = max(0, int(math.floor(min(p[1] for p in pts))))
        x1 = min(OW, int(math.ceil(max(p[0] for p in pts))))
        y1 = min(OH, int(math.ceil(max(p[1] for p in pts))))
        if x1 > x0 and y1 > y0:
            new_ledger.append(GlyphPlacement(
                codepoint=g.codepoint, bbox=(x0, y0, x1 - x0, y1 - y0),
                rotation_deg=g.rotation_deg + deg, render_order=g.render_order,
                unit_index=g.unit_index))
    state.ledger = new_ledger
    state.aux["rotation_deg"] = degrees


def op_scribbling(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    strokes = int(params["stroke_count"])
    if strokes < 0:
        raise ParamError(f"stroke_count must be >= 0, got {strokes}")
    pixels = state.canvas.mutable()
    W, H = state.canvas.width, state.canvas.height
    for _ in range(strokes):
        n_points = 4 + rng.randrange(5)  # 4..8 control points
        pts = [(rng.randrange(W), rng.randrange(H)) for _ in range(n_points)]
        for p0, p1 in zip(pts, pts[1:]):
            draw_thick_line(pixels, p0, p1, thickness=2, color=(0, 0, 0))
    state.canvas = Canvas(pixels)


def op_distort(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    sx, sy = float(params["sx"]), float(params["sy"])
    amp_frac = float(params["bend_amp_frac"])
    if amp_frac < 0:
        raise ParamError(f"bend_amp_frac must be >= 0, got {amp_frac}")
    scaled = resize_nonuniform(state.canvas, sx, sy)
    W, H = scaled.width, scaled.height
    pixels = scaled.mutable()
    out = np.empty_like(pixels)
    out[:] = state.bg
    for y in range(H):
        shift = int(round(amp_frac * W * math.sin(2.0 * math.pi * y / H)))
        if shift >= 0:
            out[y, shift:W] = pixels[y, 0:W - shift]
        else:
            out[y, 0:W + shift] = pixels[y, -shift:W]
    state.canvas = Canvas(out)
    state.ledger = [GlyphPlacement(
        codepoint=g.codepoint,
        bbox=(int(g.bbox[0] * sx), int(g.bbox[1] * sy),
              max(1, int(round(g.bbox[2] * sx))), max(1, int(round(g.bbox[3] * sy)))),
        rotation_deg=g.rotation_deg, render_order=g.render_order,
        unit_index=g.unit_index) for g in state.ledger]


def _watermark_tile(benign_words, rng: Rng, tile_w: int = 192, tile_h: int = 96,
                    word_size: int = 16) -> Canvas:
    tile = Canvas.blank(tile_w, tile_h, (255, 255, 255))
    pixels = tile.mutable()
    style = RenderStyle(size=word_size, fg=(128, 128, 128))
    y = 2
    while y + word_size < tile_h:
        x = 2
        while x < tile_w - 8:
            word = benign_words[rng.randrange(len(benign_words))]
            c, _ = render_unit(word, style, 0, None)
            if x + c.width > tile_w:
                break
            region = pixels[y:y + c.height, x:x + c.width]
            np.minimum(region, c.pixels, out=region)
            x += c.width + 8
        y += word_size + 6
    return Canvas(pixels)


def op_watermark(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    angle = float(params["angle"])
    alpha = float(params["alpha"])
    if not 0.0 <= alpha <= 1.0:
        raise ParamError(f"alpha must be in [0, 1], got {alpha}")
    if alpha == 0.0:
        return
    if not benign_words:
        raise ParamError("benign lexicon required for the watermark")
    tile = rotate_canvas(_watermark_tile(benign_words, rng), angle,
                         fill=(255, 255, 255))
    W, H = state.canvas.width, state.canvas.height
    wm = np.empty((H, W, 3), dtype=np.uint8)
    wm[:] = 255
    for y in range(0, H, tile.height):
        for x in range(0, W, tile.width):
            h = min(tile.height, H - y)
            w = min(tile.width, W - x)
            wm[y:y + h, x:x + w] = tile.pixels[:h, :w]
    mark = np.any(wm != 255, axis=2)
    base = state.canvas.mutable()
    blended = np.rint(alpha * wm.astype(np.float64)
                      + (1.0 - alpha) * base.astype(np.float64)).astype(np.uint8)
    base[mark] = blended[mark]
    state.canvas = Canvas(base)


def op_to_gif(state: PictureState, params: dict, rng: Rng, benign_words) -> None:
    """Two frames: even-indexed glyphs in one, odd-indexed in the other."""
    delay = int(params["frame_delay_ms"])
    base = state.canvas
    frames = []
    glyphs = sorted(state.ledger, key=lambda g: g.render_order)
    for parity in (0, 1):
        px = np.empty_like(base.pixels)
        px[:] = state.bg
        for i, g in enumerate(glyphs):
            if i % 2 != parity:
                continue
            x, y, w, h = g.bbox
            px[y:y + h, x:x + w] = base.pixels[y:y + h, x:x + w]
        frames.append(Canvas(px))
    state.frames = frames
    state.frame_delay_ms = delay
    state.aux["gif_glyphs"] = [[i for i in range(len(glyphs)) if i % 2 == p]
                               for p in (0, 1)]


def _gradient_canvas(width: int, height: int, rng: Rng) -> Canvas:
    corners = np.array([[rng.randrange(200) + 40 for _ in range(3)]
                        for _ in range(4)], dtype=np.float64)
    ys = np.linspace(0.0, 1.0, height)[:, None]
    xs = np.linspace(0.0, 1.0, width)[None, :]
    out = np.empty((height, width, 3), dtype=np.uint8)
    for ch in range(3):
        tl, tr, bl, br = corners[:, ch]
        top = tl + (tr - tl) * xs
        bot = bl + (br - bl) * xs
        out[..., ch] = np.rint(top + (bot - top) * ys).astype(np.uint8)
    return Canvas(out)


def op_benign_image_camouflage(state: PictureState, params: dict, rng: Rng,
                               benign_words) -> None:
    pad_images = int(params["pad_images"])
    if pad_images < 0:
        raise ParamError(f"pad_images must be >= 0, got {pad_images}")
    if pad_images == 0:
        return
    from ..canvas import decode_image

    W = state.canvas.width
    sources = []
    image_dir = params.get("image_dir")
    if image_dir:
        import os
        for name in sorted(os.listdir(image_dir)):
            if name.lower().endswith(".png"):
                with open(os.path.join(image_dir, name), "rb") as fh:
                    sources.append(decode_image(fh.read())[0])
    pads = []
    for i in range(pad_images):
        if sources:
            src = sources[i % len(sources)]
            pads.append(resize_nonuniform(src, W / src.width, 1.0))
        else:
            pads.append(_gradient_canvas(W, max(16, state.canvas.height), rng))
    above = pads[: (pad_images + 1) // 2]
    below = pads[(pad_images + 1) // 2:]
    offset = sum(c.height for c in above)
    total_h = offset + state.canvas.height + sum(c.height for c in below)
    out = np.empty((total_h, W, 3), dtype=np.uint8)
    y = 0
    for c in above + [state.canvas] + below:
        out[y:y + c.height] = c.pixels
        y += c.height
    state.ledger = [GlyphPlacement(codepoint=g.codepoint,
                                   bbox=(g.bbox[0], g.bbox[1] + offset,
                                         g.bbox[2], g.bbox[3]),
                                   rotation_deg=g.rotation_deg,
                                   render_order=g.render_order,
                                   unit_index=g.unit_index)
                    for g in state.ledger]
    state.aux["toxic_offset_y"] = offset
    state.aux["toxic_height"] = state.canvas.height
    state.canvas = Canvas(out)


PICTURE_OPS = {
    "blurring": op_blurring,
    "crop": op_crop,
    "mirror": op_mirror,
    "rotation": op_rotation,
    "scribbling": op_scribbling,
    "distort": op_distort,
    "watermark": op_watermark,
    "to-gif": op_to_gif,
    "benign-image-camouflage": op_benign_image_camouflage,
}
