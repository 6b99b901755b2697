"""Raster substrate: canvases, geometric/photometric transforms, PNG/GIF codecs.

Every operation is a pure function: given the same inputs it returns a
byte-identical canvas. Resampling is nearest-neighbor throughout, vacated
pixels are filled with background white.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from .errors import DecodeError, ParamError

WHITE = (255, 255, 255)
BLACK = (0, 0, 0)

RGB = tuple[int, int, int]


@dataclass(frozen=True)
class GlyphPlacement:
    """Ground-truth ledger entry for one rendered glyph."""

    codepoint: int
    bbox: tuple[int, int, int, int]  # x, y, w, h in canvas pixels
    rotation_deg: float = 0.0
    render_order: int = 0
    unit_index: int = 0  # which word/character unit this glyph belongs to


@dataclass(frozen=True)
class Canvas:
    """Immutable row-major RGB raster, origin top-left."""

    pixels: np.ndarray  # (H, W, 3) uint8, read-only

    def __post_init__(self):
        a = self.pixels
        if a.ndim != 3 or a.shape[2] != 3 or a.dtype != np.uint8:
            raise ParamError("canvas pixels must be (H, W, 3) uint8")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ParamError("canvas must be at least 1x1")
        a.setflags(write=False)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @staticmethod
    def blank(width: int, height: int, color: RGB = WHITE) -> "Canvas":
        if width < 1 or height < 1:
            raise ParamError(f"invalid canvas size {width}x{height}")
        a = np.empty((height, width, 3), dtype=np.uint8)
        a[:] = color
        return Canvas(a)

    def mutable(self) -> np.ndarray:
        return self.pixels.copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, Canvas):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )


def composite(base: Canvas, overlay: Canvas, at: tuple[int, int],
              mode: str = "replace", alpha: float | None = None) -> Canvas:
    """Place overlay onto base at (x, y); regions outside base are clipped.

    Modes: "replace" copies pixels, "darken" takes per-channel min,
    "alpha" computes round(alpha*overlay + (1-alpha)*base).
    """
    if mode == "alpha":
        if alpha is None or not (0.0 <= alpha <= 1.0):
            raise ParamError(f"alpha must be in [0, 1], got {alpha}")
    elif mode not in ("replace", "darken"):
        raise ParamError(f"unknown composite mode {mode!r}")

    x, y = at
    bx0, by0 = max(x, 0), max(y, 0)
    bx1 = min(x + overlay.width, base.width)
    by1 = min(y + overlay.height, base.height)
    if bx0 >= bx1 or by0 >= by1:
        return base
    out = base.mutable()
    src = overlay.pixels[by0 - y:by1 - y, bx0 - x:bx1 - x]
    dst = out[by0:by1, bx0:bx1]
    if mode == "replace":
        out[by0:by1, bx0:bx1] = src
    elif mode == "darken":
        out[by0:by1, bx0:bx1] = np.minimum(dst, src)
    else:
        blended = np.rint(alpha * src.astype(np.float64)
                          + (1.0 - alpha) * dst.astype(np.float64))
        out[by0:by1, bx0:bx1] = np.clip(blended, 0, 255).astype(np.uint8)
    return Canvas(out)


def mirror_canvas(c: Canvas) -> Canvas:
    """Horizontal flip: out(x, y) = in(W-1-x, y)."""
    return Canvas(np.ascontiguousarray(c.pixels[:, ::-1]))


def rotated_bbox(width: int, height: int, degrees: float) -> tuple[int, int]:
    """Output dimensions of the expanded bounding box for a rotation."""
    rad = math.radians(degrees % 360.0)
    c, s = abs(math.cos(rad)), abs(math.sin(rad))
    # tiny epsilon keeps e.g. 45-degree boxes from gaining a row to fp noise
    out_w = max(1, math.ceil(width * c + height * s - 1e-9))
    out_h = max(1, math.ceil(width * s + height * c - 1e-9))
    return out_w, out_h


def rotate_canvas(c: Canvas, degrees: float, fill: RGB = WHITE) -> Canvas:
    """Rotate clockwise by `degrees`; bounding box expands, vacated pixels
    filled with `fill`, nearest-neighbor resampling. Multiples of 90 are
    exact permutations."""
    deg = degrees % 360.0
    if deg == 0.0:
        return c
    if deg in (90.0, 180.0, 270.0):
        k = int(deg) // 90
        return Canvas(np.ascontiguousarray(np.rot90(c.pixels, k=-k)))

    # Three-shear rotation: each shear is an integer shift of whole rows or
    # columns, so the composite maps source pixels one-to-one and preserves
    # ink counts (only pixels pushed past the expanded box are clipped).
    out_w, out_h = rotated_bbox(c.width, c.height, deg)
    rad = math.radians(deg)
    a = -math.tan(rad / 2.0)
    b = math.sin(rad)
    cy, cx = (c.height - 1) / 2.0, (c.width - 1) / 2.0
    ys, xs = np.mgrid[0:c.height, 0:c.width]
    x1 = xs + np.round(a * (ys - cy)).astype(np.int64)
    y1 = ys + np.round(b * (x1 - cx)).astype(np.int64)
    x2 = x1 + np.round(a * (y1 - cy)).astype(np.int64)
    # the shears fix the image center; recenter it in the expanded box
    x2 = x2 + int(round((out_w - 1) / 2.0 - cx))
    y1 = y1 + int(round((out_h - 1) / 2.0 - cy))
    inside = (x2 >= 0) & (x2 < out_w) & (y1 >= 0) & (y1 < out_h)
    out = np.empty((out_h, out_w, 3), dtype=np.uint8)
    out[:] = fill
    out[y1[inside], x2[inside]] = c.pixels[ys[inside], xs[inside]]
    return Canvas(out)


def blur_mean(c: Canvas, k: int) -> Canvas:
    """k x k box blur, rounded mean per channel, clamp-to-edge padding."""
    if k < 1 or k % 2 == 0:
        raise ParamError(f"blur kernel must be odd and >= 1, got {k}")
    if k == 1:
        return c
    r = k // 2
    padded = np.pad(c.pixels.astype(np.uint64), ((r, r), (r, r), (0, 0)), mode="edge")
    # sliding-window sums via 2D cumulative sum
    cs = padded.cumsum(axis=0).cumsum(axis=1)
    cs = np.pad(cs, ((1, 0), (1, 0), (0, 0)))
    h, w = c.height, c.width
    sums = (cs[k:k + h, k:k + w] - cs[0:h, k:k + w]
            - cs[k:k + h, 0:w] + cs[0:h, 0:w])
    area = k * k
    out = ((sums + area // 2) // area).astype(np.uint8)
    return Canvas(out)


def crop_rect(c: Canvas, rect: tuple[int, int, int, int]) -> Canvas:
    x, y, w, h = rect
    if w < 1 or h < 1 or x < 0 or y < 0 or x + w > c.width or y + h > c.height:
        raise ParamError(f"crop rect {rect} outside {c.width}x{c.height} canvas")
    return Canvas(np.ascontiguousarray(c.pixels[y:y + h, x:x + w]))


def resize_nonuniform(c: Canvas, sx: float, sy: float) -> Canvas:
    """Nearest-neighbor scale by independent horizontal/vertical factors."""
    if sx <= 0 or sy <= 0:
        raise ParamError(f"scale factors must be positive, got ({sx}, {sy})")
    if sx == 1.0 and sy == 1.0:
        return c
    out_w = max(1, round(c.width * sx))
    out_h = max(1, round(c.height * sy))
    src_x = np.minimum((np.arange(out_w) * c.width) // out_w, c.width - 1)
    src_y = np.minimum((np.arange(out_h) * c.height) // out_h, c.height - 1)
    return Canvas(np.ascontiguousarray(c.pixels[np.ix_(src_y, src_x)]))


# ---------------------------------------------------------------------------
# drawing helpers

def draw_hline(pixels: np.ndarray, y: int, color: RGB = BLACK) -> None:
    if 0 <= y < pixels.shape[0]:
        pixels[y, :] = color


def draw_thick_line(pixels: np.ndarray, p0: tuple[int, int], p1: tuple[int, int],
                    thickness: int = 2, color: RGB = BLACK) -> None:
    """Bresenham segment stamped with a thickness x thickness square brush."""
    h, w = pixels.shape[:2]
    x0, y0 = p0
    x1, y1 = p1
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    step_x = 1 if x0 < x1 else -1
    step_y = 1 if y0 < y1 else -1
    err = dx + dy
    while True:
        ya, yb = max(0, y0), min(h, y0 + thickness)
        xa, xb = max(0, x0), min(w, x0 + thickness)
        if ya < yb and xa < xb:
            pixels[ya:yb, xa:xb] = color
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += step_x
        if e2 <= dx:
            err += dx
            y0 += step_y


def draw_ellipse_outline(pixels: np.ndarray, cx: float, cy: float,
                         rx: float, ry: float, thickness: int = 2,
                         color: RGB = (255, 0, 0)) -> None:
    """Parametric ellipse outline stamped with a square brush."""
    steps = max(32, int(4 * math.pi * max(rx, ry)))
    h, w = pixels.shape[:2]
    half = thickness / 2.0
    for i in range(steps):
        t = 2.0 * math.pi * i / steps
        x = int(round(cx + rx * math.cos(t) - half))
        y = int(round(cy + ry * math.sin(t) - half))
        ya, yb = max(0, y), min(h, y + thickness)
        xa, xb = max(0, x), min(w, x + thickness)
        if ya < yb and xa < xb:
            pixels[ya:yb, xa:xb] = color


# ---------------------------------------------------------------------------
# codecs

def encode_png(c: Canvas) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(c.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


_QUANT_LEVELS = np.array([0, 51, 102, 153, 204, 255], dtype=np.uint8)


def _quantize_deterministic(a: np.ndarray) -> np.ndarray:
    # nearest of 6 evenly spaced levels per channel (216-color cube)
    return _QUANT_LEVELS[((a.astype(np.uint16) + 25) // 51).clip(0, 5)]


def encode_gif(frames: list[Canvas], frame_delay_ms: int = 10) -> tuple[bytes, bool]:
    """Encode an infinitely looping animated GIF.

    Returns (bytes, quantized): `quantized` is True when the frames held more
    than 256 distinct colors and were deterministically reduced to the
    216-color cube.
    """
    if not frames:
        raise ParamError("GIF needs at least one frame")
    dims = {(f.width, f.height) for f in frames}
    if len(dims) != 1:
        raise ParamError(f"GIF frames must share dimensions, got {sorted(dims)}")
    if frame_delay_ms < 0:
        raise ParamError("frame delay must be >= 0")

    arrays = [f.pixels for f in frames]
    colors = np.unique(np.concatenate([a.reshape(-1, 3) for a in arrays], axis=0), axis=0)
    quantized = len(colors) > 256
    if quantized:
        arrays = [_quantize_deterministic(a) for a in arrays]
        colors = np.unique(np.concatenate([a.reshape(-1, 3) for a in arrays], axis=0), axis=0)

    palette = np.zeros((256, 3), dtype=np.uint8)
    palette[:len(colors)] = colors

    def pack(rgb: np.ndarray) -> np.ndarray:
        rgb = rgb.astype(np.uint32)
        return (rgb[..., 0] << 16) | (rgb[..., 1] << 8) | rgb[..., 2]

    palette_keys = pack(colors)  # np.unique output is already sorted
    images = []
    for a in arrays:
        idx = np.searchsorted(palette_keys, pack(a)).astype(np.uint8)
        im = Image.fromarray(idx, mode="P")
        im.putpalette(palette.tobytes())
        images.append(im)

    buf = io.BytesIO()
    images[0].save(buf, format="GIF", save_all=True, append_images=images[1:],
                   duration=frame_delay_ms, loop=0, optimize=False)
    return buf.getvalue(), quantized


def decode_image(data: bytes) -> list[Canvas]:
    """Decode PNG or GIF bytes into a list of RGB frames."""
    try:
        im = Image.open(io.BytesIO(data))
        frames = []
        n = getattr(im, "n_frames", 1)
        for i in range(n):
            im.seek(i)
            frames.append(Canvas(np.asarray(im.convert("RGB"), dtype=np.uint8).copy()))
        return frames
    except ParamError:
        raise
    except Exception as exc:
        raise DecodeError(f"undecodable artifact: {exc}") from exc
