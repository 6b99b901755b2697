import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from modtest.canvas import (Canvas, blur_mean, composite, crop_rect,
                            decode_image, encode_gif, encode_png,
                            mirror_canvas, resize_nonuniform, rotate_canvas,
                            rotated_bbox)
from modtest.errors import ParamError


def random_canvas(rng, w, h):
    return Canvas(rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8))


canvases = st.builds(
    lambda seed, w, h: random_canvas(np.random.default_rng(seed), w, h),
    st.integers(0, 2**32 - 1), st.integers(1, 24), st.integers(1, 24))


class TestComposite:
    def test_darken_black_over_white(self):
        base = Canvas.blank(8, 8, (255, 255, 255))
        overlay = Canvas.blank(4, 4, (0, 0, 0))
        out = composite(base, overlay, (0, 0), mode="darken")
        assert (out.pixels[:4, :4] == 0).all()
        assert (out.pixels[4:, :] == 255).all()

    def test_alpha_zero_is_identity(self):
        base = Canvas(np.random.default_rng(0).integers(0, 256, (6, 6, 3), dtype=np.uint8))
        overlay = Canvas.blank(6, 6, (10, 20, 30))
        assert composite(base, overlay, (0, 0), mode="alpha", alpha=0.0) == base

    def test_alpha_one_is_overlay(self):
        base = Canvas.blank(6, 6, (200, 200, 200))
        overlay = Canvas.blank(3, 3, (1, 2, 3))
        out = composite(base, overlay, (1, 1), mode="alpha", alpha=1.0)
        assert (out.pixels[1:4, 1:4] == overlay.pixels).all()

    def test_alpha_out_of_range(self):
        base = Canvas.blank(4, 4)
        with pytest.raises(ParamError):
            composite(base, base, (0, 0), mode="alpha", alpha=1.5)

    def test_overlay_clipped(self):
        base = Canvas.blank(4, 4, (255, 255, 255))
        overlay = Canvas.blank(4, 4, (0, 0, 0))
        out = composite(base, overlay, (2, 2), mode="replace")
        assert (out.pixels[2:, 2:] == 0).all()
        assert (out.pixels[:2, :] == 255).all()


class TestRotate:
    def test_90_is_exact_permutation(self):
        c = Canvas(np.arange(5 * 3 * 3, dtype=np.uint8).reshape(3, 5, 3))
        out = rotate_canvas(c, 90)
        assert (out.width, out.height) == (c.height, c.width)
        for y in range(c.height):
            for x in range(c.width):
                assert (out.pixels[x, c.height - 1 - y] == c.pixels[y, x]).all()

    def test_zero_identity(self):
        c = Canvas(np.random.default_rng(1).integers(0, 256, (7, 9, 3), dtype=np.uint8))
        assert rotate_canvas(c, 0) == c

    def test_45_bbox_matches_corner_oracle(self):
        # oracle: rotate the rectangle's corner points analytically
        w, h = 100, 20
        rad = math.radians(45)
        xs, ys = [], []
        for px, py in [(0, 0), (w, 0), (0, h), (w, h)]:
            xs.append(math.cos(rad) * px - math.sin(rad) * py)
            ys.append(math.sin(rad) * px + math.cos(rad) * py)
        expect_w = math.ceil(max(xs) - min(xs) - 1e-9)
        expect_h = math.ceil(max(ys) - min(ys) - 1e-9)
        assert rotated_bbox(w, h, 45) == (expect_w, expect_h)
        out = rotate_canvas(Canvas.blank(w, h, (0, 0, 0)), 45)
        assert (out.width, out.height) == (expect_w, expect_h)

    @given(canvases)
    @settings(max_examples=25, deadline=None)
    def test_four_quarter_turns_identity(self, c):
        out = c
        for _ in range(4):
            out = rotate_canvas(out, 90)
        assert out == c


class TestMirror:
    @given(canvases)
    @settings(max_examples=25, deadline=None)
    def test_involution(self, c):
        assert mirror_canvas(mirror_canvas(c)) == c

    def test_one_pixel_wide_unchanged(self):
        c = Canvas(np.random.default_rng(2).integers(0, 256, (5, 1, 3), dtype=np.uint8))
        assert mirror_canvas(c) == c

    def test_halves_swap(self):
        a = np.zeros((4, 8, 3), dtype=np.uint8)
        a[:, 4:] = 255
        out = mirror_canvas(Canvas(a))
        assert (out.pixels[:, :4] == 255).all()
        assert (out.pixels[:, 4:] == 0).all()


class TestBlur:
    def test_k1_identity(self):
        c = Canvas(np.random.default_rng(3).integers(0, 256, (6, 6, 3), dtype=np.uint8))
        assert blur_mean(c, 1) == c

    def test_uniform_unchanged(self):
        c = Canvas.blank(10, 10, (77, 77, 77))
        assert blur_mean(c, 5) == c

    def test_even_k_rejected(self):
        with pytest.raises(ParamError):
            blur_mean(Canvas.blank(4, 4), 2)

    def test_matches_bruteforce(self):
        rng = np.random.default_rng(4)
        c = random_canvas(rng, 5, 5)
        out = blur_mean(c, 3)
        src = c.pixels.astype(np.int64)
        for y in range(5):
            for x in range(5):
                for ch in range(3):
                    total = 0
                    for dy in (-1, 0, 1):
                        for dx in (-1, 0, 1):
                            yy = min(max(y + dy, 0), 4)
                            xx = min(max(x + dx, 0), 4)
                            total += src[yy, xx, ch]
                    expect = (total + 4) // 9  # round half up
                    assert out.pixels[y, x, ch] == expect


class TestCropResize:
    def test_full_rect_identity(self):
        c = random_canvas(np.random.default_rng(5), 9, 7)
        assert crop_rect(c, (0, 0, 9, 7)) == c

    def test_keep_top_70_percent(self):
        c = Canvas.blank(20, 100)
        out = crop_rect(c, (0, 0, 20, 70))
        assert (out.width, out.height) == (20, 70)

    def test_zero_width_rejected(self):
        with pytest.raises(ParamError):
            crop_rect(Canvas.blank(4, 4), (0, 0, 0, 2))

    def test_resize_identity(self):
        c = random_canvas(np.random.default_rng(6), 10, 10)
        assert resize_nonuniform(c, 1.0, 1.0) == c

    def test_resize_dims(self):
        out = resize_nonuniform(Canvas.blank(10, 10), 2.0, 1.0)
        assert (out.width, out.height) == (20, 10)

    def test_resize_zero_rejected(self):
        with pytest.raises(ParamError):
            resize_nonuniform(Canvas.blank(4, 4), 0.0, 1.0)


class TestCodecs:
    def test_png_round_trip(self):
        c = random_canvas(np.random.default_rng(7), 13, 9)
        assert decode_image(encode_png(c))[0] == c

    def test_gif_two_frames_round_trip(self):
        f1 = Canvas.blank(10, 6, (255, 255, 255))
        f2 = Canvas.blank(10, 6, (0, 0, 0))
        data, quantized = encode_gif([f1, f2], frame_delay_ms=10)
        assert not quantized
        frames = decode_image(data)
        assert len(frames) == 2
        assert frames[0] == f1
        assert frames[1] == f2

    def test_gif_loops_forever_with_delay(self):
        import io

        from PIL import Image
        data, _ = encode_gif([Canvas.blank(4, 4), Canvas.blank(4, 4, (0, 0, 0))], 10)
        im = Image.open(io.BytesIO(data))
        assert im.info.get("loop") == 0
        assert im.info.get("duration") == 10

    def test_gif_no_frames_rejected(self):
        with pytest.raises(ParamError):
            encode_gif([], 10)

    def test_gif_mismatched_dims_rejected(self):
        with pytest.raises(ParamError):
            encode_gif([Canvas.blank(4, 4), Canvas.blank(5, 4)], 10)

    def test_gif_quantizes_when_over_256_colors(self):
        c = random_canvas(np.random.default_rng(8), 32, 32)
        data, quantized = encode_gif([c], 10)
        assert quantized
        decoded = decode_image(data)[0]
        assert set(np.unique(decoded.pixels)) <= {0, 51, 102, 153, 204, 255}
