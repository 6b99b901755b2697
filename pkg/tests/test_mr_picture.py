import math

import numpy as np
import pytest

from modtest.canvas import decode_image, encode_png
from modtest.corpus import SeedRecord
from modtest.errors import ParamError
from modtest.models import PerturbationSpec
from modtest.mrs.pipeline import apply_chain, render_baseline
from modtest.render import ink_mask

SEED = SeedRecord(seed_id="p", text="you are trash")


def run(seed, mr_id, params=None, rng_seed=0, **kw):
    data, fmt, aux, ledger = apply_chain(
        seed, [PerturbationSpec(mr_id, params or {}, rng_seed)], **kw)
    return decode_image(data), fmt, aux, ledger


def baseline(seed=SEED):
    canvas, ledger = render_baseline(seed)
    return canvas, ledger


class TestBlurring:
    def test_k1_identity(self):
        frames, _, _, _ = run(SEED, "blurring", {"k": 1})
        assert frames[0] == baseline()[0]

    def test_changes_nonuniform_render(self):
        frames, _, _, _ = run(SEED, "blurring")
        assert frames[0] != baseline()[0]

    def test_even_k_rejected(self):
        with pytest.raises(ParamError):
            run(SEED, "blurring", {"k": 4})


class TestCrop:
    def test_fraction_one_identity(self):
        frames, _, _, _ = run(SEED, "crop", {"keep_top_fraction": 1.0})
        assert frames[0] == baseline()[0]

    def test_bottom_rows_of_each_cell_are_background(self):
        frames, _, _, ledger = run(SEED, "crop", {"keep_top_fraction": 0.7})
        out = frames[0]
        base, base_ledger = baseline()
        keep = math.ceil(0.7 * 16)
        assert keep == 12
        for g in base_ledger:
            x, y, w, h = g.bbox
            region = out.pixels[y + keep:y + h, x:x + w]
            assert (region == 255).all()
            # kept rows unchanged
            assert (out.pixels[y:y + keep, x:x + w]
                    == base.pixels[y:y + keep, x:x + w]).all()

    def test_fraction_zero_rejected(self):
        with pytest.raises(ParamError):
            run(SEED, "crop", {"keep_top_fraction": 0.0})


class TestMirror:
    def test_involution(self):
        once, _, _, _ = run(SEED, "mirror")
        data, _, _, _ = apply_chain(
            SEED, [PerturbationSpec("mirror"), PerturbationSpec("mirror")])
        assert decode_image(data)[0] == baseline()[0]
        assert once[0] != baseline()[0]

    def test_dims_preserved(self):
        frames, _, _, _ = run(SEED, "mirror")
        base = baseline()[0]
        assert (frames[0].width, frames[0].height) == (base.width, base.height)

    def test_column_histogram_reverses(self):
        base = baseline()[0]
        frames, _, _, _ = run(SEED, "mirror")
        base_cols = ink_mask(base).sum(axis=0)
        out_cols = ink_mask(frames[0]).sum(axis=0)
        assert (out_cols == base_cols[::-1]).all()


class TestRotation:
    def test_zero_identity(self):
        frames, _, _, _ = run(SEED, "rotation", {"degrees": 0.0})
        assert frames[0] == baseline()[0]

    def test_45_bbox_growth_matches_analytic(self):
        base = baseline()[0]
        frames, _, _, _ = run(SEED, "rotation", {"degrees": 45.0})
        rad = math.radians(45)
        xs, ys = [], []
        for px, py in [(0, 0), (base.width, 0), (0, base.height),
                       (base.width, base.height)]:
            xs.append(math.cos(rad) * px - math.sin(rad) * py)
            ys.append(math.sin(rad) * px + math.cos(rad) * py)
        assert frames[0].width == math.ceil(max(xs) - min(xs) - 1e-9)
        assert frames[0].height == math.ceil(max(ys) - min(ys) - 1e-9)

    def test_45_ink_count_within_2_percent(self):
        base_ink = int(ink_mask(baseline()[0]).sum())
        frames, _, _, _ = run(SEED, "rotation", {"degrees": 45.0})
        out_ink = int(ink_mask(frames[0]).sum())
        assert abs(out_ink - base_ink) <= 0.02 * base_ink


class TestScribbling:
    def test_zero_strokes_identity(self):
        frames, _, _, _ = run(SEED, "scribbling", {"stroke_count": 0})
        assert frames[0] == baseline()[0]

    def test_deterministic(self):
        a, _, _, _ = run(SEED, "scribbling", rng_seed=6)
        b, _, _, _ = run(SEED, "scribbling", rng_seed=6)
        assert a[0] == b[0]

    def test_only_adds_ink(self):
        base_ink = ink_mask(baseline()[0])
        frames, _, _, _ = run(SEED, "scribbling", rng_seed=6)
        out_ink = ink_mask(frames[0])
        assert out_ink.sum() >= base_ink.sum()
        assert (out_ink | base_ink == out_ink).all()  # base ink never removed


class TestDistort:
    def test_identity_params(self):
        frames, _, _, _ = run(SEED, "distort",
                              {"sx": 1.0, "sy": 1.0, "bend_amp_frac": 0.0})
        assert frames[0] == baseline()[0]

    def test_output_dims(self):
        base = baseline()[0]
        frames, _, _, _ = run(SEED, "distort")
        assert frames[0].width == round(base.width * 1.8)
        assert frames[0].height == round(base.height * 0.5)

    def test_sin_zero_rows_unshifted(self):
        base = baseline()[0]
        from modtest.canvas import resize_nonuniform
        scaled = resize_nonuniform(base, 1.8, 0.5)
        frames, _, _, _ = run(SEED, "distort")
        H = frames[0].height
        for y in (0, H // 2):
            assert (frames[0].pixels[y] == scaled.pixels[y]).all()


class TestWatermark:
    def test_alpha_zero_identity(self, benign_words):
        frames, _, _, _ = run(SEED, "watermark", {"alpha": 0.0},
                              benign_words=benign_words)
        assert frames[0] == baseline()[0]

    def test_alpha_one_replaces_covered_pixels(self, benign_words):
        frames, _, _, _ = run(SEED, "watermark", {"alpha": 1.0}, rng_seed=2,
                              benign_words=benign_words)
        vals = np.unique(frames[0].pixels)
        assert 128 in vals  # pure watermark gray survives full replacement

    def test_deterministic(self, benign_words):
        a, _, _, _ = run(SEED, "watermark", rng_seed=3, benign_words=benign_words)
        b, _, _, _ = run(SEED, "watermark", rng_seed=3, benign_words=benign_words)
        assert a[0] == b[0]


class TestToGif:
    def test_even_odd_partition(self):
        seed = SeedRecord(seed_id="g", text="abcd")
        frames, fmt, aux, _ = run(seed, "to-gif")
        assert fmt == "gif"
        assert len(frames) == 2
        assert aux["gif_glyphs"] == [[0, 2], [1, 3]]
        base, ledger = baseline(seed)
        for fi, idxs in enumerate(aux["gif_glyphs"]):
            fmask = ink_mask(frames[fi])
            for gi, g in enumerate(sorted(ledger, key=lambda g: g.render_order)):
                x, y, w, h = g.bbox
                has_ink = fmask[y:y + h, x:x + w].any()
                assert has_ink == (gi in idxs)

    def test_union_of_frames_is_baseline_mask(self):
        frames, _, _, _ = run(SEED, "to-gif")
        union = ink_mask(frames[0]) | ink_mask(frames[1])
        assert (union == ink_mask(baseline()[0])).all()

    def test_single_char_second_frame_blank(self):
        seed = SeedRecord(seed_id="g1", text="a")
        frames, _, _, _ = run(seed, "to-gif")
        assert ink_mask(frames[0]).any()
        assert not ink_mask(frames[1]).any()


class TestBenignImageCamouflage:
    def test_zero_padding_identity(self):
        frames, _, _, _ = run(SEED, "benign-image-camouflage", {"pad_images": 0})
        assert frames[0] == baseline()[0]

    def test_height_and_middle_band(self):
        base = baseline()[0]
        frames, _, aux, _ = run(SEED, "benign-image-camouflage", rng_seed=8)
        out = frames[0]
        off = aux["toxic_offset_y"]
        assert aux["toxic_height"] == base.height
        assert out.width == base.width
        assert out.height > base.height
        assert (out.pixels[off:off + base.height] == base.pixels).all()

    def test_user_supplied_benign_images(self, tmp_path):
        from modtest.canvas import Canvas, encode_png as enc
        img = Canvas.blank(30, 12, (10, 200, 10))
        (tmp_path / "benign.png").write_bytes(enc(img))
        frames, _, aux, _ = run(SEED, "benign-image-camouflage",
                                {"pad_images": 2, "image_dir": str(tmp_path)})
        out = frames[0]
        base = baseline()[0]
        assert (out.pixels[aux["toxic_offset_y"]:aux["toxic_offset_y"] + base.height]
                == base.pixels).all()
        assert (out.pixels[0] == np.array([10, 200, 10])).all()
