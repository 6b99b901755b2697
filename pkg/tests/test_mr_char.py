import numpy as np
import pytest

from modtest.canvas import encode_png
from modtest.corpus import SeedRecord
from modtest.errors import GlyphCoverageError, ParamError
from modtest.models import PerturbationSpec
from modtest.mrs.pipeline import apply_chain, render_baseline
from modtest.render import RenderStyle, ink_mask, split_units
from modtest.mrs.paragraph import layout_line
from modtest.rng import Rng


SEED = SeedRecord(seed_id="s", text="hate u")


def run(seed, mr_id, params=None, rng_seed=0, **kw):
    from modtest.canvas import decode_image
    data, fmt, aux, ledger = apply_chain(
        seed, [PerturbationSpec(mr_id, params or {}, rng_seed)], **kw)
    return decode_image(data)[0], aux, ledger


def baseline_png(seed):
    canvas, _ = render_baseline(seed)
    return encode_png(canvas)


class TestFontChange:
    def test_ledger_skips_space(self):
        _, _, ledger = run(SEED, "font-change")
        assert len(ledger) == 5

    def test_missing_codepoint_propagates(self):
        with pytest.raises(GlyphCoverageError):
            run(SeedRecord(seed_id="z", text="好"), "font-change")

    def test_zero_shear_is_baseline(self):
        data, _, _, _ = apply_chain(SEED, [PerturbationSpec("font-change",
                                                            {"shear_deg": 0.0})])
        assert data == baseline_png(SEED)

    def test_oblique_differs_from_baseline(self):
        data, _, _, _ = apply_chain(SEED, [PerturbationSpec("font-change")])
        assert data != baseline_png(SEED)


class TestFontColor:
    def test_white_on_white_keeps_ledger(self):
        canvas, _, ledger = run(SEED, "font-color", {"fg": (255, 255, 255)})
        assert not ink_mask(canvas).any()
        assert len(ledger) == 5

    def test_black_is_baseline(self):
        data, _, _, _ = apply_chain(SEED, [PerturbationSpec("font-color",
                                                            {"fg": (0, 0, 0)})])
        assert data == baseline_png(SEED)

    def test_default_fg_pixels(self):
        canvas, aux, _ = run(SEED, "font-color")
        mask = ink_mask(canvas)
        assert mask.any()
        assert (canvas.pixels[mask] == np.array([240, 240, 240])).all()
        assert aux["contrast_ratio"] > 1.0


class TestFontSize:
    def test_target_word_shrinks_to_4px(self):
        _, aux, ledger = run(SEED, "font-size",
                             {"base": 24, "small": 4, "targets": [1]})
        small = [g for g in ledger if g.unit_index == 1]
        big = [g for g in ledger if g.unit_index == 0]
        assert all(g.bbox[3] == 4 for g in small)
        assert all(g.bbox[3] == 24 for g in big)
        assert aux["shrunk_units"] == [1]

    def test_small_equals_base_is_uniform(self):
        data, _, _, _ = apply_chain(SEED, [PerturbationSpec(
            "font-size", {"base": 24, "small": 24, "targets": [1]})])
        units = split_units(SEED.text)
        canvas, _, _ = layout_line(units, RenderStyle(size=24), {}, Rng(0),
                                   None, SEED)
        assert data == encode_png(canvas)

    def test_zero_small_rejected(self):
        with pytest.raises(ParamError):
            run(SEED, "font-size", {"base": 24, "small": 0})

    def test_lexicon_targeting(self):
        _, aux, _ = run(SeedRecord(seed_id="t", text="you are trash"),
                        "font-size", toxic_lexicon=["trash"])
        assert aux["shrunk_units"] == [2]

    def test_random_target_without_lexicon(self):
        _, aux, _ = run(SEED, "font-size", rng_seed=5)
        assert len(aux["shrunk_units"]) == 1
        assert 0 <= aux["shrunk_units"][0] < 2


class TestStrikethrough:
    def test_rows_fully_black(self):
        canvas, aux, _ = run(SEED, "strikethrough")
        h = canvas.height
        rows = [int(0.33 * h), int(0.66 * h)]
        assert aux["strikethrough_rows"] == rows
        for row in rows:
            assert (canvas.pixels[row] == 0).all()

    def test_only_those_rows_gain_ink(self):
        base, _ = render_baseline(SEED)
        struck, _, _ = run(SEED, "strikethrough")
        diff_rows = {int(y) for y in
                     np.argwhere(np.any(base.pixels != struck.pixels, axis=(1, 2)))[:, 0]}
        h = base.height
        assert diff_rows <= {int(0.33 * h), int(0.66 * h)}

    def test_h90_row_positions(self):
        assert int(0.33 * 90) == 29
        assert int(0.66 * 90) == 59


class TestCharRotation:
    def test_deterministic_under_seed(self):
        a = apply_chain(SEED, [PerturbationSpec("char-rotation", rng_seed=11)])
        b = apply_chain(SEED, [PerturbationSpec("char-rotation", rng_seed=11)])
        assert a[0] == b[0]

    def test_different_seed_differs(self):
        a = apply_chain(SEED, [PerturbationSpec("char-rotation", rng_seed=11)])
        b = apply_chain(SEED, [PerturbationSpec("char-rotation", rng_seed=12)])
        assert a[0] != b[0]

    def test_zero_range_is_baseline(self):
        data, _, _, _ = apply_chain(SEED, [PerturbationSpec(
            "char-rotation", {"min_deg": 0.0, "max_deg": 0.0})])
        assert data == baseline_png(SEED)

    def test_angles_recorded_in_range(self):
        _, _, ledger = run(SeedRecord(seed_id="r", text="abcde"),
                           "char-rotation", rng_seed=3)
        assert len(ledger) == 5
        assert all(-45.0 <= g.rotation_deg <= 45.0 for g in ledger)
        assert any(g.rotation_deg != 0.0 for g in ledger)


class TestSemanticPreservation:
    def test_ground_truth_never_changes(self, benign_words):
        from modtest.harness import generate_suite
        from modtest.corpus import SeedCorpus
        corpus = SeedCorpus((SEED,))
        specs = [PerturbationSpec(m) for m in
                 ("font-change", "font-color", "font-size", "strikethrough",
                  "char-rotation")]
        entries = generate_suite(corpus, specs, "/tmp/modtest-semantic",
                                 benign_words=benign_words)
        assert all(e["text"] == SEED.text for e in entries)
