"""The 21-relation registry, chain validation, and chain execution."""

from __future__ import annotations

from dataclasses import dataclass

from ..canvas import Canvas, draw_hline, encode_gif, encode_png
from ..corpus import SeedRecord
from ..errors import CompositionError, InvalidTextError, ParamError
from ..font import FontProvider, default_font
from ..models import PerturbationSpec, TestCase
from ..render import RenderStyle, split_units
from ..rng import Rng
from .charlevel import CHAR_APPLIERS
from .paragraph import LAYOUTS
from .picture import PICTURE_OPS, PictureState

CHAR = "char"
PARAGRAPH = "paragraph"
PICTURE = "picture"


@dataclass(frozen=True)
class MrDef:
    slug: str
    level: str
    defaults: dict
    label: str  # human-facing name used in reports


MR_REGISTRY: dict[str, MrDef] = {}


def _mr(slug, level, label, **defaults):
    MR_REGISTRY[slug] = MrDef(slug=slug, level=level, defaults=defaults, label=label)


_mr("font-change", CHAR, "Font Change", shear_deg=20.0)
_mr("font-color", CHAR, "Font Color", fg=(240, 240, 240))
_mr("font-size", CHAR, "Font Size", base=24, small=4, targets=None)
_mr("strikethrough", CHAR, "Strikethrough")
_mr("char-rotation", CHAR, "Character Rotation", min_deg=-45.0, max_deg=45.0)

_mr("circle", PARAGRAPH, "Circle")
_mr("vertical", PARAGRAPH, "Vertical Direction")
_mr("right-to-left", PARAGRAPH, "Right-to-left")
_mr("align-alternate", PARAGRAPH, "Align-left-then-right")
_mr("word-cloud", PARAGRAPH, "Word Cloud", min_coverage=0.6, mask_size=160,
    word_size=8)
_mr("overlap", PARAGRAPH, "Overlap", overlap=0.3)
_mr("benign-text-camouflage", PARAGRAPH, "Benign Text Camouflage", k=2)

_mr("blurring", PICTURE, "Blurring", k=5)
_mr("crop", PICTURE, "Crop", keep_top_fraction=0.7)
_mr("mirror", PICTURE, "Mirror")
_mr("rotation", PICTURE, "Rotation", degrees=45.0)
_mr("scribbling", PICTURE, "Scribbling", stroke_count=6)
_mr("distort", PICTURE, "Distort", sx=1.8, sy=0.5, bend_amp_frac=0.05)
_mr("watermark", PICTURE, "Watermark", angle=30.0, alpha=0.35)
_mr("to-gif", PICTURE, "To Gif", frame_delay_ms=10)
_mr("benign-image-camouflage", PICTURE, "Benign Image Camouflage", pad_images=2,
    image_dir=None)

ALL_MR_IDS = tuple(MR_REGISTRY)
_LEVEL_RANK = {CHAR: 0, PARAGRAPH: 1, PICTURE: 2}


def mr_level(mr_id: str) -> str:
    if mr_id not in MR_REGISTRY:
        raise CompositionError(f"unknown perturbation {mr_id!r}")
    return MR_REGISTRY[mr_id].level


def resolve_params(spec: PerturbationSpec) -> dict:
    mr = MR_REGISTRY.get(spec.mr_id)
    if mr is None:
        raise CompositionError(f"unknown perturbation {spec.mr_id!r}")
    unknown = set(spec.params) - set(mr.defaults)
    if unknown:
        raise ParamError(f"{spec.mr_id}: unknown parameters {sorted(unknown)}")
    return {**mr.defaults, **spec.params}


def validate_chain(specs: list[PerturbationSpec]) -> None:
    """Ordering rule: char MRs, then at most one layout MR, then picture MRs;
    to-gif only in the terminal position."""
    if not specs:
        raise CompositionError("empty perturbation chain")
    ids = [s if isinstance(s, str) else s.mr_id for s in specs]
    ranks = [_LEVEL_RANK[mr_level(m)] for m in ids]
    if any(a > b for a, b in zip(ranks, ranks[1:])):
        raise CompositionError(f"invalid chain order: {' -> '.join(ids)}")
    layouts = [m for m in ids if mr_level(m) == PARAGRAPH]
    if len(layouts) > 1:
        raise CompositionError(
            f"at most one layout perturbation allowed, got {layouts}")
    for m in ids[:-1]:
        if m == "to-gif":
            raise CompositionError("to-gif must be the terminal perturbation")


def compose(specs: list[PerturbationSpec]) -> tuple[PerturbationSpec, ...]:
    """Validate and freeze an ordered chain."""
    validate_chain(specs)
    return tuple(specs)


def apply_chain(seed: SeedRecord, specs: list[PerturbationSpec],
                font: FontProvider | None = None,
                benign_words: list[str] | None = None,
                toxic_lexicon: list[str] | None = None,
                ) -> tuple[bytes, str, dict, list]:
    """Run one perturbation chain over a seed.

    Returns (artifact_bytes, artifact_format, aux, ledger).
    """
    validate_chain(specs)
    if not seed.text.strip():
        raise InvalidTextError(f"seed {seed.seed_id!r} has empty text")
    font = font or default_font()
    units = split_units(seed.text, seed.language)
    if not units:
        raise InvalidTextError(f"seed {seed.seed_id!r} has no layout units")

    aux: dict = {}
    style = RenderStyle(font=font)
    layout_spec: PerturbationSpec | None = None
    picture_specs: list[PerturbationSpec] = []
    for spec in specs:
        level = mr_level(spec.mr_id)
        params = resolve_params(spec)
        rng = Rng(spec.rng_seed)
        if level == CHAR:
            style = CHAR_APPLIERS[spec.mr_id](style, params, rng, units, aux,
                                              toxic_lexicon)
        elif level == PARAGRAPH:
            layout_spec = spec
        else:
            picture_specs.append(spec)

    if layout_spec is not None:
        layout_name = layout_spec.mr_id
        layout_params = resolve_params(layout_spec)
        layout_rng = Rng(layout_spec.rng_seed)
    else:
        layout_name, layout_params, layout_rng = "line", {}, Rng(0)
    canvas, ledger, layout_aux = LAYOUTS[layout_name](
        units, style, layout_params, layout_rng, benign_words, seed)
    aux.update(layout_aux)

    if style.strikethrough:
        pixels = canvas.mutable()
        h = canvas.height
        rows = (int(0.33 * h), int(0.66 * h))
        for row in rows:
            draw_hline(pixels, row, (0, 0, 0))
        canvas = Canvas(pixels)
        aux["strikethrough_rows"] = list(rows)

    state = PictureState(canvas=canvas, ledger=list(ledger), aux=aux, bg=style.bg)
    for spec in picture_specs:
        PICTURE_OPS[spec.mr_id](state, resolve_params(spec), Rng(spec.rng_seed),
                                benign_words)

    if state.frames is not None:
        data, quantized = encode_gif(state.frames, state.frame_delay_ms)
        if quantized:
            state.aux["gif_quantized"] = True
        return data, "gif", state.aux, state.ledger
    return encode_png(state.canvas), "png", state.aux, state.ledger


def render_baseline(seed: SeedRecord, font: FontProvider | None = None):
    """Unperturbed screenshot of a seed (the filtering/EFR anchor)."""
    font = font or default_font()
    units = split_units(seed.text, seed.language)
    if not units:
        raise InvalidTextError(f"seed {seed.seed_id!r} has no layout units")
    canvas, ledger, _ = LAYOUTS["line"](units, RenderStyle(font=font), {}, Rng(0),
                                        None, seed)
    return canvas, ledger
