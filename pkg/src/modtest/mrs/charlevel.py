"""Character-level perturbations: styling applied while "typing" glyphs."""

from __future__ import annotations

from ..errors import ParamError
from ..render import RenderStyle
from ..rng import Rng


def _relative_luminance(rgb) -> float:
    def lin(c):
        c = c / 255.0
        return c / 12.92 if c <= 0.03928 else ((c + 0.055) / 1.055) ** 2.4
    r, g, b = (lin(v) for v in rgb)
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def contrast_ratio(fg, bg) -> float:
    la, lb = _relative_luminance(fg), _relative_luminance(bg)
    hi, lo = max(la, lb), min(la, lb)
    return (hi + 0.05) / (lo + 0.05)


def apply_font_change(style: RenderStyle, params: dict, rng: Rng,
                      units: list[str], aux: dict, toxic_lexicon) -> RenderStyle:
    shear = float(params["shear_deg"])
    style.font = style.font.oblique(shear) if shear != 0.0 else style.font
    aux["shear_deg"] = shear
    return style


def apply_font_color(style: RenderStyle, params: dict, rng: Rng,
                     units: list[str], aux: dict, toxic_lexicon) -> RenderStyle:
    fg = tuple(int(v) for v in params["fg"])
    if len(fg) != 3 or any(not 0 <= v <= 255 for v in fg):
        raise ParamError(f"fg must be an RGB triple in 0..255, got {params['fg']}")
    style.fg = fg
    aux["contrast_ratio"] = round(contrast_ratio(fg, style.bg), 3)
    return style


def _match_targets(units: list[str], toxic_lexicon) -> list[int]:
    if not toxic_lexicon:
        return []
    lex = {w.lower() for w in toxic_lexicon}
    return [i for i, u in enumerate(units)
            if u.lower().strip(".,!?;:'\"") in lex]


def apply_font_size(style: RenderStyle, params: dict, rng: Rng,
                    units: list[str], aux: dict, toxic_lexicon) -> RenderStyle:
    base, small = int(params["base"]), int(params["small"])
    if base < 1 or small < 1:
        raise ParamError(f"font sizes must be >= 1, got base={base} small={small}")
    targets = params.get("targets")
    if targets is None:
        targets = _match_targets(units, toxic_lexicon)
        if not targets:
            targets = [rng.randrange(len(units))]
    targets = [int(t) for t in targets]
    if any(not 0 <= t < len(units) for t in targets):
        raise ParamError(f"target indices {targets} out of range for {len(units)} units")
    style.size = base
    style.unit_sizes = {t: small for t in targets}
    aux["shrunk_units"] = targets
    return style


def apply_strikethrough(style: RenderStyle, params: dict, rng: Rng,
                        units: list[str], aux: dict, toxic_lexicon) -> RenderStyle:
    style.strikethrough = True
    return style


def apply_char_rotation(style: RenderStyle, params: dict, rng: Rng,
                        units: list[str], aux: dict, toxic_lexicon) -> RenderStyle:
    lo, hi = float(params["min_deg"]), float(params["max_deg"])
    if lo > hi:
        raise ParamError(f"empty angle range [{lo}, {hi}]")
    style.char_angle_range = (lo, hi)
    style.char_rng = rng
    return style


CHAR_APPLIERS = {
    "font-change": apply_font_change,
    "font-color": apply_font_color,
    "font-size": apply_font_size,
    "strikethrough": apply_strikethrough,
    "char-rotation": apply_char_rotation,
}
